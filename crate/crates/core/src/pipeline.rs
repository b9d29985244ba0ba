//! A complete simulation setup: material, array, pump, grid window and an
//! optional filter, turned into a normalised amplitude tensor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::jsa::{apply_spectral_filter, build_jsa, normalize, ArrayGeometry, JsaTensor, SpectralFilter};
use crate::material::MaterialModel;
use crate::pump::PumpSpec;

/// Wavelength window (m) and sample count of the pump-centred frequency grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pipeline {
    pub material: MaterialModel,
    pub geometry: ArrayGeometry,
    pub pump: PumpSpec,
    pub grid: GridSpec,
    pub filter: Option<SpectralFilter>,
}

impl Pipeline {
    pub fn grid(&self) -> Result<Grid> {
        Grid::pump_centered(
            self.pump.central_wavelength(),
            self.grid.lambda_min,
            self.grid.lambda_max,
            self.grid.points,
            self.geometry.channel_count,
        )
    }

    /// Normalised (and filtered, if a filter is set) amplitude tensor.
    pub fn state(&self) -> Result<JsaTensor> {
        let grid = self.grid()?;
        let raw = build_jsa(&grid, &self.geometry, &self.pump, &self.material)?;
        match &self.filter {
            Some(filter) => apply_spectral_filter(raw, filter),
            None => normalize(raw),
        }
    }

    pub fn with_pump_wavelength(&self, wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0) {
            return Err(Error::invalid("pump.wavelength", "must be positive"));
        }
        Ok(Self {
            pump: self.pump.retuned(wavelength)?,
            ..self.clone()
        })
    }
}
