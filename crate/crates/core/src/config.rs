//! Run configuration in TOML. Every section is optional and defaults to the
//! 40 mm, 41-channel lithium niobate array used for the experimental
//! comparison. Unknown keys are rejected.
//!
//! ```toml
//! scenario = "custom"
//! smoothing_nm = 10.0
//!
//! [material]
//! temperature_c = 185.0
//! coupling_scale = 0.065        # evanescent model prefactor
//! damping_m = 4.9e-6
//! # coupling_constant_per_m = 400.0   # replaces the evanescent model
//! # qpm_period_m = 1.835e-5           # or fit it:
//! fit_qpm = { signal_nm = 1549.8, idler_nm = 1549.8, pump_nm = 774.9 }
//!
//! [geometry]
//! length_m = 0.04
//! channel_count = 41
//!
//! [pump]
//! wavelength_nm = 774.9
//! fwhm_nm = 0.0796
//! channels = [{ index = 0, re = 1.0, im = 0.0 }]
//! # k_window = { center = 0.0, width = 1.5708, phase = [0.0, 0.0, 0.0] }
//!
//! [grid]
//! lambda_min_nm = 1350.0
//! lambda_max_nm = 1800.0
//! points = 321
//!
//! [filter]
//! signal_nm = [1549.9, 1550.1]
//! idler_nm = [1549.9, 1550.1]
//! ```
//!
//! The default Sellmeier set is the temperature-dependent extraordinary
//! index of congruent lithium niobate from D. H. Jundt, Opt. Lett. 22, 1553
//! (1997).

use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlations::Observable;
use crate::error::{Error, Result};
use crate::jsa::{ArrayGeometry, SpectralFilter};
use crate::material::{
    fit_qpm_period, CouplingModel, MaterialModel, DEFAULT_COUPLING_SCALE, DEFAULT_DAMPING, DEFAULT_TEMPERATURE_C,
    JUNDT_CONGRUENT_EXTRAORDINARY,
};
use crate::pipeline::{GridSpec, Pipeline};
use crate::pump::{PumpSpec, SpatialMode};
use crate::units::nm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    /// Detector resolution applied to spatio-spectral maps (nm FWHM).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothing_nm: Option<f64>,
    pub material: MaterialSection,
    pub geometry: GeometrySection,
    pub pump: PumpSection,
    pub grid: GridSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterSection>,
    pub analysis: AnalysisSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitTarget {
    pub signal_nm: f64,
    pub idler_nm: f64,
    pub pump_nm: f64,
}

impl Default for FitTarget {
    fn default() -> Self {
        Self {
            signal_nm: 1549.8,
            idler_nm: 1549.8,
            pump_nm: 774.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialSection {
    pub sellmeier: [f64; 10],
    pub temperature_c: f64,
    pub index_offset: f64,
    pub coupling_scale: f64,
    pub damping_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_constant_per_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qpm_period_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_qpm: Option<FitTarget>,
}

impl Default for MaterialSection {
    fn default() -> Self {
        Self {
            sellmeier: JUNDT_CONGRUENT_EXTRAORDINARY,
            temperature_c: DEFAULT_TEMPERATURE_C,
            index_offset: 0.0,
            coupling_scale: DEFAULT_COUPLING_SCALE,
            damping_m: DEFAULT_DAMPING,
            coupling_constant_per_m: None,
            qpm_period_m: None,
            fit_qpm: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub length_m: f64,
    pub channel_count: usize,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            length_m: 0.04,
            channel_count: 41,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelAmplitude {
    pub index: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KWindowSection {
    #[serde(default)]
    pub center: f64,
    pub width: f64,
    #[serde(default)]
    pub phase: [f64; 3],
}

/// Default pump bandwidth: 0.5/(2π) nm intensity FWHM.
pub fn default_pump_fwhm_nm() -> f64 {
    0.5 / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpSection {
    pub wavelength_nm: f64,
    pub fwhm_nm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channels: Option<Vec<ChannelAmplitude>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_window: Option<KWindowSection>,
    /// Pump wavelengths for sweep scenarios.
    pub sweep_nm: Vec<f64>,
}

impl Default for PumpSection {
    fn default() -> Self {
        Self {
            wavelength_nm: 774.9,
            fwhm_nm: default_pump_fwhm_nm(),
            channels: None,
            k_window: None,
            sweep_nm: vec![774.9, 774.5, 774.2, 773.9],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub lambda_min_nm: f64,
    pub lambda_max_nm: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            lambda_min_nm: 1350.0,
            lambda_max_nm: 1800.0,
            points: 321,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSection {
    pub signal_nm: [f64; 2],
    pub idler_nm: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    /// Spectrum used for branch peaks and widths.
    pub observable: Observable,
    /// Fraction of the peak counted as "lit" in spatio-spectral maps.
    pub map_threshold: f64,
    /// Fraction of the central channel counted in band marginals.
    pub marginal_threshold: f64,
    pub upper_band_nm: [f64; 2],
    pub lower_band_nm: [f64; 2],
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            observable: Observable::ChannelIntegrated,
            map_threshold: 0.05,
            marginal_threshold: 0.1,
            upper_band_nm: [1550.0, 1750.0],
            lower_band_nm: [1350.0, 1550.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub csv: bool,
    pub images: bool,
    pub tensor: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            csv: true,
            images: true,
            tensor: false,
        }
    }
}

fn section<T>(name: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Config(msg) => Error::Config(msg),
        other => Error::Config(format!("[{name}] {other}")),
    })
}

impl RunConfig {
    pub fn material_model(&self) -> Result<MaterialModel> {
        let m = &self.material;
        section(
            "material",
            (|| {
                let coupling = match m.coupling_constant_per_m {
                    Some(c0) => CouplingModel::Constant(c0),
                    None => CouplingModel::Evanescent {
                        scale: m.coupling_scale,
                        damping: m.damping_m,
                    },
                };
                let mut model = MaterialModel::new(m.sellmeier, m.temperature_c, 1.0, coupling)?;
                model.index_offset = m.index_offset;
                match (m.qpm_period_m, m.fit_qpm) {
                    (Some(_), Some(_)) => Err(Error::Config(
                        "[material] give either qpm_period_m or fit_qpm, not both".into(),
                    )),
                    (Some(period), None) => model.with_qpm_period(period),
                    (None, fit) => {
                        let t = fit.unwrap_or_default();
                        let period = fit_qpm_period((nm(t.signal_nm), nm(t.idler_nm)), nm(t.pump_nm), &model)?;
                        model.with_qpm_period(period)
                    }
                }
            })(),
        )
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        section(
            "geometry",
            ArrayGeometry::new(self.geometry.length_m, self.geometry.channel_count),
        )
    }

    pub fn pump_spec(&self) -> Result<PumpSpec> {
        let p = &self.pump;
        section(
            "pump",
            (|| {
                let spatial = match (&p.channels, &p.k_window) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Config(
                            "[pump] give either channels or k_window, not both".into(),
                        ))
                    }
                    (None, Some(w)) => SpatialMode::KWindow {
                        center: w.center,
                        width: w.width,
                        phase: w.phase,
                    },
                    (Some(list), None) => {
                        SpatialMode::PerChannel(list.iter().map(|c| (c.index, Complex64::new(c.re, c.im))).collect())
                    }
                    (None, None) => SpatialMode::single_channel(0),
                };
                let spec = PumpSpec::new(nm(p.wavelength_nm), nm(p.fwhm_nm), spatial)?;
                spec.check_channels(self.geometry.channel_count)?;
                if p.sweep_nm.iter().any(|w| !(*w > 0.0)) {
                    return Err(Error::invalid("sweep_nm", "wavelengths must be positive"));
                }
                Ok(spec)
            })(),
        )
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = &self.grid;
        if !(g.lambda_min_nm > 0.0 && g.lambda_min_nm < g.lambda_max_nm) {
            return Err(Error::Config("[grid] need 0 < lambda_min_nm < lambda_max_nm".into()));
        }
        if g.points < 3 {
            return Err(Error::Config(format!("[grid] points must be >= 3, got {}", g.points)));
        }
        Ok(GridSpec {
            lambda_min: nm(g.lambda_min_nm),
            lambda_max: nm(g.lambda_max_nm),
            points: g.points,
        })
    }

    pub fn spectral_filter(&self) -> Result<Option<SpectralFilter>> {
        self.filter
            .map(|f| {
                section(
                    "filter",
                    SpectralFilter::from_wavelengths(
                        (nm(f.signal_nm[0]), nm(f.signal_nm[1])),
                        (nm(f.idler_nm[0]), nm(f.idler_nm[1])),
                    ),
                )
            })
            .transpose()
    }

    pub fn pipeline(&self) -> Result<Pipeline> {
        Ok(Pipeline {
            material: self.material_model()?,
            geometry: self.geometry()?,
            pump: self.pump_spec()?,
            grid: self.grid_spec()?,
            filter: self.spectral_filter()?,
        })
    }

    /// Checks every section; used after parsing and after overrides.
    pub fn validate(&self) -> Result<()> {
        if let Some(name) = &self.scenario {
            crate::scenarios::check_scenario_name(name)?;
        }
        self.pipeline()?;
        if let Some(s) = self.smoothing_nm {
            if !(s > 0.0) {
                return Err(Error::Config(format!("smoothing_nm must be positive, got {s}")));
            }
        }
        let a = &self.analysis;
        for (name, t) in [
            ("map_threshold", a.map_threshold),
            ("marginal_threshold", a.marginal_threshold),
        ] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Config(format!("[analysis] {name} must lie in (0, 1), got {t}")));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialise configuration: {e}")))
    }

    /// Applies `key.path=value` where `value` is a TOML literal; bare words
    /// are taken as strings.
    pub fn with_override(&self, assignment: &str) -> Result<Self> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{assignment}` is not of the form key=value")))?;
        let key = key.trim();
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_string()));
        let mut root =
            toml::Value::try_from(self).map_err(|e| Error::Config(format!("cannot serialise configuration: {e}")))?;
        let parts: Vec<&str> = key.split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::Config(format!("override key `{key}` is malformed")));
        }
        let mut node = &mut root;
        for part in &parts[..parts.len() - 1] {
            let table = node
                .as_table_mut()
                .ok_or_else(|| Error::Config(format!("override key `{key}`: `{part}` is not a section")))?;
            node = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        }
        node.as_table_mut()
            .ok_or_else(|| Error::Config(format!("override key `{key}` does not name a section entry")))?
            .insert(parts[parts.len() - 1].to_string(), value);
        let text = toml::to_string(&root).map_err(|e| Error::Config(e.to_string()))?;
        parse_config(&text).map_err(|e| match e {
            Error::Config(message) => Error::Config(format!("override `{assignment}`: {message}")),
            other => other,
        })
    }

    /// Lays a TOML fragment over this configuration: tables merge key by
    /// key, any other value present in the fragment replaces the old one.
    pub fn overlay(&self, text: &str) -> Result<Self> {
        toml::from_str::<RunConfig>(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        let fragment: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut root =
            toml::Table::try_from(self).map_err(|e| Error::Config(format!("cannot serialise configuration: {e}")))?;
        merge(&mut root, fragment);
        let text = toml::to_string(&root).map_err(|e| Error::Config(e.to_string()))?;
        parse_config(&text)
    }
}

fn merge(into: &mut toml::Table, from: toml::Table) {
    for (key, value) in from {
        match (into.get_mut(&key), value) {
            (Some(toml::Value::Table(old)), toml::Value::Table(new)) => merge(old, new),
            (_, value) => {
                into.insert(key, value);
            }
        }
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
    config.validate()?;
    Ok(config)
}
