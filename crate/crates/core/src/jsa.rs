//! Joint spatio-spectral amplitude `f(ωs, ωi, ks, ki)` of the down-converted
//! pair, its spectral filtering and normalisation.
//!
//! The tensor is stored as `(ωs, ωi)` slabs of `N×N` momentum blocks. Slabs
//! whose pump amplitude `α(ωs+ωi)` is below `1e-12` of its peak are not
//! stored and read back as exact zeros.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::material::MaterialModel;
use crate::pump::PumpSpec;
use crate::units::omega_from_wavelength;

/// Relative pump amplitude below which a slab is dropped.
pub const SLAB_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    /// Crystal length L (m).
    pub length: f64,
    pub channel_count: usize,
}

impl ArrayGeometry {
    pub fn new(length: f64, channel_count: usize) -> Result<Self> {
        let g = Self { length, channel_count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::invalid(
                "length_m",
                format!("must be positive, got {}", self.length),
            ));
        }
        if self.channel_count < 3 {
            return Err(Error::invalid(
                "channel_count",
                format!("must be >= 3, got {}", self.channel_count),
            ));
        }
        Ok(())
    }
}

/// Block-sparse 4D array over `(ωs, ωi, ks, ki)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabTensor<T> {
    grid: Grid,
    slabs: Vec<Option<Box<[T]>>>,
}

impl<T: Copy + Default + Send + Sync> SlabTensor<T> {
    pub fn from_slabs(grid: Grid, slabs: Vec<Option<Box<[T]>>>) -> Result<Self> {
        let expected = grid.omega_s().len() * grid.omega_i().len();
        let block = grid.channel_count().pow(2);
        if slabs.len() != expected {
            return Err(Error::Contract(format!(
                "{} slabs for a grid of {expected}",
                slabs.len()
            )));
        }
        if slabs.iter().flatten().any(|s| s.len() != block) {
            return Err(Error::Contract(format!("slab size differs from {block}")));
        }
        Ok(Self { grid, slabs })
    }

    /// Builds a tensor from a dense row-major `(ωs, ωi, ks, ki)` array,
    /// storing every slab.
    pub fn from_dense(grid: Grid, values: &[T]) -> Result<Self> {
        let block = grid.channel_count().pow(2);
        let count = grid.omega_s().len() * grid.omega_i().len();
        if values.len() != count * block {
            return Err(Error::Contract(format!(
                "dense array has {} values, grid needs {}",
                values.len(),
                count * block
            )));
        }
        let slabs = values
            .chunks(block)
            .map(|c| Some(c.to_vec().into_boxed_slice()))
            .collect();
        Ok(Self { grid, slabs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> [usize; 4] {
        let n = self.grid.channel_count();
        [self.grid.omega_s().len(), self.grid.omega_i().len(), n, n]
    }

    fn slab_index(&self, is: usize, ii: usize) -> usize {
        is * self.grid.omega_i().len() + ii
    }

    pub fn slab(&self, is: usize, ii: usize) -> Option<&[T]> {
        self.slabs[self.slab_index(is, ii)].as_deref()
    }

    pub fn get(&self, is: usize, ii: usize, ks: usize, ki: usize) -> T {
        let n = self.grid.channel_count();
        self.slab(is, ii).map_or_else(T::default, |s| s[ks * n + ki])
    }

    pub fn stored_slabs(&self) -> usize {
        self.slabs.iter().filter(|s| s.is_some()).count()
    }

    /// Stored slabs in row-major `(ωs, ωi)` order.
    pub fn iter_slabs(&self) -> impl Iterator<Item = (usize, usize, &[T])> + '_ {
        let mi = self.grid.omega_i().len();
        self.slabs
            .iter()
            .enumerate()
            .filter_map(move |(idx, s)| s.as_deref().map(|s| (idx / mi, idx % mi, s)))
    }

    pub(crate) fn par_slabs(&self) -> impl IndexedParallelIterator<Item = (usize, usize, Option<&[T]>)> + '_ {
        let mi = self.grid.omega_i().len();
        self.slabs
            .par_iter()
            .enumerate()
            .map(move |(idx, s)| (idx / mi, idx % mi, s.as_deref()))
    }

    pub fn to_dense(&self) -> Vec<T> {
        let block = self.grid.channel_count().pow(2);
        let mut out = Vec::with_capacity(self.slabs.len() * block);
        for s in &self.slabs {
            match s {
                Some(s) => out.extend_from_slice(s),
                None => out.extend(std::iter::repeat_n(T::default(), block)),
            }
        }
        out
    }

    pub(crate) fn slabs_mut(&mut self) -> &mut [Option<Box<[T]>>] {
        &mut self.slabs
    }
}

/// The amplitude tensor plus its normalisation state.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaTensor {
    values: SlabTensor<Complex64>,
    normalized: bool,
}

impl JsaTensor {
    pub fn new(values: SlabTensor<Complex64>) -> Self {
        Self {
            values,
            normalized: false,
        }
    }

    pub fn from_dense(grid: Grid, values: &[Complex64]) -> Result<Self> {
        Ok(Self::new(SlabTensor::from_dense(grid, values)?))
    }

    pub fn values(&self) -> &SlabTensor<Complex64> {
        &self.values
    }

    pub fn grid(&self) -> &Grid {
        self.values.grid()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn get(&self, is: usize, ii: usize, ks: usize, ki: usize) -> Complex64 {
        self.values.get(is, ii, ks, ki)
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        self.values.to_dense()
    }

    /// `Σ|f|²` times the cell measure, summed slab by slab in storage order.
    pub fn power(&self) -> f64 {
        let per_slab: Vec<f64> = self
            .values
            .par_slabs()
            .map(|(_, _, s)| s.map_or(0.0, |s| s.iter().map(|v| v.norm_sqr()).sum()))
            .collect();
        per_slab.iter().sum::<f64>() * self.grid().cell_measure()
    }

    /// Multiplies every entry by `factor`; the result is unnormalised.
    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.values
            .slabs_mut()
            .par_iter_mut()
            .flatten()
            .for_each(|s| s.iter_mut().for_each(|v| *v *= factor));
        self.normalized = false;
        self
    }

    pub(crate) fn with_normalized_flag(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::Contract("amplitude tensor must be normalised first".into()))
        }
    }
}

/// Array-induced mismatch `−2C(ωs)cos ks − 2C(ωi)cos ki`.
pub fn delta_beta_a(ks: f64, ki: f64, omega_s: f64, omega_i: f64, model: &MaterialModel) -> Result<f64> {
    if !(ks.is_finite() && ki.is_finite()) {
        return Err(Error::Precondition("momenta must be finite".into()));
    }
    let cs = model.coupling_at_omega(omega_s)?;
    let ci = model.coupling_at_omega(omega_i)?;
    Ok(-2.0 * cs * ks.cos() + -2.0 * ci * ki.cos())
}

/// `sinc(LΔβ/2)·exp(−iΔβL/2)`, the normalised longitudinal overlap.
pub fn phase_match_factor(delta_beta: f64, length: f64) -> Complex64 {
    let x = 0.5 * length * delta_beta;
    let sinc = if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    };
    Complex64::from_polar(sinc, -x)
}

/// Evaluates the unnormalised amplitude on `grid`.
pub fn build_jsa(grid: &Grid, geometry: &ArrayGeometry, pump: &PumpSpec, model: &MaterialModel) -> Result<JsaTensor> {
    geometry.validate()?;
    if grid.channel_count() != geometry.channel_count {
        return Err(Error::Config(format!(
            "grid has {} momenta but the array has {} channels",
            grid.channel_count(),
            geometry.channel_count
        )));
    }
    pump.check_channels(geometry.channel_count)?;
    grid.check_against(model)?;

    let n = grid.channel_count();
    let k = grid.k();
    let array_terms = |axis: &[f64]| -> Result<Vec<Vec<f64>>> {
        axis.iter()
            .map(|&w| {
                let c = model.coupling_at_omega(w)?;
                Ok(k.iter().map(|kj| -2.0 * c * kj.cos()).collect())
            })
            .collect()
    };
    let terms_s = array_terms(grid.omega_s())?;
    let terms_i = array_terms(grid.omega_i())?;
    let bloch: Vec<Complex64> = (0..n * n)
        .map(|idx| pump.bloch_amplitude(k[idx / n] + k[idx % n]))
        .collect();

    let length = geometry.length;
    let mi = grid.omega_i().len();
    let slabs = (0..grid.omega_s().len() * mi)
        .into_par_iter()
        .map(|idx| -> Result<Option<Box<[Complex64]>>> {
            let (is, ii) = (idx / mi, idx % mi);
            let (ws, wi) = (grid.omega_s()[is], grid.omega_i()[ii]);
            let alpha = pump.spectral_amplitude(ws + wi);
            if alpha < SLAB_CUTOFF {
                return Ok(None);
            }
            let spectral = model.delta_beta_omega(ws, wi)?;
            let (ts, ti) = (&terms_s[is], &terms_i[ii]);
            let mut slab = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    let delta = spectral + (ts[a] + ti[b]);
                    slab.push(bloch[a * n + b] * alpha * phase_match_factor(delta, length));
                }
            }
            Ok(Some(slab.into_boxed_slice()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JsaTensor::new(SlabTensor::from_slabs(grid.clone(), slabs)?))
}

/// Rectangular pass band in angular frequency for each photon (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFilter {
    pub signal: (f64, f64),
    pub idler: (f64, f64),
}

impl SpectralFilter {
    pub fn new(signal: (f64, f64), idler: (f64, f64)) -> Result<Self> {
        for (name, (lo, hi)) in [("signal", signal), ("idler", idler)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Precondition(format!(
                    "{name} filter bounds ({lo}, {hi}) are not ordered"
                )));
            }
        }
        Ok(Self { signal, idler })
    }

    /// Pass bands given as wavelength intervals (m).
    pub fn from_wavelengths(signal: (f64, f64), idler: (f64, f64)) -> Result<Self> {
        for (name, (lo, hi)) in [("signal", signal), ("idler", idler)] {
            if !(lo > 0.0 && lo <= hi) {
                return Err(Error::Precondition(format!(
                    "{name} filter bounds ({lo}, {hi}) are not ordered"
                )));
            }
        }
        let to_omega = |(lo, hi): (f64, f64)| (omega_from_wavelength(hi), omega_from_wavelength(lo));
        Self::new(to_omega(signal), to_omega(idler))
    }

    pub fn passes(&self, omega_s: f64, omega_i: f64) -> bool {
        omega_s >= self.signal.0 && omega_s <= self.signal.1 && omega_i >= self.idler.0 && omega_i <= self.idler.1
    }
}

/// Zeroes everything outside `filter` and renormalises.
pub fn apply_spectral_filter(jsa: JsaTensor, filter: &SpectralFilter) -> Result<JsaTensor> {
    let mut values = jsa.values;
    let grid = values.grid().clone();
    let mi = grid.omega_i().len();
    for (idx, slab) in values.slabs_mut().iter_mut().enumerate() {
        if !filter.passes(grid.omega_s()[idx / mi], grid.omega_i()[idx % mi]) {
            *slab = None;
        }
    }
    normalize(JsaTensor::new(values)).map_err(|e| match e {
        Error::EmptyState(_) => Error::EmptyState("spectral filter removes the entire state".into()),
        other => other,
    })
}

/// Scales the tensor to unit power.
pub fn normalize(jsa: JsaTensor) -> Result<JsaTensor> {
    let power = jsa.power();
    if !power.is_finite() {
        return Err(Error::Contract(format!("tensor power is {power}")));
    }
    if power <= 0.0 {
        return Err(Error::EmptyState("tensor carries no amplitude".into()));
    }
    let mut out = jsa.scaled(Complex64::new(power.sqrt().recip(), 0.0));
    out.normalized = true;
    Ok(out)
}
