//! Two-photon correlation maps in momentum and channel space, single-photon
//! spatio-spectral intensity, marginals, detector smoothing and the
//! phase-matching curve.
//!
//! Correlation maps are probabilities per grid cell: with the coincidence
//! factor left out, a normalised state sums to one in either basis.

use std::ops::AddAssign;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{find_branches, Branches};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::jsa::{JsaTensor, SlabTensor};
use crate::pipeline::Pipeline;
use crate::transform::ChannelTransform;
use crate::units::wavelength_from_omega;

/// Weight of coincidences where both photons share frequency and mode.
pub const COINCIDENCE_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMaps {
    /// Row-major over `(ks, ki)`.
    pub gamma_k: Vec<f64>,
    /// Row-major over `(ns, ni)` in channel-label order.
    pub gamma_n: Vec<f64>,
    /// Phase of the frequency-summed momentum amplitude.
    pub phase_k: Vec<f64>,
    pub grid: Grid,
    pub channel_axis: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatioSpectralMap {
    /// Row-major over `(channel, wavelength)`: mean photon number per channel
    /// and wavelength bin; sums to 2 for a normalised pair state.
    pub intensity: Vec<f64>,
    /// Strictly increasing, m.
    pub wavelength_axis: Vec<f64>,
    pub channel_axis: Vec<i64>,
}

impl SpatioSpectralMap {
    fn width(&self) -> usize {
        self.wavelength_axis.len()
    }

    fn row_index(&self, channel: i64) -> Option<usize> {
        self.channel_axis.iter().position(|&c| c == channel)
    }

    pub fn row(&self, index: usize) -> &[f64] {
        let w = self.width();
        &self.intensity[index * w..(index + 1) * w]
    }

    pub fn total(&self) -> f64 {
        self.intensity.iter().sum()
    }

    /// Spectrum summed over all channels.
    pub fn channel_integrated(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.width()];
        for r in 0..self.channel_axis.len() {
            for (o, v) in out.iter_mut().zip(self.row(r)) {
                *o += v;
            }
        }
        out
    }

    /// Intensity per channel summed over all wavelengths.
    pub fn channel_totals(&self) -> Vec<f64> {
        (0..self.channel_axis.len()).map(|r| self.row(r).iter().sum()).collect()
    }
}

/// Which one-dimensional spectrum represents a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    CentralChannel,
    #[default]
    ChannelIntegrated,
}

impl Observable {
    pub fn spectrum(self, map: &SpatioSpectralMap) -> Result<Vec<f64>> {
        match self {
            Observable::CentralChannel => spectral_marginal(map, 0),
            Observable::ChannelIntegrated => Ok(map.channel_integrated()),
        }
    }
}

/// Sums per-slab contributions with a fixed order: slabs of one signal row
/// in sequence, then rows in sequence.
fn reduce_by_row<T, F>(jsa: &JsaTensor, len: usize, per_slab: F) -> Vec<T>
where
    T: Copy + Default + AddAssign + Send,
    F: Fn(usize, usize, &[Complex64], &mut [T]) + Sync,
{
    let values = jsa.values();
    let [ms, mi, ..] = values.dims();
    let rows: Vec<Option<Vec<T>>> = (0..ms)
        .into_par_iter()
        .map(|is| {
            let mut acc: Option<Vec<T>> = None;
            for ii in 0..mi {
                if let Some(slab) = values.slab(is, ii) {
                    let buf = acc.get_or_insert_with(|| vec![T::default(); len]);
                    per_slab(is, ii, slab, buf);
                }
            }
            acc
        })
        .collect();
    let mut total = vec![T::default(); len];
    for row in rows.into_iter().flatten() {
        for (t, v) in total.iter_mut().zip(row) {
            *t += v;
        }
    }
    total
}

/// Pointwise `|f|²`, weighted by the coincidence factor where both the
/// frequency indices and the momentum indices coincide.
pub fn gamma_k_omega(jsa: &JsaTensor) -> Result<SlabTensor<f64>> {
    jsa.require_normalized()?;
    let values = jsa.values();
    let n = values.grid().channel_count();
    let [ms, mi, ..] = values.dims();
    let slabs = (0..ms * mi)
        .into_par_iter()
        .map(|idx| {
            let (is, ii) = (idx / mi, idx % mi);
            values.slab(is, ii).map(|s| {
                s.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let w = v.norm_sqr();
                        if is == ii && j / n == j % n {
                            COINCIDENCE_FACTOR * w
                        } else {
                            w
                        }
                    })
                    .collect::<Vec<_>>()
                    .into_boxed_slice()
            })
        })
        .collect();
    SlabTensor::from_slabs(values.grid().clone(), slabs)
}

/// Momentum correlation traced over frequency, with a configurable
/// coincidence weight (`1.0` gives the plain probability map).
pub fn gamma_k_weighted(jsa: &JsaTensor, coincidence: f64) -> Result<Vec<f64>> {
    jsa.require_normalized()?;
    let n = jsa.grid().channel_count();
    let mut out = reduce_by_row(jsa, n * n, |is, ii, slab, acc: &mut [f64]| {
        for (j, (a, v)) in acc.iter_mut().zip(slab).enumerate() {
            let w = v.norm_sqr();
            *a += if is == ii && j / n == j % n { coincidence * w } else { w };
        }
    });
    let measure = jsa.grid().cell_measure();
    out.iter_mut().for_each(|v| *v *= measure);
    Ok(out)
}

pub fn gamma_k(jsa: &JsaTensor) -> Result<Vec<f64>> {
    gamma_k_weighted(jsa, COINCIDENCE_FACTOR)
}

/// Channel correlation traced over frequency; see [`gamma_k_weighted`].
pub fn gamma_n_weighted(jsa: &JsaTensor, coincidence: f64) -> Result<Vec<f64>> {
    jsa.require_normalized()?;
    let n = jsa.grid().channel_count();
    let transform = ChannelTransform::new(n);
    let mut out = reduce_by_row(jsa, n * n, |is, ii, slab, acc: &mut [f64]| {
        let psi = transform.to_channels(slab);
        for (j, (a, v)) in acc.iter_mut().zip(&psi).enumerate() {
            let w = v.norm_sqr();
            *a += if is == ii && j / n == j % n { coincidence * w } else { w };
        }
    });
    let measure = jsa.grid().cell_measure();
    out.iter_mut().for_each(|v| *v *= measure);
    Ok(out)
}

pub fn gamma_n(jsa: &JsaTensor) -> Result<Vec<f64>> {
    gamma_n_weighted(jsa, COINCIDENCE_FACTOR)
}

/// Channel-space amplitude of one `(ωs, ωi)` slab, unitary transform of the
/// momentum block. Zero for slabs that are not stored.
pub fn channel_amplitude(jsa: &JsaTensor, is: usize, ii: usize) -> Result<Vec<Complex64>> {
    let [ms, mi, n, _] = jsa.values().dims();
    if is >= ms || ii >= mi {
        return Err(Error::Precondition(format!(
            "slab ({is}, {ii}) outside a {ms}×{mi} grid"
        )));
    }
    Ok(match jsa.values().slab(is, ii) {
        Some(slab) => ChannelTransform::new(n).to_channels(slab),
        None => vec![Complex64::new(0.0, 0.0); n * n],
    })
}

/// Fixed-frequency channel correlation `|ψ|²`, coincidence-weighted on the
/// channel diagonal when `is == ii`.
pub fn gamma_n_slice(jsa: &JsaTensor, is: usize, ii: usize) -> Result<Vec<f64>> {
    jsa.require_normalized()?;
    let n = jsa.grid().channel_count();
    let psi = channel_amplitude(jsa, is, ii)?;
    Ok(psi
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let w = v.norm_sqr();
            if is == ii && j / n == j % n {
                COINCIDENCE_FACTOR * w
            } else {
                w
            }
        })
        .collect())
}

pub fn phase_k(jsa: &JsaTensor) -> Result<Vec<f64>> {
    jsa.require_normalized()?;
    let n = jsa.grid().channel_count();
    let sum = reduce_by_row(jsa, n * n, |_, _, slab, acc: &mut [Complex64]| {
        for (a, v) in acc.iter_mut().zip(slab) {
            *a += v;
        }
    });
    Ok(sum.iter().map(|v| v.arg()).collect())
}

pub fn correlation_maps(jsa: &JsaTensor) -> Result<CorrelationMaps> {
    Ok(CorrelationMaps {
        gamma_k: gamma_k(jsa)?,
        gamma_n: gamma_n(jsa)?,
        phase_k: phase_k(jsa)?,
        grid: jsa.grid().clone(),
        channel_axis: jsa.grid().channels(),
    })
}

/// Single-photon intensity per channel and wavelength. Both photons
/// contribute; the partner's channel and frequency are traced out.
pub fn spatio_spectral_intensity(jsa: &JsaTensor) -> Result<SpatioSpectralMap> {
    jsa.require_normalized()?;
    let grid = jsa.grid();
    if !grid.is_symmetric() {
        return Err(Error::Contract(
            "spatio-spectral map needs identical signal and idler axes".into(),
        ));
    }
    let n = grid.channel_count();
    let m = grid.omega_s().len();
    let transform = ChannelTransform::new(n);
    let mut by_omega = reduce_by_row(jsa, n * m, |is, ii, slab, acc: &mut [f64]| {
        let psi = transform.to_channels(slab);
        for a in 0..n {
            for b in 0..n {
                let p = psi[a * n + b].norm_sqr();
                acc[a * m + is] += p;
                acc[b * m + ii] += p;
            }
        }
    });
    let measure = grid.cell_measure();
    by_omega.iter_mut().for_each(|v| *v *= measure);
    let mut intensity = vec![0.0; n * m];
    for a in 0..n {
        for j in 0..m {
            intensity[a * m + j] = by_omega[a * m + (m - 1 - j)];
        }
    }
    let wavelength_axis = grid.omega_s().iter().rev().map(|&w| wavelength_from_omega(w)).collect();
    Ok(SpatioSpectralMap {
        intensity,
        wavelength_axis,
        channel_axis: grid.channels(),
    })
}

pub fn spectral_marginal(map: &SpatioSpectralMap, channel: i64) -> Result<Vec<f64>> {
    let row = map
        .row_index(channel)
        .ok_or_else(|| Error::Precondition(format!("channel {channel} is not on the map")))?;
    Ok(map.row(row).to_vec())
}

/// Channel profile integrated over `band` (m), scaled so that channel 0 is 1.
pub fn spatial_marginal(map: &SpatioSpectralMap, band: (f64, f64)) -> Result<Vec<f64>> {
    let (lo, hi) = band;
    let cols: Vec<usize> = map
        .wavelength_axis
        .iter()
        .enumerate()
        .filter(|(_, &l)| l >= lo && l <= hi)
        .map(|(j, _)| j)
        .collect();
    if cols.is_empty() {
        return Err(Error::Precondition(format!(
            "band ({lo:e}, {hi:e}) m contains no wavelength samples"
        )));
    }
    let profile: Vec<f64> = (0..map.channel_axis.len())
        .map(|r| {
            let row = map.row(r);
            cols.iter().map(|&j| row[j]).sum()
        })
        .collect();
    let center = map
        .row_index(0)
        .map(|r| profile[r])
        .ok_or_else(|| Error::Precondition("map has no central channel".into()))?;
    if !(center > 0.0) {
        return Err(Error::EmptyState(
            "central channel carries no intensity in the band".into(),
        ));
    }
    Ok(profile.iter().map(|v| v / center).collect())
}

/// Gaussian detector response along wavelength with intensity FWHM
/// `resolution_fwhm` (m). Each sample's weight is redistributed with
/// weights summing to one, so the total is preserved on any axis spacing.
pub fn smooth_spectral(map: &SpatioSpectralMap, resolution_fwhm: f64) -> Result<SpatioSpectralMap> {
    if !(resolution_fwhm > 0.0 && resolution_fwhm.is_finite()) {
        return Err(Error::Precondition(format!(
            "resolution must be positive, got {resolution_fwhm}"
        )));
    }
    let axis = &map.wavelength_axis;
    let w = axis.len();
    let scale = 4.0 * std::f64::consts::LN_2 / (resolution_fwhm * resolution_fwhm);
    let kernels: Vec<Vec<f64>> = axis
        .iter()
        .map(|&src| {
            let raw: Vec<f64> = axis.iter().map(|&dst| (-scale * (dst - src).powi(2)).exp()).collect();
            let norm: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / norm).collect()
        })
        .collect();
    let mut intensity = vec![0.0; map.intensity.len()];
    for r in 0..map.channel_axis.len() {
        let row = map.row(r);
        let out = &mut intensity[r * w..(r + 1) * w];
        for (src, &v) in row.iter().enumerate() {
            if v != 0.0 {
                for (o, k) in out.iter_mut().zip(&kernels[src]) {
                    *o += v * k;
                }
            }
        }
    }
    Ok(SpatioSpectralMap {
        intensity,
        wavelength_axis: map.wavelength_axis.clone(),
        channel_axis: map.channel_axis.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmPoint {
    pub pump_wavelength: f64,
    pub branches: Branches,
}

/// Runs the pipeline at each pump wavelength and locates the branch peaks of
/// the chosen spectrum, split at twice the pump wavelength. A state that
/// vanishes (e.g. filtered away) yields a missing branch.
pub fn phase_matching_curve(
    pump_wavelengths: &[f64],
    pipeline: &Pipeline,
    observable: Observable,
) -> Result<Vec<PmPoint>> {
    pump_wavelengths
        .par_iter()
        .map(|&lp| {
            let setup = pipeline.with_pump_wavelength(lp)?;
            let state = match setup.state() {
                Ok(s) => s,
                Err(Error::EmptyState(_)) => {
                    return Ok(PmPoint {
                        pump_wavelength: lp,
                        branches: Branches::Missing,
                    })
                }
                Err(e) => return Err(e),
            };
            let map = spatio_spectral_intensity(&state)?;
            let spectrum = observable.spectrum(&map)?;
            Ok(PmPoint {
                pump_wavelength: lp,
                branches: find_branches(&map.wavelength_axis, &spectrum, 2.0 * lp),
            })
        })
        .collect()
}
