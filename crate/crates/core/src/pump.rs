//! Pump description: a Gaussian spectral envelope and a transverse profile
//! given either per channel or directly as a window in Bloch momentum.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{wrap_to_zone, Grid};
use crate::units::{omega_from_wavelength, wavelength_from_omega, SPEED_OF_LIGHT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpatialMode {
    /// Complex amplitude `A(n)` for each pumped channel label `n`.
    PerChannel(Vec<(i64, Complex64)>),
    /// Flat window of `width` rad centred on `center`, carrying the phase
    /// `phase[0] + phase[1]·k + phase[2]·k²`.
    KWindow { center: f64, width: f64, phase: [f64; 3] },
}

impl SpatialMode {
    pub fn single_channel(channel: i64) -> Self {
        SpatialMode::PerChannel(vec![(channel, Complex64::new(1.0, 0.0))])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpSpec {
    central_wavelength: f64,
    spectral_fwhm: f64,
    spatial: SpatialMode,
    /// Factor making ∫|Ã(k)|² dk over the zone equal to one.
    bloch_norm: f64,
}

impl PumpSpec {
    /// `spectral_fwhm` is the intensity FWHM in wavelength (m).
    pub fn new(central_wavelength: f64, spectral_fwhm: f64, spatial: SpatialMode) -> Result<Self> {
        if !(central_wavelength > 0.0 && central_wavelength.is_finite()) {
            return Err(Error::invalid(
                "pump.wavelength",
                format!("must be positive, got {central_wavelength}"),
            ));
        }
        if !(spectral_fwhm > 0.0 && spectral_fwhm.is_finite()) {
            return Err(Error::invalid(
                "pump.fwhm",
                format!("must be positive, got {spectral_fwhm}"),
            ));
        }
        let bloch_norm = match &spatial {
            SpatialMode::PerChannel(amps) => {
                if amps.is_empty() {
                    return Err(Error::DegenerateInput("pump has no channels".into()));
                }
                let mut seen = std::collections::BTreeSet::new();
                for (n, a) in amps {
                    if !seen.insert(*n) {
                        return Err(Error::invalid("pump.channels", format!("channel {n} listed twice")));
                    }
                    if !(a.re.is_finite() && a.im.is_finite()) {
                        return Err(Error::invalid(
                            "pump.channels",
                            format!("amplitude of channel {n} is not finite"),
                        ));
                    }
                }
                let power: f64 = amps.iter().map(|(_, a)| a.norm_sqr()).sum();
                if power == 0.0 {
                    return Err(Error::DegenerateInput("all pump channel amplitudes are zero".into()));
                }
                // Parseval for the 1/2π Fourier series: ∫|Ã|² dk = Σ|A|²/2π.
                (2.0 * PI / power).sqrt()
            }
            SpatialMode::KWindow { center, width, phase } => {
                if !(*width > 0.0 && *width <= 2.0 * PI) {
                    return Err(Error::invalid(
                        "pump.k_window.width",
                        format!("must lie in (0, 2π], got {width}"),
                    ));
                }
                if !center.is_finite() || phase.iter().any(|c| !c.is_finite()) {
                    return Err(Error::invalid("pump.k_window", "center and phase must be finite"));
                }
                1.0 / width.sqrt()
            }
        };
        Ok(Self {
            central_wavelength,
            spectral_fwhm,
            spatial,
            bloch_norm,
        })
    }

    pub fn central_wavelength(&self) -> f64 {
        self.central_wavelength
    }

    pub fn spectral_fwhm(&self) -> f64 {
        self.spectral_fwhm
    }

    pub fn spatial(&self) -> &SpatialMode {
        &self.spatial
    }

    pub fn central_omega(&self) -> f64 {
        omega_from_wavelength(self.central_wavelength)
    }

    /// Same pump at another central wavelength.
    pub fn retuned(&self, central_wavelength: f64) -> Result<Self> {
        Self::new(central_wavelength, self.spectral_fwhm, self.spatial.clone())
    }

    /// Checks channel labels against an `N`-channel array.
    pub fn check_channels(&self, channel_count: usize) -> Result<()> {
        if let SpatialMode::PerChannel(amps) = &self.spatial {
            if amps.len() > channel_count {
                return Err(Error::invalid(
                    "pump.channels",
                    format!("{} entries for a {channel_count}-channel array", amps.len()),
                ));
            }
            let half = ((channel_count - 1) / 2) as i64;
            let lo = -(channel_count as i64 / 2);
            for (n, _) in amps {
                if *n < lo || *n > half {
                    return Err(Error::invalid(
                        "pump.channels",
                        format!("channel {n} outside [{lo}, {half}]"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Linearised amplitude width in angular frequency: the envelope is close
    /// to `exp(−(ω − ωp)²/(2σ²))` near its centre.
    pub fn sigma_omega(&self) -> f64 {
        let fwhm_omega = 2.0 * PI * SPEED_OF_LIGHT * self.spectral_fwhm / self.central_wavelength.powi(2);
        fwhm_omega / (2.0 * LN_2.sqrt())
    }

    /// Spectral amplitude α at the pair frequency `omega_sum`, with peak 1.
    pub fn spectral_amplitude(&self, omega_sum: f64) -> f64 {
        if !(omega_sum > 0.0) {
            return 0.0;
        }
        let d = (wavelength_from_omega(omega_sum) - self.central_wavelength) / self.spectral_fwhm;
        (-2.0 * LN_2 * d * d).exp()
    }

    /// Unit-power Bloch amplitude Ã at an arbitrary momentum.
    pub fn bloch_amplitude(&self, k: f64) -> Complex64 {
        let k = wrap_to_zone(k);
        match &self.spatial {
            SpatialMode::PerChannel(amps) => {
                let sum: Complex64 = amps
                    .iter()
                    .map(|(n, a)| a * Complex64::from_polar(1.0, -k * *n as f64))
                    .sum();
                sum * (self.bloch_norm / (2.0 * PI))
            }
            SpatialMode::KWindow { center, width, phase } => {
                if wrap_to_zone(k - center).abs() <= 0.5 * width {
                    let phi = phase[0] + phase[1] * k + phase[2] * k * k;
                    Complex64::from_polar(self.bloch_norm, phi)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}

/// α(ω_sum) as a complex number (real and positive).
pub fn pump_spectral_amplitude(omega_sum: f64, pump: &PumpSpec) -> Complex64 {
    Complex64::new(pump.spectral_amplitude(omega_sum), 0.0)
}

/// Ã sampled on the grid's momentum axis, normalised so that
/// `Σ|Ã(k_j)|²·δk = 1`.
pub fn pump_bloch_distribution(pump: &PumpSpec, grid: &Grid) -> Result<Vec<Complex64>> {
    pump.check_channels(grid.channel_count())?;
    let mut values: Vec<Complex64> = grid.k().iter().map(|&k| pump.bloch_amplitude(k)).collect();
    let power: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dk();
    if power == 0.0 {
        return Err(Error::DegenerateInput("pump window contains no grid momentum".into()));
    }
    let scale = power.sqrt().recip();
    values.iter_mut().for_each(|v| *v *= scale);
    Ok(values)
}
