//! Lithium niobate dispersion, single-waveguide propagation constants,
//! quasi-phase-matched spectral mismatch and the evanescent coupling model.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{omega_from_wavelength, wavelength_from_omega, SPEED_OF_LIGHT};

/// Temperature-dependent extraordinary-index Sellmeier coefficients for
/// congruent lithium niobate, D. H. Jundt, Opt. Lett. 22, 1553 (1997).
///
/// Order: `a1..a6, b1..b4` in
/// `n² = a1 + b1 f + (a2 + b2 f)/(λ² − (a3 + b3 f)²) + (a4 + b4 f)/(λ² − a5²) − a6 λ²`
/// with `λ` in µm and `f = (T − 24.5)(T + 570.82)`, `T` in °C.
pub const JUNDT_CONGRUENT_EXTRAORDINARY: [f64; 10] = [
    5.35583, 0.100473, 0.20692, 100.0, 11.34927, 1.5334e-2, 4.629e-7, 3.862e-8, -0.89e-8, 2.657e-5,
];

/// Default coupling prefactor 𝒞 (dimensionless) fitted to the 40 mm array.
pub const DEFAULT_COUPLING_SCALE: f64 = 6.5e-2;
/// Default evanescent damping length γ0 (m).
pub const DEFAULT_DAMPING: f64 = 4.9e-6;
/// Default oven temperature (°C).
pub const DEFAULT_TEMPERATURE_C: f64 = 185.0;

/// Wavelength dependence of the nearest-neighbour coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CouplingModel {
    /// `C(λ) = scale · (1/λ) · exp(−damping · n(λ) / λ)`.
    Evanescent { scale: f64, damping: f64 },
    /// Frequency-independent coupling (1/m).
    Constant(f64),
}

impl Default for CouplingModel {
    fn default() -> Self {
        CouplingModel::Evanescent {
            scale: DEFAULT_COUPLING_SCALE,
            damping: DEFAULT_DAMPING,
        }
    }
}

/// Ranges outside which evaluation is refused rather than extrapolated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityWindow {
    pub wavelength_min: f64,
    pub wavelength_max: f64,
    pub temperature_min_c: f64,
    pub temperature_max_c: f64,
}

impl Default for ValidityWindow {
    fn default() -> Self {
        Self {
            wavelength_min: 0.4e-6,
            wavelength_max: 5.0e-6,
            temperature_min_c: 20.0,
            temperature_max_c: 300.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub sellmeier: [f64; 10],
    pub temperature_c: f64,
    /// Effective grating period Λ_eff (m).
    pub qpm_period: f64,
    pub coupling: CouplingModel,
    /// Constant added to the bulk index to form n_eff. Zero by default: modal
    /// dispersion is absorbed into the fitted grating period.
    pub index_offset: f64,
    pub validity: ValidityWindow,
}

impl MaterialModel {
    pub fn new(sellmeier: [f64; 10], temperature_c: f64, qpm_period: f64, coupling: CouplingModel) -> Result<Self> {
        let model = Self {
            sellmeier,
            temperature_c,
            qpm_period,
            coupling,
            index_offset: 0.0,
            validity: ValidityWindow::default(),
        };
        model.validate()?;
        Ok(model)
    }

    /// Congruent LiNbO₃ at `temperature_c` with the default coupling model and
    /// the grating period fitted to the degenerate pair 1549.8 nm / 774.9 nm.
    pub fn congruent_lithium_niobate(temperature_c: f64) -> Result<Self> {
        let mut model = Self::new(
            JUNDT_CONGRUENT_EXTRAORDINARY,
            temperature_c,
            1.0,
            CouplingModel::default(),
        )?;
        model.qpm_period = fit_qpm_period((1549.8e-9, 1549.8e-9), 774.9e-9, &model)?;
        Ok(model)
    }

    pub fn with_coupling(mut self, coupling: CouplingModel) -> Result<Self> {
        self.coupling = coupling;
        self.validate()?;
        Ok(self)
    }

    pub fn with_qpm_period(mut self, qpm_period: f64) -> Result<Self> {
        self.qpm_period = qpm_period;
        self.validate()?;
        Ok(self)
    }

    /// Refit Λ_eff so that the spectral mismatch vanishes at `pair` for `pump`.
    pub fn fitted_to(self, pair: (f64, f64), pump: f64) -> Result<Self> {
        let period = fit_qpm_period(pair, pump, &self)?;
        self.with_qpm_period(period)
    }

    pub fn validate(&self) -> Result<()> {
        let v = &self.validity;
        if !(v.wavelength_min > 0.0 && v.wavelength_min < v.wavelength_max) {
            return Err(Error::invalid("validity", "wavelength window must be 0 < min < max"));
        }
        if !(self.temperature_c >= v.temperature_min_c && self.temperature_c <= v.temperature_max_c) {
            return Err(Error::Domain {
                quantity: "temperature_c",
                value: self.temperature_c,
                min: v.temperature_min_c,
                max: v.temperature_max_c,
            });
        }
        if !(self.qpm_period > 0.0 && self.qpm_period.is_finite()) {
            return Err(Error::invalid(
                "qpm_period_m",
                format!("must be positive and finite, got {}", self.qpm_period),
            ));
        }
        if self.sellmeier.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("sellmeier", "coefficients must be finite"));
        }
        if !self.index_offset.is_finite() {
            return Err(Error::invalid("index_offset", "must be finite"));
        }
        match self.coupling {
            CouplingModel::Evanescent { scale, damping } => {
                if !(scale >= 0.0 && scale.is_finite()) {
                    return Err(Error::invalid("coupling_scale", format!("must be >= 0, got {scale}")));
                }
                if !(damping >= 0.0 && damping.is_finite()) {
                    return Err(Error::invalid("damping_m", format!("must be >= 0, got {damping}")));
                }
            }
            CouplingModel::Constant(c0) => {
                if !(c0 >= 0.0 && c0.is_finite()) {
                    return Err(Error::invalid(
                        "coupling_constant_per_m",
                        format!("must be >= 0, got {c0}"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_wavelength(&self, wavelength: f64) -> Result<()> {
        let v = &self.validity;
        if wavelength >= v.wavelength_min && wavelength <= v.wavelength_max {
            Ok(())
        } else {
            Err(Error::Domain {
                quantity: "wavelength_m",
                value: wavelength,
                min: v.wavelength_min,
                max: v.wavelength_max,
            })
        }
    }

    /// Temperature-corrected extraordinary bulk index n_e(λ, T).
    pub fn refractive_index(&self, wavelength: f64) -> Result<f64> {
        self.check_wavelength(wavelength)?;
        let [a1, a2, a3, a4, a5, a6, b1, b2, b3, b4] = self.sellmeier;
        let t = self.temperature_c;
        let f = (t - 24.5) * (t + 570.82);
        let l2 = (wavelength * 1e6).powi(2);
        let uv = a3 + b3 * f;
        let n2 = a1 + b1 * f + (a2 + b2 * f) / (l2 - uv * uv) + (a4 + b4 * f) / (l2 - a5 * a5) - a6 * l2;
        let n = n2.sqrt();
        if !(n > 1.0 && n.is_finite()) {
            return Err(Error::invalid(
                "sellmeier",
                format!("index {n} at {wavelength:e} m is not a physical value > 1"),
            ));
        }
        Ok(n)
    }

    /// n_eff = bulk index plus the configured modal offset.
    pub fn effective_index(&self, wavelength: f64) -> Result<f64> {
        Ok(self.refractive_index(wavelength)? + self.index_offset)
    }

    /// Single-waveguide propagation constant β⁽⁰⁾(ω) = n_eff ω / c.
    pub fn beta0(&self, omega: f64) -> Result<f64> {
        let n = self.effective_index(wavelength_from_omega(omega))?;
        Ok(n * omega / SPEED_OF_LIGHT)
    }

    /// Nearest-neighbour coupling C(λ) in 1/m.
    pub fn coupling(&self, wavelength: f64) -> Result<f64> {
        match self.coupling {
            CouplingModel::Evanescent { scale, damping } => {
                let n = self.refractive_index(wavelength)?;
                Ok(scale / wavelength * (-damping * n / wavelength).exp())
            }
            CouplingModel::Constant(c0) => {
                self.check_wavelength(wavelength)?;
                Ok(c0)
            }
        }
    }

    pub fn coupling_at_omega(&self, omega: f64) -> Result<f64> {
        self.coupling(wavelength_from_omega(omega))
    }

    /// β⁽⁰⁾(ωs+ωi) − β⁽⁰⁾(ωs) − β⁽⁰⁾(ωi), before the grating term.
    pub fn material_mismatch(&self, omega_s: f64, omega_i: f64) -> Result<f64> {
        Ok(self.beta0(omega_s + omega_i)? - self.beta0(omega_s)? - self.beta0(omega_i)?)
    }

    /// Quasi-phase-matched spectral mismatch Δβ_ω (1/m).
    pub fn delta_beta_omega(&self, omega_s: f64, omega_i: f64) -> Result<f64> {
        // Written so that swapping the arguments gives bit-identical results.
        let sum = omega_s + omega_i;
        let (lo, hi) = if omega_s <= omega_i {
            (omega_s, omega_i)
        } else {
            (omega_i, omega_s)
        };
        Ok(self.beta0(sum)? - (self.beta0(lo)? + self.beta0(hi)?) - 2.0 * PI / self.qpm_period)
    }
}

/// Effective grating period that phase-matches `target` (signal, idler
/// wavelengths in m) for a pump at `pump_wavelength`.
///
/// The mismatch is affine in the grating wavevector 2π/Λ, so the root is found
/// in one step; the residual is still checked against 1e-6 rad/m.
pub fn fit_qpm_period(target: (f64, f64), pump_wavelength: f64, model: &MaterialModel) -> Result<f64> {
    let (ls, li) = target;
    if !(ls > 0.0 && li > 0.0 && pump_wavelength > 0.0) {
        return Err(Error::Precondition("wavelengths must be positive".into()));
    }
    let inv_p = 1.0 / pump_wavelength;
    let violation = (inv_p - 1.0 / ls - 1.0 / li).abs() / inv_p;
    if violation > 1e-6 {
        return Err(Error::Precondition(format!(
            "target pair ({ls:e}, {li:e}) m violates energy conservation with pump {pump_wavelength:e} m \
             (relative mismatch {violation:e})"
        )));
    }
    let ws = omega_from_wavelength(ls);
    let wi = omega_from_wavelength(li);
    let material = model.material_mismatch(ws, wi)?;
    if !(material > 0.0 && material.is_finite()) {
        return Err(Error::Fit {
            reason: "no positive grating period can compensate the material mismatch".into(),
            residual: material,
        });
    }
    let period = 2.0 * PI / material;
    let mut fitted = model.clone();
    fitted.qpm_period = period;
    let residual = fitted.delta_beta_omega(ws, wi)?;
    if residual.abs() >= 1e-6 {
        return Err(Error::Fit {
            reason: "residual above tolerance after fit".into(),
            residual,
        });
    }
    Ok(period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::nm;

    fn model() -> MaterialModel {
        MaterialModel::congruent_lithium_niobate(185.0).unwrap()
    }

    #[test]
    fn rejects_out_of_range_wavelength() {
        let err = model().refractive_index(nm(300.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::Domain {
                quantity: "wavelength_m",
                ..
            }
        ));
        assert!(err.to_string().contains("wavelength_m = 3.0"), "{err}");
        assert!(model().refractive_index(nm(6000.0)).is_err());
    }

    #[test]
    fn rejects_out_of_range_temperature() {
        let err = MaterialModel::new(JUNDT_CONGRUENT_EXTRAORDINARY, 350.0, 1e-5, CouplingModel::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::Domain {
                quantity: "temperature_c",
                ..
            }
        ));
        assert!(MaterialModel::new(JUNDT_CONGRUENT_EXTRAORDINARY, 10.0, 1e-5, CouplingModel::default()).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        let base = || MaterialModel::new(JUNDT_CONGRUENT_EXTRAORDINARY, 185.0, 1e-5, CouplingModel::default());
        assert!(base().unwrap().with_qpm_period(0.0).is_err());
        assert!(base()
            .unwrap()
            .with_coupling(CouplingModel::Evanescent {
                scale: -1.0,
                damping: 1e-6
            })
            .is_err());
        assert!(base()
            .unwrap()
            .with_coupling(CouplingModel::Evanescent {
                scale: 1.0,
                damping: -1e-6
            })
            .is_err());
        assert!(base().unwrap().with_coupling(CouplingModel::Constant(-3.0)).is_err());
    }

    #[test]
    fn beta0_is_linear_in_index() {
        let m = model();
        let w = crate::units::omega_from_wavelength(nm(1549.8));
        let b = m.beta0(w).unwrap();
        let n = m.refractive_index(nm(1549.8)).unwrap();
        let mut doubled = m.clone();
        doubled.index_offset = n;
        assert!((doubled.beta0(w).unwrap() - 2.0 * b).abs() < 1e-9 * b);
    }

    #[test]
    fn delta_beta_omega_is_symmetric() {
        let m = model();
        for (a, b) in [(1.1e15, 1.3e15), (1.2e15, 1.21e15), (1.05e15, 1.39e15)] {
            assert_eq!(m.delta_beta_omega(a, b).unwrap(), m.delta_beta_omega(b, a).unwrap());
        }
    }

    #[test]
    fn constant_coupling_ignores_wavelength() {
        let m = model().with_coupling(CouplingModel::Constant(400.0)).unwrap();
        assert_eq!(m.coupling(nm(1400.0)).unwrap(), 400.0);
        assert_eq!(m.coupling(nm(1700.0)).unwrap(), 400.0);
    }

    #[test]
    fn fit_rejects_energy_violation() {
        let err = fit_qpm_period((nm(1549.8), nm(1549.8)), nm(775.5), &model()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn fit_is_a_fixed_point() {
        let m = model();
        let p1 = fit_qpm_period((nm(1549.8), nm(1549.8)), nm(774.9), &m).unwrap();
        let m2 = m.with_qpm_period(p1).unwrap();
        let p2 = fit_qpm_period((nm(1549.8), nm(1549.8)), nm(774.9), &m2).unwrap();
        assert_eq!(p1, p2);
    }
}
