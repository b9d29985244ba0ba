//! Sampling grids for the joint amplitude: two uniform angular-frequency axes
//! and the discrete Brillouin-zone momenta of an `N`-channel array.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::MaterialModel;
use crate::units::{omega_from_wavelength, wavelength_from_omega};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    omega_s: Vec<f64>,
    omega_i: Vec<f64>,
    k: Vec<f64>,
}

/// Map a transverse momentum into the first Brillouin zone (−π, π].
pub fn wrap_to_zone(k: f64) -> f64 {
    let x = k.rem_euclid(2.0 * PI);
    if x > PI {
        x - 2.0 * PI
    } else {
        x
    }
}

/// `k_j = 2πj/N − π` for `j = 0..N`.
pub fn k_axis(channel_count: usize) -> Vec<f64> {
    let n = channel_count as f64;
    (0..channel_count).map(|j| 2.0 * PI * j as f64 / n - PI).collect()
}

/// Channel label of transverse index `j`: `j − ⌊N/2⌋`, so channel 0 is central
/// for odd `N`.
pub fn channel_axis(channel_count: usize) -> Vec<i64> {
    let half = (channel_count / 2) as i64;
    (0..channel_count as i64).map(|j| j - half).collect()
}

fn check_uniform(name: &'static str, axis: &[f64]) -> Result<f64> {
    if axis.len() < 2 {
        return Err(Error::invalid(name, "needs at least two points"));
    }
    if axis.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::invalid(name, "frequencies must be positive and finite"));
    }
    let step = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::invalid(name, "axis must be strictly increasing"));
    }
    for (j, pair) in axis.windows(2).enumerate() {
        let d = pair[1] - pair[0];
        if !(d > 0.0) {
            return Err(Error::invalid(name, format!("not strictly increasing at index {j}")));
        }
        if (d - step).abs() > 1e-6 * step {
            return Err(Error::invalid(name, format!("not uniformly spaced at index {j}")));
        }
    }
    Ok(step)
}

impl Grid {
    pub fn new(omega_s: Vec<f64>, omega_i: Vec<f64>, channel_count: usize) -> Result<Self> {
        check_uniform("omega_s_axis", &omega_s)?;
        check_uniform("omega_i_axis", &omega_i)?;
        if channel_count < 3 {
            return Err(Error::invalid(
                "channel_count",
                format!("must be >= 3, got {channel_count}"),
            ));
        }
        Ok(Self {
            omega_s,
            omega_i,
            k: k_axis(channel_count),
        })
    }

    /// Identical signal and idler axes placed symmetrically about half the pump
    /// frequency, so that `omega[j] + omega[M−1−j]` equals the pump frequency
    /// and one anti-diagonal of the grid sits exactly on the pump line.
    ///
    /// The half-span is chosen so that both `lambda_min` and `lambda_max` are
    /// covered.
    pub fn pump_centered(
        pump_wavelength: f64,
        lambda_min: f64,
        lambda_max: f64,
        points: usize,
        channel_count: usize,
    ) -> Result<Self> {
        if !(lambda_min > 0.0 && lambda_min < lambda_max) {
            return Err(Error::invalid("grid", "wavelength window must satisfy 0 < min < max"));
        }
        if points < 3 {
            return Err(Error::invalid("grid.points", format!("must be >= 3, got {points}")));
        }
        let center = 0.5 * omega_from_wavelength(pump_wavelength);
        let hi = omega_from_wavelength(lambda_min);
        let lo = omega_from_wavelength(lambda_max);
        if !(lo < center && center < hi) {
            return Err(Error::invalid(
                "grid",
                "degenerate wavelength 2·λp must lie inside the wavelength window",
            ));
        }
        let half_span = (hi - center).max(center - lo);
        let step = 2.0 * half_span / (points - 1) as f64;
        let mid = (points - 1) as f64 / 2.0;
        let axis: Vec<f64> = (0..points).map(|j| center + (j as f64 - mid) * step).collect();
        if axis[0] <= 0.0 {
            return Err(Error::invalid("grid", "window too wide for the pump frequency"));
        }
        Self::new(axis.clone(), axis, channel_count)
    }

    pub fn omega_s(&self) -> &[f64] {
        &self.omega_s
    }

    pub fn omega_i(&self) -> &[f64] {
        &self.omega_i
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn channel_count(&self) -> usize {
        self.k.len()
    }

    pub fn channels(&self) -> Vec<i64> {
        channel_axis(self.k.len())
    }

    pub fn d_omega_s(&self) -> f64 {
        (self.omega_s[self.omega_s.len() - 1] - self.omega_s[0]) / (self.omega_s.len() - 1) as f64
    }

    pub fn d_omega_i(&self) -> f64 {
        (self.omega_i[self.omega_i.len() - 1] - self.omega_i[0]) / (self.omega_i.len() - 1) as f64
    }

    pub fn dk(&self) -> f64 {
        2.0 * PI / self.k.len() as f64
    }

    /// Measure of one 4D grid cell.
    pub fn cell_measure(&self) -> f64 {
        self.d_omega_s() * self.d_omega_i() * self.dk() * self.dk()
    }

    /// True when the two frequency axes coincide, which is what exchange
    /// symmetry of the amplitude requires.
    pub fn is_symmetric(&self) -> bool {
        self.omega_s == self.omega_i
    }

    pub fn wavelengths_s(&self) -> Vec<f64> {
        self.omega_s.iter().map(|&w| wavelength_from_omega(w)).collect()
    }

    /// Index of the axis point closest to `omega`.
    pub fn nearest_s(&self, omega: f64) -> usize {
        nearest(&self.omega_s, omega)
    }

    /// Ensure every axis point and every pair sum lies inside the material's
    /// validity window.
    pub fn check_against(&self, model: &MaterialModel) -> Result<()> {
        let ends = [
            self.omega_s[0],
            self.omega_s[self.omega_s.len() - 1],
            self.omega_i[0],
            self.omega_i[self.omega_i.len() - 1],
            self.omega_s[0] + self.omega_i[0],
            self.omega_s[self.omega_s.len() - 1] + self.omega_i[self.omega_i.len() - 1],
        ];
        for w in ends {
            model.refractive_index(wavelength_from_omega(w))?;
        }
        Ok(())
    }
}

pub(crate) fn nearest(axis: &[f64], x: f64) -> usize {
    axis.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
        .map(|(j, _)| j)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::nm;

    #[test]
    fn wrap_lands_in_half_open_zone() {
        assert_eq!(wrap_to_zone(PI), PI);
        assert_eq!(wrap_to_zone(-PI), PI);
        assert!((wrap_to_zone(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_to_zone(0.3 + 4.0 * PI) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn k_axis_matches_channel_count() {
        let k = k_axis(41);
        assert_eq!(k.len(), 41);
        assert_eq!(k[0], -PI);
        assert!((k[20] + PI / 41.0).abs() < 1e-15);
        assert_eq!(channel_axis(41)[20], 0);
        assert_eq!(channel_axis(41)[0], -20);
    }

    #[test]
    fn pump_centered_pairs_sum_to_pump() {
        let lp = nm(774.9);
        let g = Grid::pump_centered(lp, nm(1350.0), nm(1800.0), 321, 41).unwrap();
        let wp = omega_from_wavelength(lp);
        let m = g.omega_s().len();
        for j in 0..m {
            let s = g.omega_s()[j] + g.omega_i()[m - 1 - j];
            assert!((s - wp).abs() < 1e-6 * g.d_omega_s(), "{j}");
        }
        assert!(g.is_symmetric());
        let lam = g.wavelengths_s();
        assert!(lam[m - 1] <= nm(1350.0) + 1e-15);
        assert!(lam[0] >= nm(1800.0));
    }

    #[test]
    fn rejects_non_uniform_axes() {
        let err = Grid::new(vec![1.0, 2.0, 4.0], vec![1.0, 2.0, 3.0], 5).unwrap_err();
        assert!(err.to_string().contains("uniformly"));
        assert!(Grid::new(vec![3.0, 2.0, 1.0], vec![1.0, 2.0, 3.0], 5).is_err());
        assert!(Grid::new(vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], 2).is_err());
    }
}
