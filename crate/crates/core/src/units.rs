//! Physical constants and wavelength/frequency conversions. SI throughout.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Angular frequency (rad/s) of light with vacuum wavelength `wavelength` (m).
#[inline]
pub fn omega_from_wavelength(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

/// Vacuum wavelength (m) of light with angular frequency `omega` (rad/s).
#[inline]
pub fn wavelength_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

#[inline]
pub fn nm(value: f64) -> f64 {
    value * 1e-9
}

#[inline]
pub fn to_nm(meters: f64) -> f64 {
    meters * 1e9
}

/// Wavelength of the partner photon required by energy conservation.
pub fn partner_wavelength(pump: f64, photon: f64) -> f64 {
    1.0 / (1.0 / pump - 1.0 / photon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_round_trip() {
        let lam = nm(1549.8);
        let back = wavelength_from_omega(omega_from_wavelength(lam));
        assert!((back - lam).abs() < 1e-20);
    }

    #[test]
    fn degenerate_partner() {
        let p = partner_wavelength(nm(774.9), nm(1549.8));
        assert!((p - nm(1549.8)).abs() < 1e-18);
    }
}
