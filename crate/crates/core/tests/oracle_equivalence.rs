//! Fast paths against the slow reference implementations.

use wga_pdc::oracle::{pm_integral, realspace_pair_amplitude, Boundary, PropagationProblem};
use wga_pdc::verify::{phase_match_check, power_check, realspace_check, transform_check, Check};
use wga_pdc::Complex64;

fn assert_passed(check: &Check, seed: u64) {
    assert!(
        check.passed(),
        "{} failed for seed {seed}: error {:e} > {:e}",
        check.name,
        check.error,
        check.tolerance
    );
}

#[test]
fn checks_hold_across_seeds() {
    for seed in 0..100u64 {
        assert_passed(&phase_match_check(seed, 2).unwrap(), seed);
        assert_passed(&transform_check(seed, 5).unwrap(), seed);
        assert_passed(&power_check(seed, 3).unwrap(), seed);
    }
}

#[test]
fn realspace_agrees_for_the_detuned_pumps() {
    assert_passed(&realspace_check().unwrap(), 0);
}

#[test]
fn quadrature_converges_at_second_order() {
    let length = 0.03;
    for delta_beta in [-800.0, -35.0, 9.0, 120.0, 2400.0] {
        let base = 100 + (20.0 * f64::abs(delta_beta * length)) as usize;
        let at = |steps: usize| pm_integral(delta_beta, length, steps).unwrap();
        let (a, b, c) = (at(base), at(2 * base), at(4 * base));
        let first = (a - b).norm();
        let second = (b - c).norm();
        if first > 1e-7 {
            assert!(second / first < 0.25, "Δβ {delta_beta}: ratio {}", second / first);
        }
    }
}

fn single_pump(channel_count: usize, coupling: f64, length: f64, boundary: Boundary) -> PropagationProblem {
    PropagationProblem {
        channel_count,
        coupling_s: coupling,
        coupling_i: coupling,
        beta_mismatch: 0.0,
        length,
        pump_channels: vec![(0, Complex64::new(1.0, 0.0))],
        z_steps: 400,
        boundary,
    }
}

#[test]
fn neighbour_amplitude_grows_linearly_for_short_arrays() {
    let n = 9;
    let centre = n / 2;
    let ratio = |length: f64| {
        let psi = realspace_pair_amplitude(&single_pump(n, 400.0, length, Boundary::Ring)).unwrap();
        psi[(centre + 1) * n + centre].norm() / psi[centre * n + centre].norm()
    };
    let (short, long) = (1e-6, 1e-5);
    let slope = (ratio(long) / ratio(short)).ln() / (long / short).ln();
    assert!((slope - 1.0).abs() < 1e-3, "slope {slope}");
    // Leading order: the pair is born on average half a length before the exit.
    assert!((ratio(short) / (400.0 * short / 2.0) - 1.0).abs() < 1e-3);
}

#[test]
fn edges_matter_only_once_light_reaches_them() {
    let max_diff = |n: usize| {
        let ring = realspace_pair_amplitude(&single_pump(n, 400.0, 0.005, Boundary::Ring)).unwrap();
        let open = realspace_pair_amplitude(&single_pump(n, 400.0, 0.005, Boundary::Open)).unwrap();
        ring.iter().zip(&open).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    };
    assert!(max_diff(41) < 1e-9, "{}", max_diff(41));
    assert!(max_diff(7) > 1e-2, "{}", max_diff(7));
}
