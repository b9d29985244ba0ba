//! Fast path against oracle comparisons, as run by the `verify` command.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlations::{gamma_n_slice, COINCIDENCE_FACTOR};
use crate::error::Result;
use crate::grid::Grid;
use crate::jsa::{phase_match_factor, JsaTensor, SlabTensor};
use crate::oracle::{
    direct_dft2, independent_power, pm_integral, realspace_pair_amplitude, Boundary, PropagationProblem,
};
use crate::pipeline::GridSpec;
use crate::pump::SpatialMode;
use crate::scenarios::{detuned_cases, preset};
use crate::transform::ChannelTransform;
use crate::units::nm;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    /// Largest deviation seen over all cases.
    pub error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }
}

/// Closed-form longitudinal overlap against trapezoid quadrature, absolute.
pub fn phase_match_check(seed: u64, cases: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let length = 0.04;
    let mut error: f64 = 0.0;
    for j in 0..cases {
        let delta_beta: f64 = if j % 10 == 0 {
            rng.gen_range(-1e-2..1e-2)
        } else {
            rng.gen_range(-2500.0..2500.0)
        };
        let steps = (1e4 * (delta_beta * length).abs()).ceil() as usize + 2000;
        let reference = pm_integral(delta_beta, length, steps)?;
        error = error.max((phase_match_factor(delta_beta, length) - reference).norm());
    }
    Ok(Check {
        name: "phase-matching factor vs z quadrature",
        cases,
        error,
        tolerance: 1e-8,
    })
}

/// FFT-based channel transform against the literal double sum, absolute.
pub fn transform_check(seed: u64, cases: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut error: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.gen_range(3..=25);
        let input: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let fast = ChannelTransform::new(n).to_channels(&input);
        let slow = direct_dft2(&input, n)?;
        for (a, b) in fast.iter().zip(&slow) {
            error = error.max((a - b).norm());
        }
    }
    Ok(Check {
        name: "channel transform vs literal sum",
        cases,
        error,
        tolerance: 1e-9,
    })
}

/// Fixed-frequency channel correlations from the momentum-space amplitude
/// against real-space propagation, for the three near-degenerate pumps.
/// Both maps are scaled to unit maximum; the error is the largest
/// difference.
pub fn realspace_check() -> Result<Check> {
    let base = preset("fig10_near_degenerate")?;
    let cases = detuned_cases(&base)?;
    let mut error: f64 = 0.0;
    for case in &cases {
        let mut pipeline = case.config.pipeline()?;
        let degenerate = 2.0 * pipeline.pump.central_wavelength();
        pipeline.grid = GridSpec {
            lambda_min: degenerate - nm(1.0),
            lambda_max: degenerate + nm(1.0),
            points: 3,
        };
        let state = pipeline.state()?;
        let fast = gamma_n_slice(&state, 1, 1)?;

        let omega = state.grid().omega_s()[1];
        let model = &pipeline.material;
        let coupling = model.coupling_at_omega(omega)?;
        let pump_channels = match pipeline.pump.spatial() {
            SpatialMode::PerChannel(list) => list.clone(),
            SpatialMode::KWindow { .. } => unreachable!("preset pumps single channels"),
        };
        let n = pipeline.geometry.channel_count;
        let problem = PropagationProblem {
            channel_count: n,
            coupling_s: coupling,
            coupling_i: coupling,
            beta_mismatch: model.delta_beta_omega(omega, omega)?,
            length: pipeline.geometry.length,
            pump_channels,
            z_steps: 4000,
            boundary: Boundary::Ring,
        };
        let psi = realspace_pair_amplitude(&problem)?;
        let slow: Vec<f64> = psi
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let w = v.norm_sqr();
                if j / n == j % n {
                    COINCIDENCE_FACTOR * w
                } else {
                    w
                }
            })
            .collect();
        let top_fast = fast.iter().copied().fold(0.0, f64::max);
        let top_slow = slow.iter().copied().fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(&slow) {
            error = error.max((a / top_fast - b / top_slow).abs());
        }
    }
    Ok(Check {
        name: "momentum-space correlations vs real-space propagation",
        cases: cases.len(),
        error,
        tolerance: 1e-6,
    })
}

/// Parallel power reduction against a compensated sum in reverse order,
/// relative.
pub fn power_check(seed: u64, cases: usize) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut error: f64 = 0.0;
    for _ in 0..cases {
        let m = rng.gen_range(3..=8);
        let n = rng.gen_range(3..=9);
        let axis: Vec<f64> = (0..m).map(|j| 1.2e15 + j as f64 * 1e12).collect();
        let grid = Grid::new(axis.clone(), axis, n)?;
        let slabs = (0..m * m)
            .map(|_| {
                rng.gen_bool(0.7).then(|| {
                    (0..n * n)
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect::<Vec<_>>()
                        .into_boxed_slice()
                })
            })
            .collect();
        let jsa = JsaTensor::new(SlabTensor::from_slabs(grid, slabs)?);
        let reference = independent_power(&jsa);
        if reference > 0.0 {
            error = error.max((jsa.power() - reference).abs() / reference);
        }
    }
    Ok(Check {
        name: "tensor power vs compensated sum",
        cases,
        error,
        tolerance: 1e-12,
    })
}

pub fn run_all(seed: u64) -> Result<Vec<Check>> {
    Ok(vec![
        phase_match_check(seed, 100)?,
        transform_check(seed.wrapping_add(1), 100)?,
        power_check(seed.wrapping_add(2), 100)?,
        realspace_check()?,
    ])
}
