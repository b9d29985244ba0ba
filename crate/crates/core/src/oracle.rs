//! Slow, independent reference computations used to check the fast paths:
//! explicit z-quadrature of the longitudinal overlap, literal double-sum
//! transforms, real-space propagation of the photon pair and a compensated
//! power reduction.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{channel_axis, k_axis};
use crate::jsa::JsaTensor;

/// `(1/L)∫_{−L}^{0} exp(iΔβz) dz` by the composite trapezoid rule.
pub fn pm_integral(delta_beta: f64, length: f64, z_steps: usize) -> Result<Complex64> {
    if z_steps < 100 {
        return Err(Error::Precondition(format!("z_steps must be >= 100, got {z_steps}")));
    }
    if !(length > 0.0) {
        return Err(Error::Precondition("length must be positive".into()));
    }
    let h = length / z_steps as f64;
    let at = |j: usize| Complex64::from_polar(1.0, delta_beta * (-length + j as f64 * h));
    let mut sum = NeumaierComplex::default();
    sum.add(0.5 * (at(0) + at(z_steps)));
    for j in 1..z_steps {
        sum.add(at(j));
    }
    Ok(sum.total() * (h / length))
}

/// Boundary condition of the finite array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Boundary {
    /// Closed ring whose Bloch momenta are exactly the grid momenta
    /// `2πj/N − π`; for odd `N` the closing link carries a sign flip.
    #[default]
    Ring,
    /// Open chain with hard edges.
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationProblem {
    pub channel_count: usize,
    /// Coupling seen by the signal photon (1/m).
    pub coupling_s: f64,
    pub coupling_i: f64,
    /// Spectral mismatch Δβ_ω at the chosen frequency pair (1/m).
    pub beta_mismatch: f64,
    pub length: f64,
    pub pump_channels: Vec<(i64, Complex64)>,
    pub z_steps: usize,
    pub boundary: Boundary,
}

impl PropagationProblem {
    fn validate(&self) -> Result<()> {
        if self.channel_count < 3 || self.channel_count.is_multiple_of(2) {
            return Err(Error::invalid("channel_count", "oracle needs an odd count >= 3"));
        }
        if !(self.length > 0.0) {
            return Err(Error::invalid("length", "must be positive"));
        }
        if self.z_steps < 2 {
            return Err(Error::invalid("z_steps", "must be >= 2"));
        }
        if !(self.coupling_s >= 0.0 && self.coupling_i >= 0.0) {
            return Err(Error::invalid("coupling", "must be >= 0"));
        }
        let half = (self.channel_count / 2) as i64;
        if self.pump_channels.iter().any(|(m, _)| m.abs() > half) {
            return Err(Error::invalid("pump_channels", "channel outside the array"));
        }
        if self.pump_channels.iter().all(|(_, a)| a.norm() == 0.0) {
            return Err(Error::DegenerateInput("no pumped channel".into()));
        }
        Ok(())
    }
}

/// Nearest-neighbour generator `K = C(S + S⁻¹)` in real space, row-major.
pub fn coupling_generator(channel_count: usize, coupling: f64, boundary: Boundary) -> Vec<Complex64> {
    let n = channel_count;
    let mut k = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n - 1 {
        k[a * n + a + 1] = Complex64::new(coupling, 0.0);
        k[(a + 1) * n + a] = Complex64::new(coupling, 0.0);
    }
    if boundary == Boundary::Ring {
        let link = if n % 2 == 1 { -coupling } else { coupling };
        k[(n - 1) * n] = Complex64::new(link, 0.0);
        k[n - 1] = Complex64::new(link, 0.0);
    }
    k
}

/// Eigen-decomposition of the generator: `(vectors, values)`, with
/// `vectors[a * n + j]` the `a`-th component of the `j`-th eigenvector.
fn eigensystem(channel_count: usize, coupling: f64, boundary: Boundary) -> (Vec<Complex64>, Vec<f64>) {
    let n = channel_count;
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    let values: Vec<f64> = match boundary {
        Boundary::Ring => {
            let momenta = k_axis(n);
            let norm = 1.0 / (n as f64).sqrt();
            for a in 0..n {
                for (j, &kj) in momenta.iter().enumerate() {
                    vectors[a * n + j] = Complex64::from_polar(norm, kj * a as f64);
                }
            }
            momenta.iter().map(|k| 2.0 * coupling * k.cos()).collect()
        }
        Boundary::Open => {
            let norm = (2.0 / (n as f64 + 1.0)).sqrt();
            for a in 0..n {
                for j in 0..n {
                    let q = PI * (j + 1) as f64 / (n as f64 + 1.0);
                    vectors[a * n + j] = Complex64::new(norm * (q * (a + 1) as f64).sin(), 0.0);
                }
            }
            (0..n)
                .map(|j| 2.0 * coupling * (PI * (j + 1) as f64 / (n as f64 + 1.0)).cos())
                .collect()
        }
    };
    (vectors, values)
}

/// Single-photon evolution `exp(iℓK)` built from the analytic eigenbasis.
#[derive(Debug, Clone)]
pub struct Propagator {
    n: usize,
    vectors: Vec<Complex64>,
    values: Vec<f64>,
}

impl Propagator {
    pub fn new(channel_count: usize, coupling: f64, boundary: Boundary) -> Self {
        let (vectors, values) = eigensystem(channel_count, coupling, boundary);
        Self {
            n: channel_count,
            vectors,
            values,
        }
    }

    /// Column `source` of `exp(iℓK)`: the amplitude in every channel after
    /// launching into channel index `source`.
    pub fn column(&self, distance: f64, source: usize) -> Vec<Complex64> {
        let n = self.n;
        if self.values.iter().all(|&v| v == 0.0) {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[source] = Complex64::new(1.0, 0.0);
            return e;
        }
        let weights: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, self.values[j] * distance) * self.vectors[source * n + j].conj())
            .collect();
        (0..n)
            .map(|a| (0..n).map(|j| self.vectors[a * n + j] * weights[j]).sum())
            .collect()
    }

    /// Full matrix, row-major.
    pub fn matrix(&self, distance: f64) -> Vec<Complex64> {
        let n = self.n;
        let mut u = vec![Complex64::new(0.0, 0.0); n * n];
        for c in 0..n {
            for (a, v) in self.column(distance, c).into_iter().enumerate() {
                u[a * n + c] = v;
            }
        }
        u
    }
}

fn pair_amplitude_at_steps(problem: &PropagationProblem, steps: usize) -> Vec<Complex64> {
    let n = problem.channel_count;
    let steps = steps + steps % 2;
    let h = problem.length / steps as f64;
    let labels = channel_axis(n);
    let signal = Propagator::new(n, problem.coupling_s, problem.boundary);
    let idler = Propagator::new(n, problem.coupling_i, problem.boundary);
    let sources: Vec<(usize, Complex64)> = problem
        .pump_channels
        .iter()
        .map(|&(m, amp)| (labels.iter().position(|&l| l == m).expect("validated channel"), amp))
        .collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
    for step in 0..=steps {
        let ell = step as f64 * h;
        let weight = if step == 0 || step == steps {
            1.0
        } else if step % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let creation = Complex64::from_polar(weight, -problem.beta_mismatch * ell);
        for &(c, amp) in &sources {
            let us = signal.column(ell, c);
            let ui = idler.column(ell, c);
            let w = creation * amp;
            for a in 0..n {
                let left = us[a] * w;
                for b in 0..n {
                    acc[a * n + b] += left * ui[b];
                }
            }
        }
    }
    let scale = h / (3.0 * problem.length);
    acc.iter_mut().for_each(|v| *v *= scale);
    acc
}

/// Channel-space pair amplitude from real-space propagation: a pair born at
/// distance ℓ before the exit in pumped channel `m` picks up `exp(−iΔβ_ω ℓ)`
/// and each photon then evolves under `exp(iℓK)`. The creation point is
/// integrated with composite Simpson; the result is accepted only if doubling
/// the step count changes it by less than `1e-6` relative.
pub fn realspace_pair_amplitude(problem: &PropagationProblem) -> Result<Vec<Complex64>> {
    problem.validate()?;
    let coarse = pair_amplitude_at_steps(problem, problem.z_steps);
    let fine = pair_amplitude_at_steps(problem, 2 * problem.z_steps);
    let scale = fine.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let change = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale.max(f64::MIN_POSITIVE);
    if change > 1e-6 {
        return Err(Error::Convergence {
            change,
            tolerance: 1e-6,
        });
    }
    Ok(fine)
}

/// Literal `O(N⁴)` evaluation of the unitary momentum-to-channel transform.
pub fn direct_dft2(kspace: &[Complex64], channel_count: usize) -> Result<Vec<Complex64>> {
    literal_transform(kspace, channel_count, false)
}

/// Literal inverse of [`direct_dft2`].
pub fn direct_idft2(channels: &[Complex64], channel_count: usize) -> Result<Vec<Complex64>> {
    literal_transform(channels, channel_count, true)
}

/// `out[p, q] = (1/N) Σ_{x,y} in[x, y]·T(p, x)·T(q, y)` with
/// `T(a, j) = exp(i k_j n_a)` forward and `T(j, a) = exp(−i k_j n_a)` inverse.
fn literal_transform(input: &[Complex64], n: usize, inverse: bool) -> Result<Vec<Complex64>> {
    if input.len() != n * n {
        return Err(Error::Precondition(format!(
            "expected a {n}×{n} array, got {} values",
            input.len()
        )));
    }
    let k = k_axis(n);
    let labels = channel_axis(n);
    let phase = |j: usize, a: usize| Complex64::from_polar(1.0, k[j] * labels[a] as f64);
    let t: Vec<Complex64> = (0..n * n)
        .map(|idx| {
            let (p, x) = (idx / n, idx % n);
            if inverse {
                phase(p, x).conj()
            } else {
                phase(x, p)
            }
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for p in 0..n {
        for q in 0..n {
            let mut acc = NeumaierComplex::default();
            for x in 0..n {
                for y in 0..n {
                    acc.add(input[x * n + y] * t[p * n + x] * t[q * n + y]);
                }
            }
            out[p * n + q] = acc.total() / n as f64;
        }
    }
    Ok(out)
}

/// `Σ|f|²` times the cell measure, visiting indices in reverse
/// `(ki, ks, ωi, ωs)` order with compensated summation.
pub fn independent_power(jsa: &JsaTensor) -> f64 {
    let [ms, mi, n, _] = jsa.values().dims();
    let mut sum = Neumaier::default();
    for ki in (0..n).rev() {
        for ks in (0..n).rev() {
            for ii in (0..mi).rev() {
                for is in (0..ms).rev() {
                    sum.add(jsa.get(is, ii, ks, ki).norm_sqr());
                }
            }
        }
    }
    sum.total() * jsa.grid().cell_measure()
}

/// Neumaier's improved Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct NeumaierComplex {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierComplex {
    fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}
