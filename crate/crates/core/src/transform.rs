//! Unitary two-dimensional transform between Bloch momenta and channel labels.
//!
//! With `k_j = 2πj/N − π` and channel labels `n = j − ⌊N/2⌋`,
//!
//! `ψ(na, nb) = (1/N) Σ_{j,l} exp(i(k_j·na + k_l·nb)) f(j, l)`
//!
//! which is an unnormalised inverse FFT up to the sign `(−1)^(na+nb)` and a
//! relabelling of the output index.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::channel_axis;

#[derive(Clone)]
pub struct ChannelTransform {
    n: usize,
    inverse: Arc<dyn Fft<f64>>,
    forward: Arc<dyn Fft<f64>>,
    /// FFT bin holding channel `labels[a]`.
    bin: Vec<usize>,
    sign: Vec<f64>,
}

impl std::fmt::Debug for ChannelTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChannelTransform").field("n", &self.n).finish()
    }
}

impl ChannelTransform {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let labels = channel_axis(n);
        Self {
            n,
            inverse: planner.plan_fft_inverse(n),
            forward: planner.plan_fft_forward(n),
            bin: labels.iter().map(|&l| l.rem_euclid(n as i64) as usize).collect(),
            sign: labels
                .iter()
                .map(|&l| if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Momentum-space block (row-major, `ks` major) to channel space
    /// (row-major, `ns` major, rows ordered by channel label).
    pub fn to_channels(&self, kspace: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(kspace.len(), n * n, "block must be N×N");
        let spectrum = self.fft2(kspace, &self.inverse);
        let scale = 1.0 / n as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..n {
            for b in 0..n {
                out[a * n + b] = spectrum[self.bin[a] * n + self.bin[b]] * (self.sign[a] * self.sign[b] * scale);
            }
        }
        out
    }

    /// Inverse of [`to_channels`](Self::to_channels).
    pub fn to_momentum(&self, channels: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(channels.len(), n * n, "block must be N×N");
        let mut placed = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..n {
            for b in 0..n {
                placed[self.bin[a] * n + self.bin[b]] = channels[a * n + b] * (self.sign[a] * self.sign[b]);
            }
        }
        let mut out = self.fft2(&placed, &self.forward);
        let scale = 1.0 / n as f64;
        out.iter_mut().for_each(|v| *v *= scale);
        out
    }

    fn fft2(&self, input: &[Complex64], plan: &Arc<dyn Fft<f64>>) -> Vec<Complex64> {
        let n = self.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        let mut rows = input.to_vec();
        plan.process_with_scratch(&mut rows, &mut scratch);
        let mut cols = transpose(&rows, n);
        plan.process_with_scratch(&mut cols, &mut scratch);
        transpose(&cols, n)
    }
}

fn transpose(m: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut t = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        for c in 0..n {
            t[c * n + r] = m[r * n + c];
        }
    }
    t
}
