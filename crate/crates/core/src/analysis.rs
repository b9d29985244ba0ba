//! Feature extraction from one-dimensional spectra and two-dimensional maps.

use serde::{Deserialize, Serialize};

/// Index of the largest value; `None` for an empty slice or all-NaN input.
pub fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, _)| j)
}

/// Number of entries at or above `fraction` of `reference`.
pub fn count_above(values: &[f64], reference: f64, fraction: f64) -> usize {
    values.iter().filter(|&&v| v >= fraction * reference).count()
}

/// Vertex of the parabola through the samples at `idx − 1`, `idx`, `idx + 1`.
/// Falls back to the sample position at the edges or for flat tops.
pub fn parabolic_peak(axis: &[f64], values: &[f64], idx: usize) -> f64 {
    if idx == 0 || idx + 1 >= values.len() {
        return axis[idx];
    }
    let (x0, x1, x2) = (axis[idx - 1], axis[idx], axis[idx + 1]);
    let (y0, y1, y2) = (values[idx - 1], values[idx], values[idx + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if !(curvature < 0.0) {
        return x1;
    }
    // p(x) = y1 + d01 (x − x1) + curvature (x − x0)(x − x1)
    let vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    vertex.clamp(x0, x2)
}

fn crossing(axis: &[f64], values: &[f64], inside: usize, outside: usize, level: f64) -> f64 {
    let (xa, xb) = (axis[inside], axis[outside]);
    let (ya, yb) = (values[inside], values[outside]);
    if ya == yb {
        return xa;
    }
    xa + (level - ya) * (xb - xa) / (yb - ya)
}

/// Full width at half maximum of the peak at `peak`, searching only inside
/// `lo..hi`. `None` if the half level is not crossed on both sides.
pub fn fwhm_within(axis: &[f64], values: &[f64], peak: usize, lo: usize, hi: usize) -> Option<f64> {
    let half = 0.5 * values[peak];
    if !(half > 0.0) {
        return None;
    }
    let mut left = None;
    let mut j = peak;
    while j > lo {
        if values[j - 1] < half {
            left = Some(crossing(axis, values, j, j - 1, half));
            break;
        }
        j -= 1;
    }
    let mut right = None;
    let mut j = peak;
    while j + 1 < hi {
        if values[j + 1] < half {
            right = Some(crossing(axis, values, j, j + 1, half));
            break;
        }
        j += 1;
    }
    Some((right? - left?).abs())
}

/// FWHM of the global maximum.
pub fn fwhm(axis: &[f64], values: &[f64]) -> Option<f64> {
    let peak = argmax(values)?;
    fwhm_within(axis, values, peak, 0, values.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPeak {
    /// Interpolated peak position on the axis.
    pub position: f64,
    pub height: f64,
    pub fwhm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Branches {
    /// One peak straddling the split point.
    Single(BranchPeak),
    Pair {
        lower: BranchPeak,
        upper: BranchPeak,
    },
    /// Nothing above zero on one or both sides.
    Missing,
}

impl Branches {
    /// Distance between the two branch peaks, zero for a single branch.
    pub fn separation(&self) -> Option<f64> {
        match self {
            Branches::Single(_) => Some(0.0),
            Branches::Pair { lower, upper } => Some(upper.position - lower.position),
            Branches::Missing => None,
        }
    }
}

/// Splits `values` (on an increasing `axis`) at `split` and reports the peak
/// of each side. The two sides count as one branch when the value at the
/// split point reaches half of the smaller side maximum.
pub fn find_branches(axis: &[f64], values: &[f64], split: f64) -> Branches {
    if values.len() < 3 || axis.len() != values.len() {
        return Branches::Missing;
    }
    let cut = crate::grid::nearest(axis, split);
    let peak_on = |lo: usize, hi: usize| -> Option<BranchPeak> {
        let local = argmax(&values[lo..hi])? + lo;
        if !(values[local] > 0.0) {
            return None;
        }
        Some(BranchPeak {
            position: parabolic_peak(axis, values, local),
            height: values[local],
            fwhm: fwhm_within(axis, values, local, lo, hi),
        })
    };
    let left = peak_on(0, cut);
    let right = peak_on(cut + 1, values.len());
    match (left, right) {
        (Some(lower), Some(upper)) => {
            if values[cut] >= 0.5 * lower.height.min(upper.height) {
                peak_on(0, values.len()).map_or(Branches::Missing, Branches::Single)
            } else {
                Branches::Pair { lower, upper }
            }
        }
        _ if argmax(values) == Some(cut) => peak_on(0, values.len()).map_or(Branches::Missing, Branches::Single),
        _ => Branches::Missing,
    }
}

/// Indices of strict local maxima that reach `min_fraction` of the global max.
pub fn significant_maxima(values: &[f64], min_fraction: f64) -> Vec<usize> {
    let top = values.iter().copied().fold(0.0, f64::max);
    (1..values.len().saturating_sub(1))
        .filter(|&j| values[j] > values[j - 1] && values[j] >= values[j + 1] && values[j] >= min_fraction * top)
        .collect()
}

/// True when two maxima of at least `min_fraction` of the maximum are
/// separated by a dip lying at least `min_dip` (relative) below the lower of
/// the two.
pub fn is_bimodal(values: &[f64], min_fraction: f64, min_dip: f64) -> bool {
    deepest_dip(values, min_fraction) >= min_dip
}

/// Largest relative dip between any two significant maxima, zero when there
/// is at most one.
pub fn deepest_dip(values: &[f64], min_fraction: f64) -> f64 {
    let peaks = significant_maxima(values, min_fraction);
    let mut best: f64 = 0.0;
    for (i, &a) in peaks.iter().enumerate() {
        for &b in &peaks[i + 1..] {
            let floor = values[a..=b].iter().copied().fold(f64::INFINITY, f64::min);
            best = best.max(1.0 - floor / values[a].min(values[b]));
        }
    }
    best
}

/// Mean and variance of a square map along the `(1, 1)/√2` direction.
pub fn diagonal_moments(map: &[f64], labels: &[i64]) -> (f64, f64) {
    let n = labels.len();
    let mut mass = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for a in 0..n {
        for b in 0..n {
            let p = map[a * n + b];
            let u = (labels[a] + labels[b]) as f64 / std::f64::consts::SQRT_2;
            mass += p;
            first += p * u;
            second += p * u * u;
        }
    }
    let mean = first / mass;
    (mean, second / mass - mean * mean)
}

/// Circularly shifts a square row-major map by `shift` along both axes.
pub fn shift_map(map: &[f64], n: usize, shift: i64) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    let s = shift.rem_euclid(n as i64) as usize;
    for a in 0..n {
        for b in 0..n {
            out[((a + s) % n) * n + (b + s) % n] = map[a * n + b];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(axis: &[f64], center: f64, width: f64) -> Vec<f64> {
        axis.iter()
            .map(|x| (-(x - center).powi(2) / (2.0 * width * width)).exp())
            .collect()
    }

    #[test]
    fn parabola_recovers_vertex() {
        let axis: Vec<f64> = (0..11).map(|j| j as f64).collect();
        let values: Vec<f64> = axis.iter().map(|x| 5.0 - (x - 4.3).powi(2)).collect();
        assert!((parabolic_peak(&axis, &values, 4) - 4.3).abs() < 1e-12);
    }

    #[test]
    fn gaussian_fwhm() {
        let axis: Vec<f64> = (0..2001).map(|j| j as f64 * 0.01).collect();
        let values = gaussian(&axis, 10.0, 1.0);
        let w = fwhm(&axis, &values).unwrap();
        assert!((w - 2.0 * (2.0 * 2f64.ln()).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn branches_single_and_pair() {
        let axis: Vec<f64> = (0..401).map(|j| 1400.0 + j as f64 * 0.5).collect();
        let single = gaussian(&axis, 1500.0, 20.0);
        assert!(matches!(find_branches(&axis, &single, 1500.0), Branches::Single(_)));
        let pair: Vec<f64> = gaussian(&axis, 1440.0, 5.0)
            .iter()
            .zip(gaussian(&axis, 1570.0, 8.0))
            .map(|(a, b)| a + 0.7 * b)
            .collect();
        match find_branches(&axis, &pair, 1500.0) {
            Branches::Pair { lower, upper } => {
                assert!((lower.position - 1440.0).abs() < 0.05);
                assert!((upper.position - 1570.0).abs() < 0.05);
                assert!(upper.fwhm.unwrap() > lower.fwhm.unwrap());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(find_branches(&axis, &vec![0.0; 401], 1500.0), Branches::Missing);
    }

    #[test]
    fn bimodality() {
        let axis: Vec<f64> = (0..200).map(|j| j as f64).collect();
        let two: Vec<f64> = gaussian(&axis, 80.0, 6.0)
            .iter()
            .zip(gaussian(&axis, 110.0, 6.0))
            .map(|(a, b)| a + b)
            .collect();
        assert!(is_bimodal(&two, 0.3, 0.01));
        assert!(deepest_dip(&two, 0.3) > 0.5);
        assert!(!is_bimodal(&gaussian(&axis, 90.0, 10.0), 0.3, 0.01));
    }

    #[test]
    fn shift_and_moments() {
        let labels: Vec<i64> = (-2..=2).collect();
        let mut m = vec![0.0; 25];
        m[2 * 5 + 2] = 1.0;
        let s = shift_map(&m, 5, 1);
        assert_eq!(s[3 * 5 + 3], 1.0);
        let (mean, var) = diagonal_moments(&s, &labels);
        assert!((mean - 2f64.sqrt()).abs() < 1e-12 && var.abs() < 1e-12);
        assert_eq!(count_above(&[0.0, 0.5, 1.0], 1.0, 0.5), 2);
    }
}
