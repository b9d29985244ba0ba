//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wga_pdc::analysis::{count_above, deepest_dip, diagonal_moments, shift_map, Branches};
use wga_pdc::config::{FilterSection, RunConfig};
use wga_pdc::correlations::{
    gamma_k, gamma_k_weighted, gamma_n, gamma_n_weighted, phase_matching_curve, smooth_spectral, spatial_marginal,
    spatio_spectral_intensity, SpatioSpectralMap,
};
use wga_pdc::grid::{wrap_to_zone, Grid};
use wga_pdc::jsa::{build_jsa, delta_beta_a, normalize, ArrayGeometry, JsaTensor};
use wga_pdc::material::{CouplingModel, MaterialModel};
use wga_pdc::oracle::{Boundary, Propagator};
use wga_pdc::pump::{PumpSpec, SpatialMode};
use wga_pdc::scenarios::{central_fwhm, detuned_cases, lit_channels, phase_cases, preset};
use wga_pdc::units::{nm, omega_from_wavelength, to_nm};
use wga_pdc::verify::{run_all, DEFAULT_SEED};
use wga_pdc::Complex64;

type Outcome = wga_pdc::Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn map_at(config: &RunConfig, pump_nm: f64) -> wga_pdc::Result<SpatioSpectralMap> {
    let state = config.pipeline()?.with_pump_wavelength(nm(pump_nm))?.state()?;
    spatio_spectral_intensity(&state)
}

fn within_budget(elapsed: Duration, budget_s: u64) -> (bool, String) {
    (
        elapsed <= Duration::from_secs(budget_s),
        format!("runtime {:.1} s of {budget_s} s", elapsed.as_secs_f64()),
    )
}

fn spatial_spread() -> Outcome {
    let start = Instant::now();
    let map = map_at(&preset("fig7_experiment")?, 774.9)?;
    let lit = lit_channels(&map, 0.05);
    let (fast, time) = within_budget(start.elapsed(), 120);
    Ok((
        (4..=6).contains(&lit) && fast,
        format!("{lit} channels above 5% of the peak at 774.9 nm (want 5 ± 1); {time}"),
    ))
}

fn spectral_width() -> Outcome {
    let map = map_at(&preset("fig7_experiment")?, 774.9)?;
    let width = central_fwhm(&map)?.map(to_nm);
    let ok = width.is_some_and(|w| (w - 100.0).abs() <= 30.0);
    let shown = width.map_or("none".into(), |w| format!("{w:.1} nm"));
    Ok((ok, format!("central-channel FWHM {shown} (want 100 ± 30 nm)")))
}

fn band_slice(map: &SpatioSpectralMap, spectrum: &[f64], band: (f64, f64)) -> Vec<f64> {
    map.wavelength_axis
        .iter()
        .zip(spectrum)
        .filter(|(l, _)| **l >= band.0 && **l <= band.1)
        .map(|(_, v)| *v)
        .collect()
}

fn branch_asymmetry() -> Outcome {
    let config = preset("fig8_marginals")?;
    let a = &config.analysis;
    let upper_band = (nm(a.upper_band_nm[0]), nm(a.upper_band_nm[1]));
    let lower_band = (nm(a.lower_band_nm[0]), nm(a.lower_band_nm[1]));
    let map = map_at(&config, 773.9)?;
    let upper = count_above(&spatial_marginal(&map, upper_band)?, 1.0, a.marginal_threshold);
    let lower = count_above(&spatial_marginal(&map, lower_band)?, 1.0, a.marginal_threshold);

    let spacing = to_nm(map.wavelength_axis[1] - map.wavelength_axis[0]);
    let dip = |m: &SpatioSpectralMap| band_slice(m, &m.channel_integrated(), upper_band);
    let raw = deepest_dip(&dip(&map), 0.1);
    let fine = deepest_dip(&dip(&smooth_spectral(&map, nm(2.0))?), 0.1);
    let coarse = deepest_dip(&dip(&smooth_spectral(&map, nm(10.0))?), 0.1);
    let ok = upper > lower && spacing <= 2.0 && raw >= 0.01 && fine >= 0.01 && coarse < 0.01;
    Ok((
        ok,
        format!(
            "773.9 nm: upper band {upper} channels, lower band {lower}; upper-branch dip {raw:.3} raw \
             ({spacing:.2} nm grid), {fine:.3} at 2 nm, {coarse:.3} at 10 nm"
        ),
    ))
}

fn phase_matching() -> Outcome {
    let start = Instant::now();
    let config = preset("fig9_pm_curve")?;
    let pumps: Vec<f64> = config.pump.sweep_nm.iter().map(|&l| nm(l)).collect();
    let curve = phase_matching_curve(&pumps, &config.pipeline()?, config.analysis.observable)?;
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut separations = Vec::new();
    for point in &curve {
        let (l, u) = match point.branches {
            Branches::Single(p) => (p.position, p.position),
            Branches::Pair { lower, upper } => (lower.position, upper.position),
            Branches::Missing => {
                ok = false;
                continue;
            }
        };
        let mismatch = (point.pump_wavelength * (1.0 / l + 1.0 / u) - 1.0).abs();
        worst = worst.max(mismatch);
        separations.push((to_nm(point.pump_wavelength), to_nm(u - l)));
    }
    ok &= worst <= 0.005;
    // Sweep is ordered by growing detuning from degeneracy.
    ok &= separations.windows(2).all(|w| w[1].1 > w[0].1);
    let split = separations
        .iter()
        .find(|(lp, _)| (lp - 774.5).abs() < 1e-9)
        .map(|s| s.1);
    ok &= split.is_some_and(|s| s > 0.0);
    let (fast, time) = within_budget(start.elapsed(), 600);
    let listed: Vec<String> = separations.iter().map(|(lp, s)| format!("{lp:.1}:{s:.1}")).collect();
    Ok((
        ok && fast,
        format!(
            "relative energy mismatch ≤ {:.1e}; separations (pump:nm) {}; {time}",
            worst,
            listed.join(" ")
        ),
    ))
}

fn contour_shapes() -> Outcome {
    let base = preset("fig3_pump_shaping")?;
    let mut ok = true;
    let mut notes = Vec::new();
    for case in detuned_cases(&base)? {
        let mut config = case.config.clone();
        let degenerate = 2.0 * config.pump.wavelength_nm;
        let window = [degenerate - 0.1, degenerate + 0.1];
        config.filter = Some(FilterSection {
            signal_nm: window,
            idler_nm: window,
        });
        let pipeline = config.pipeline()?;
        let state = pipeline.state()?;
        let half = 0.5 * omega_from_wavelength(nm(config.pump.wavelength_nm));
        let c0 = pipeline.material.coupling_at_omega(half)?;
        let level = pipeline.material.delta_beta_omega(half, half)? / (2.0 * c0);
        let map = gamma_k(&state)?;
        let k = state.grid().k();
        let n = k.len();
        let residual = |a: usize, b: usize| k[a].cos() + k[b].cos() - level;
        let top = map.iter().copied().fold(0.0, f64::max);
        let (mut maxima, mut off) = (0, 0);
        for a in 0..n {
            for b in 0..n {
                let v = map[a * n + b];
                if v < 0.1 * top {
                    continue;
                }
                let around = |f: &dyn Fn(usize, usize) -> f64| {
                    let mut out = Vec::with_capacity(9);
                    for da in [n - 1, 0, 1] {
                        for db in [n - 1, 0, 1] {
                            out.push(f((a + da) % n, (b + db) % n));
                        }
                    }
                    out
                };
                if around(&|x, y| map[x * n + y]).iter().any(|&w| w > v) {
                    continue;
                }
                maxima += 1;
                let r = around(&|x, y| residual(x, y));
                let crosses = r.iter().any(|&x| x <= 0.0) && r.iter().any(|&x| x >= 0.0);
                if !crosses {
                    off += 1;
                }
            }
        }
        ok &= maxima > 0 && off == 0 && state.values().stored_slabs() == 1;
        notes.push(format!(
            "{} (level {level:+.3}): {off} of {maxima} maxima off-contour",
            case.label
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn phase_engineering() -> Outcome {
    let config = preset("fig4_phase_engineering")?;
    let mut maps = Vec::new();
    for (_, c) in phase_cases(&config)? {
        maps.push(gamma_n(&c.pipeline()?.state()?)?);
    }
    let n = config.geometry.channel_count;
    let labels: Vec<i64> = (0..n as i64).map(|j| j - (n as i64 - 1) / 2).collect();
    let window = config.pump.k_window.unwrap();
    let c1 = (phase_cases(&config)?[1].1.pump.k_window.unwrap().phase[1] - window.phase[1]).round() as i64;

    let shifted = shift_map(&maps[0], n, -c1);
    let shift_error = shifted
        .iter()
        .zip(&maps[1])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let (mean0, var0) = diagonal_moments(&maps[0], &labels);
    let (_, var2) = diagonal_moments(&maps[2], &labels);

    let top = maps[0].iter().copied().fold(0.0, f64::max);
    let mut asymmetry: f64 = 0.0;
    let (mut anti, mut correlated) = (0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            let v = maps[0][a * n + b];
            asymmetry = asymmetry.max((v - maps[0][(n - 1 - a) * n + (n - 1 - b)]).abs());
            match (labels[a] * labels[b]).signum() {
                -1 => anti += v,
                1 => correlated += v,
                _ => {}
            }
        }
    }
    let baseline = mean0.abs() < 1e-9 && asymmetry <= 1e-12 * top && anti > correlated;
    let ok = shift_error <= 1e-9 && var2 > var0 && baseline;
    Ok((
        ok,
        format!(
            "shift residual {shift_error:.1e}; diagonal variance {var0:.2} -> {var2:.2}; zero phase: \
             mean {mean0:.1e}, anti-correlated mass {anti:.3} vs correlated {correlated:.3}"
        ),
    ))
}

fn oracles() -> Outcome {
    let start = Instant::now();
    let checks = run_all(DEFAULT_SEED)?;
    let (fast, time) = within_budget(start.elapsed(), 300);
    let ok = checks.iter().all(|c| c.passed())
        && checks
            .iter()
            .filter(|c| c.name != checks[3].name)
            .all(|c| c.cases >= 100);
    let listed: Vec<String> = checks
        .iter()
        .map(|c| format!("{:.1e}/{:.0e}", c.error, c.tolerance))
        .collect();
    Ok((
        ok && fast,
        format!("errors vs tolerances {}; {time}", listed.join(", ")),
    ))
}

struct RandomCase {
    state: JsaTensor,
    raw: JsaTensor,
    model: MaterialModel,
    pump: PumpSpec,
}

fn random_case(rng: &mut ChaCha8Rng) -> wga_pdc::Result<RandomCase> {
    let channels = rng.gen_range(3..14);
    let points = rng.gen_range(3..10);
    let pump_nm = rng.gen_range(774.0..775.8);
    let mut model = MaterialModel::congruent_lithium_niobate(rng.gen_range(100.0..250.0))?
        .fitted_to((nm(1549.8), nm(1549.8)), nm(774.9))?;
    if rng.gen_bool(0.5) {
        model = model.with_coupling(CouplingModel::Constant(rng.gen_range(10.0..600.0)))?;
    }
    let spatial = if rng.gen_bool(0.5) {
        let spacing = 2.0 * PI / channels as f64;
        SpatialMode::KWindow {
            center: rng.gen_range(-PI..PI),
            width: (rng.gen_range(1.01..3.0) * spacing).min(2.0 * PI),
            phase: [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ],
        }
    } else {
        let lowest = -((channels / 2) as i64);
        SpatialMode::PerChannel(
            (lowest..lowest + channels as i64)
                .filter_map(|m| match m {
                    0 => Some((0, Complex64::new(1.0, 0.0))),
                    _ if rng.gen_bool(0.5) => {
                        Some((m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                    }
                    _ => None,
                })
                .collect(),
        )
    };
    let pump = PumpSpec::new(nm(pump_nm), nm(rng.gen_range(0.05..1.5)), spatial)?;
    let d = 2.0 * pump_nm;
    let grid = Grid::pump_centered(nm(pump_nm), nm(d - 30.0), nm(d + 30.0), points, channels)?;
    let geometry = ArrayGeometry::new(rng.gen_range(0.005..0.06), channels)?;
    let raw = build_jsa(&grid, &geometry, &pump, &model)?;
    let state = normalize(raw.clone())?;
    Ok(RandomCase {
        state,
        raw,
        model,
        pump,
    })
}

fn invariants() -> Outcome {
    let cases = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut failures: Vec<String> = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let c = random_case(&mut rng)?;
        let [ms, mi, n, _] = c.raw.values().dims();

        let mut symmetric = true;
        for is in 0..ms {
            for ii in 0..mi {
                for a in 0..n {
                    for b in 0..n {
                        symmetric &= c.raw.get(is, ii, a, b) == c.raw.get(ii, is, b, a);
                    }
                }
            }
        }
        if !symmetric {
            failures.push(format!("exchange symmetry (case {case})"));
        }

        let k_total: f64 = gamma_k_weighted(&c.state, 1.0)?.iter().sum();
        let n_total: f64 = gamma_n_weighted(&c.state, 1.0)?.iter().sum();
        let parseval = (k_total - 1.0).abs().max((n_total - k_total).abs());
        worst = worst.max(parseval);
        if parseval > 1e-9 {
            failures.push(format!("Parseval {parseval:.1e} (case {case})"));
        }

        let again = normalize(c.state.clone())?;
        let drift = c
            .state
            .to_dense()
            .iter()
            .zip(again.to_dense())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(drift);
        if drift > 1e-9 {
            failures.push(format!("normalisation {drift:.1e} (case {case})"));
        }

        let (ks, ki) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let turn = 2.0 * PI * rng.gen_range(-3..=3) as f64;
        let w = omega_from_wavelength(nm(1550.0));
        let base = delta_beta_a(ks, ki, w, 0.98 * w, &c.model)?;
        let moved = delta_beta_a(ks + turn, ki - turn, w, 0.98 * w, &c.model)?;
        let mut wrap = (base - moved).abs() / (1.0 + base.abs());
        let near_edge = match c.pump.spatial() {
            SpatialMode::KWindow { center, width, .. } => (wrap_to_zone(ks - center).abs() - 0.5 * width).abs() < 1e-6,
            SpatialMode::PerChannel(_) => false,
        };
        if !near_edge {
            let (a, b) = (c.pump.bloch_amplitude(ks), c.pump.bloch_amplitude(ks + turn));
            wrap = wrap.max((a - b).norm() / (1.0 + a.norm()));
        }
        worst = worst.max(wrap);
        if wrap > 1e-9 {
            failures.push(format!("2π wrap {wrap:.1e} (case {case})"));
        }

        let size = rng.gen_range(3..30);
        let propagator = Propagator::new(
            size,
            rng.gen_range(0.0..800.0),
            if rng.gen_bool(0.5) {
                Boundary::Open
            } else {
                Boundary::Ring
            },
        );
        let column = propagator.column(rng.gen_range(0.0..0.1), rng.gen_range(0..size));
        let unitarity = (column.iter().map(|v| v.norm_sqr()).sum::<f64>() - 1.0).abs();
        worst = worst.max(unitarity);
        if unitarity > 1e-9 {
            failures.push(format!("unitarity {unitarity:.1e} (case {case})"));
        }
    }
    let detail = if failures.is_empty() {
        format!("{cases} random configurations, largest deviation {worst:.1e}")
    } else {
        format!("{} failures: {}", failures.len(), failures.join(", "))
    };
    Ok((failures.is_empty(), detail))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("degenerate spatial spread", spatial_spread),
        ("degenerate spectral width", spectral_width),
        ("branch asymmetry", branch_asymmetry),
        ("phase-matching curve", phase_matching),
        ("contour scenarios", contour_shapes),
        ("phase engineering", phase_engineering),
        ("oracle equivalences", oracles),
        ("invariant suite", invariants),
    ];
    let mut failed = Vec::new();
    for (j, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        let line = format!(
            "criterion {} {name}: {} - {detail}\n",
            j + 1,
            if passed { "PASS" } else { "FAIL" }
        );
        // Bypasses the harness capture so the lines show on success too.
        std::io::stdout().write_all(line.as_bytes()).unwrap();
        if !passed {
            failed.push(j + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
