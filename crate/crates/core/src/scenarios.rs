//! Named scenarios and the runner that turns a configuration into CSV grids,
//! images and a manifest.
//!
//! Every scenario starts from a preset configuration (see [`preset`]); a
//! configuration file or `--set` overrides are laid on top of it. Output is
//! written below one directory and listed in `manifest.txt`.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{self as stdio, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{count_above, diagonal_moments, find_branches, fwhm, shift_map, Branches};
use crate::config::{FilterSection, FitTarget, GridSection, KWindowSection, OutputSection, RunConfig};
use crate::correlations::{
    correlation_maps, phase_matching_curve, smooth_spectral, spatial_marginal, spatio_spectral_intensity,
    spectral_marginal, CorrelationMaps, SpatioSpectralMap,
};
use crate::error::{Error, Result};
use crate::io::csv::{self, number, Axis};
use crate::io::image::{write_pixmap, write_sidecar, Palette};
use crate::io::manifest::MANIFEST_NAME;
use crate::io::{write_manifest, write_tensor};
use crate::jsa::{delta_beta_a, phase_match_factor, JsaTensor};
use crate::material::MaterialModel;
use crate::units::{nm, omega_from_wavelength, partner_wavelength, to_nm};

pub const SCENARIOS: [&str; 9] = [
    "fig2_contours",
    "fig3_pump_shaping",
    "fig4_phase_engineering",
    "fig5_filtered",
    "fig7_experiment",
    "fig8_marginals",
    "fig9_pm_curve",
    "fig10_near_degenerate",
    "custom",
];

/// Linear and quadratic pump phase coefficients used by the phase
/// engineering scenario, added to the configured window phase.
pub const LINEAR_PHASE: f64 = 3.0;
pub const QUADRATIC_PHASE: f64 = 4.0;

pub fn check_scenario_name(name: &str) -> Result<()> {
    if SCENARIOS.contains(&name) {
        Ok(())
    } else {
        Err(Error::Usage(format!(
            "unknown scenario `{name}`; expected one of {}",
            SCENARIOS.join(", ")
        )))
    }
}

fn near_degenerate_block(c: &mut RunConfig) {
    c.material.coupling_constant_per_m = Some(400.0);
    c.material.fit_qpm = Some(FitTarget {
        signal_nm: 1550.1,
        idler_nm: 1550.1,
        pump_nm: 775.05,
    });
    c.geometry.channel_count = 51;
    c.pump.wavelength_nm = 775.05;
    c.pump.fwhm_nm = 0.5;
}

/// Base configuration of a named scenario.
pub fn preset(name: &str) -> Result<RunConfig> {
    check_scenario_name(name)?;
    let mut c = RunConfig::default();
    match name {
        "fig3_pump_shaping" => {
            near_degenerate_block(&mut c);
            c.grid = GridSection {
                lambda_min_nm: 1545.1,
                lambda_max_nm: 1555.1,
                points: 41,
            };
        }
        "fig10_near_degenerate" => {
            near_degenerate_block(&mut c);
            c.grid = GridSection {
                lambda_min_nm: 1350.0,
                lambda_max_nm: 1800.0,
                points: 201,
            };
        }
        "fig4_phase_engineering" => {
            c.geometry.channel_count = 49;
            c.material.coupling_scale = 0.13;
            c.material.fit_qpm = Some(FitTarget {
                signal_nm: 1550.0,
                idler_nm: 1550.0,
                pump_nm: 775.0,
            });
            c.pump.wavelength_nm = 775.0;
            c.pump.k_window = Some(KWindowSection {
                center: 0.0,
                width: PI / 2.0,
                phase: [0.0; 3],
            });
            c.grid = GridSection {
                lambda_min_nm: 1545.0,
                lambda_max_nm: 1555.0,
                points: 41,
            };
            c.filter = Some(FilterSection {
                signal_nm: [1549.9, 1550.1],
                idler_nm: [1549.9, 1550.1],
            });
        }
        "fig5_filtered" => {
            let pump_nm = 1.0 / (1.0 / 1400.0 + 1.0 / 1600.0);
            c.material.coupling_scale = 0.13;
            c.material.fit_qpm = Some(FitTarget {
                signal_nm: 1400.0,
                idler_nm: 1600.0,
                pump_nm,
            });
            c.pump.wavelength_nm = pump_nm;
            c.grid = GridSection {
                lambda_min_nm: 1380.0,
                lambda_max_nm: 1620.0,
                points: 481,
            };
            c.filter = Some(FilterSection {
                signal_nm: [1399.0, 1401.0],
                idler_nm: [1599.0, 1601.0],
            });
        }
        _ => {}
    }
    c.scenario = Some(name.to_string());
    Ok(c)
}

/// Configuration from the text of a file: the fragment is laid over the
/// preset of the scenario it names, or over the defaults for `custom`.
pub fn config_from_text(text: &str) -> Result<RunConfig> {
    let named = toml::from_str::<RunConfig>(text)
        .map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?
        .scenario;
    preset(named.as_deref().unwrap_or("custom"))?.overlay(text)
}

/// Pump wavelength (m) at which the spectral mismatch at degeneracy equals
/// `target` (1/m), searched outward from `guess`.
pub fn pump_for_mismatch(model: &MaterialModel, target: f64, guess: f64) -> Result<f64> {
    let f = |lp: f64| -> Result<f64> {
        let half = 0.5 * omega_from_wavelength(lp);
        Ok(model.delta_beta_omega(half, half)? - target)
    };
    let f0 = f(guess)?;
    if f0 == 0.0 {
        return Ok(guess);
    }
    let mut bracket = None;
    let mut step = nm(0.05);
    while step <= nm(40.0) {
        for candidate in [guess - step, guess + step] {
            if f(candidate)?.signum() != f0.signum() {
                bracket = Some(candidate);
                break;
            }
        }
        if bracket.is_some() {
            break;
        }
        step *= 2.0;
    }
    let other = bracket
        .ok_or_else(|| Error::Precondition(format!("no pump wavelength within 40 nm gives mismatch {target} 1/m")))?;
    let (mut lo, mut hi) = if other < guess { (other, guess) } else { (guess, other) };
    let f_lo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)?.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One of the three pump settings of the near-degenerate scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct DetunedCase {
    pub label: &'static str,
    /// Degenerate-point spectral mismatch the pump was tuned to (1/m).
    pub target_mismatch: f64,
    pub config: RunConfig,
}

/// Same configuration with the pump moved to `pump_nm`; the grid window
/// moves with the degenerate wavelength.
pub fn retuned(config: &RunConfig, pump_nm: f64) -> RunConfig {
    let mut c = config.clone();
    let shift = 2.0 * (pump_nm - config.pump.wavelength_nm);
    c.pump.wavelength_nm = pump_nm;
    c.grid.lambda_min_nm += shift;
    c.grid.lambda_max_nm += shift;
    c
}

/// Pumps whose degenerate mismatch is `−2C`, the configured value and `+2C`,
/// with `C` the coupling at twice the configured pump wavelength. The
/// middle case is the configuration itself.
pub fn detuned_cases(config: &RunConfig) -> Result<Vec<DetunedCase>> {
    let model = config.material_model()?;
    let pump = nm(config.pump.wavelength_nm);
    let coupling = model.coupling(2.0 * pump)?;
    let half = 0.5 * omega_from_wavelength(pump);
    let own = model.delta_beta_omega(half, half)?;
    let mut cases = Vec::with_capacity(3);
    for (label, target) in [("below", -2.0 * coupling), ("central", own), ("above", 2.0 * coupling)] {
        let config = if label == "central" {
            config.clone()
        } else {
            retuned(config, to_nm(pump_for_mismatch(&model, target, pump)?))
        };
        cases.push(DetunedCase {
            label,
            target_mismatch: target,
            config,
        });
    }
    Ok(cases)
}

/// Files written by one run, relative to the output directory.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

struct Artifacts<'a> {
    root: PathBuf,
    formats: &'a OutputSection,
    files: Vec<PathBuf>,
}

impl<'a> Artifacts<'a> {
    fn create(root: &Path, formats: &'a OutputSection) -> Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            formats,
            files: Vec::new(),
        })
    }

    fn emit(&mut self, rel: &str, write: impl FnOnce(&mut BufWriter<File>) -> stdio::Result<()>) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut out = BufWriter::new(File::create(&path)?);
        write(&mut out)?;
        out.flush()?;
        self.files.push(PathBuf::from(rel));
        Ok(())
    }

    fn text(&mut self, rel: &str, content: &str) -> Result<()> {
        self.emit(rel, |w| w.write_all(content.as_bytes()))
    }

    fn grid(&mut self, rel: &str, quantity: &str, unit: &str, rows: &Axis, cols: &Axis, values: &[f64]) -> Result<()> {
        if !self.formats.csv {
            return Ok(());
        }
        self.emit(rel, |w| csv::write_grid(w, quantity, unit, rows, cols, values))
    }

    fn table(&mut self, rel: &str, comment: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if !self.formats.csv {
            return Ok(());
        }
        self.emit(rel, |w| csv::write_table(w, comment, header, rows))
    }

    fn image(
        &mut self,
        rel: &str,
        (height, width): (usize, usize),
        values: &[f64],
        rows: (&str, f64, f64),
        cols: (&str, f64, f64),
    ) -> Result<()> {
        if !self.formats.images {
            return Ok(());
        }
        let mut max = 0.0;
        self.emit(rel, |w| {
            max = write_pixmap(w, width, height, values, Palette::Heat)?;
            Ok(())
        })?;
        let name = Path::new(rel)
            .file_name()
            .map_or(rel.into(), |f| f.to_string_lossy().into_owned());
        self.emit(&format!("{rel}.txt"), |w| write_sidecar(w, &name, rows, cols, max))
    }

    fn tensor(&mut self, rel: &str, jsa: &JsaTensor) -> Result<()> {
        if !self.formats.tensor {
            return Ok(());
        }
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        write_tensor(jsa, BufWriter::new(File::create(&path)?))?;
        self.files.push(PathBuf::from(rel));
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<PathBuf>> {
        write_manifest(&self.root, &self.files)?;
        self.files.push(PathBuf::from(MANIFEST_NAME));
        Ok(self.files)
    }
}

/// Runs the scenario named in `config` (default `custom`) and writes its
/// outputs below `out_dir`.
pub fn run_scenario(config: &RunConfig, out_dir: &Path) -> Result<RunReport> {
    let name = config.scenario.clone().unwrap_or_else(|| "custom".into());
    check_scenario_name(&name)?;
    config.validate()?;
    let mut out = Artifacts::create(out_dir, &config.output)?;
    out.text("config.toml", &config.to_toml()?)?;
    let summary = match name.as_str() {
        "fig2_contours" => fig2(config, &mut out)?,
        "fig3_pump_shaping" => near_degenerate(config, &mut out, false)?,
        "fig10_near_degenerate" => near_degenerate(config, &mut out, true)?,
        "fig4_phase_engineering" => fig4(config, &mut out)?,
        "fig5_filtered" => fig5(config, &mut out)?,
        "fig7_experiment" => fig7(config, &mut out)?,
        "fig8_marginals" => fig8(config, &mut out)?,
        "fig9_pm_curve" => fig9(config, &mut out)?,
        _ => custom(config, &mut out)?,
    };
    let mut text = summary.join("\n");
    text.push('\n');
    out.text("summary.txt", &text)?;
    let files = out.finish()?;
    Ok(RunReport {
        scenario: name,
        out_dir: out_dir.to_path_buf(),
        files,
        summary,
    })
}

fn k_range(grid: &crate::grid::Grid) -> (f64, f64) {
    let k = grid.k();
    (k[0], k[k.len() - 1])
}

fn write_correlations(out: &mut Artifacts, prefix: &str, jsa: &JsaTensor) -> Result<CorrelationMaps> {
    let maps = correlation_maps(jsa)?;
    let grid = jsa.grid();
    let n = grid.channel_count();
    let (k0, k1) = k_range(grid);
    let channels = &maps.channel_axis;
    let (c0, c1) = (channels[0] as f64, channels[n - 1] as f64);
    let ks = Axis::real("k_s", "rad", grid.k());
    let ki = Axis::real("k_i", "rad", grid.k());
    let ns = Axis::channels("n_s", channels);
    let ni = Axis::channels("n_i", channels);
    out.grid(
        &format!("{prefix}gamma_k.csv"),
        "gamma_k",
        "probability per momentum cell",
        &ks,
        &ki,
        &maps.gamma_k,
    )?;
    out.grid(
        &format!("{prefix}gamma_n.csv"),
        "gamma_n",
        "probability per channel pair",
        &ns,
        &ni,
        &maps.gamma_n,
    )?;
    out.grid(
        &format!("{prefix}phase_k.csv"),
        "phase_k",
        "rad",
        &ks,
        &ki,
        &maps.phase_k,
    )?;
    out.image(
        &format!("{prefix}gamma_k.ppm"),
        (n, n),
        &maps.gamma_k,
        ("k_s [rad]", k0, k1),
        ("k_i [rad]", k0, k1),
    )?;
    out.image(
        &format!("{prefix}gamma_n.ppm"),
        (n, n),
        &maps.gamma_n,
        ("n_s", c0, c1),
        ("n_i", c0, c1),
    )?;
    Ok(maps)
}

fn write_map(out: &mut Artifacts, stem: &str, map: &SpatioSpectralMap) -> Result<()> {
    let wl: Vec<f64> = map.wavelength_axis.iter().map(|&l| to_nm(l)).collect();
    let rows = Axis::channels("n", &map.channel_axis);
    let cols = Axis::real("wavelength", "nm", &wl);
    out.grid(
        &format!("{stem}.csv"),
        "single-photon intensity",
        "mean photons per channel and wavelength bin",
        &rows,
        &cols,
        &map.intensity,
    )?;
    let n = map.channel_axis.len();
    out.image(
        &format!("{stem}.ppm"),
        (n, wl.len()),
        &map.intensity,
        ("n", map.channel_axis[0] as f64, map.channel_axis[n - 1] as f64),
        ("wavelength [nm]", wl[0], wl[wl.len() - 1]),
    )
}

fn write_spectral(
    out: &mut Artifacts,
    prefix: &str,
    map: &SpatioSpectralMap,
    smoothing_nm: Option<f64>,
) -> Result<Option<SpatioSpectralMap>> {
    write_map(out, &format!("{prefix}spatio_spectral"), map)?;
    let mut header = vec!["wavelength_nm", "central_channel", "channel_integrated"];
    let mut columns = vec![spectral_marginal(map, 0)?, map.channel_integrated()];
    let smoothed = match smoothing_nm {
        Some(res) => {
            let s = smooth_spectral(map, nm(res))?;
            write_map(out, &format!("{prefix}spatio_spectral_smoothed"), &s)?;
            header.extend(["central_channel_smoothed", "channel_integrated_smoothed"]);
            columns.push(spectral_marginal(&s, 0)?);
            columns.push(s.channel_integrated());
            Some(s)
        }
        None => None,
    };
    let rows: Vec<Vec<String>> = map
        .wavelength_axis
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let mut row = vec![number(to_nm(l))];
            row.extend(columns.iter().map(|c| number(c[j])));
            row
        })
        .collect();
    out.table(
        &format!("{prefix}marginals.csv"),
        "spectra in mean photons per wavelength bin",
        &header,
        &rows,
    )?;
    Ok(smoothed)
}

/// Channels whose brightest pixel reaches `fraction` of the map maximum.
pub fn lit_channels(map: &SpatioSpectralMap, fraction: f64) -> usize {
    let peaks: Vec<f64> = (0..map.channel_axis.len())
        .map(|r| map.row(r).iter().copied().fold(0.0, f64::max))
        .collect();
    let top = peaks.iter().copied().fold(0.0, f64::max);
    count_above(&peaks, top, fraction)
}

/// Wavelength FWHM (m) of the central-channel spectrum.
pub fn central_fwhm(map: &SpatioSpectralMap) -> Result<Option<f64>> {
    Ok(fwhm(&map.wavelength_axis, &spectral_marginal(map, 0)?))
}

fn describe_branches(branches: &Branches) -> String {
    match branches {
        Branches::Single(p) => format!("single branch at {:.2} nm", to_nm(p.position)),
        Branches::Pair { lower, upper } => format!(
            "branches at {:.2} nm and {:.2} nm",
            to_nm(lower.position),
            to_nm(upper.position)
        ),
        Branches::Missing => "no branch found".into(),
    }
}

fn describe_map(config: &RunConfig, map: &SpatioSpectralMap, pump_nm: f64) -> Result<Vec<String>> {
    let a = &config.analysis;
    let spectrum = a.observable.spectrum(map)?;
    let width = central_fwhm(map)?.map_or("n/a".into(), |w| format!("{:.1} nm", to_nm(w)));
    Ok(vec![
        format!(
            "channels above {}% of the map peak: {}",
            a.map_threshold * 100.0,
            lit_channels(map, a.map_threshold)
        ),
        format!("central-channel FWHM: {width}"),
        describe_branches(&find_branches(&map.wavelength_axis, &spectrum, nm(2.0 * pump_nm))),
    ])
}

fn custom(config: &RunConfig, out: &mut Artifacts) -> Result<Vec<String>> {
    let state = config.pipeline()?.state()?;
    write_correlations(out, "", &state)?;
    let map = spatio_spectral_intensity(&state)?;
    write_spectral(out, "", &map, config.smoothing_nm)?;
    out.tensor("state.jsa", &state)?;
    let mut summary = vec![format!(
        "pump {:.4} nm, {} channels, {} stored frequency slabs",
        config.pump.wavelength_nm,
        config.geometry.channel_count,
        state.values().stored_slabs()
    )];
    summary.extend(describe_map(config, &map, config.pump.wavelength_nm)?);
    Ok(summary)
}

fn fig2(config: &RunConfig, out: &mut Artifacts) -> Result<Vec<String>> {
    let pipeline = config.pipeline()?;
    let model = &pipeline.material;
    let grid = pipeline.grid()?;
    let omegas = grid.omega_s();
    let wl: Vec<f64> = omegas
        .iter()
        .map(|&w| to_nm(crate::units::wavelength_from_omega(w)))
        .collect();
    let spectral: Vec<f64> = omegas
        .par_iter()
        .map(|&ws| {
            omegas
                .iter()
                .map(|&wi| model.delta_beta_omega(ws, wi))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .concat();
    out.grid(
        "delta_beta_omega.csv",
        "spectral phase mismatch",
        "1/m",
        &Axis::real("lambda_s", "nm", &wl),
        &Axis::real("lambda_i", "nm", &wl),
        &spectral,
    )?;

    let pump = pipeline.pump.central_wavelength();
    let n = grid.channel_count();
    let k = grid.k();
    let (k0, k1) = k_range(&grid);
    let length = pipeline.geometry.length;
    let mut summary = Vec::new();
    for (label, signal) in [
        ("signal_short", nm(1450.0)),
        ("degenerate", 2.0 * pump),
        ("signal_long", nm(1650.0)),
    ] {
        let idler = partner_wavelength(pump, signal);
        let (ws, wi) = (omega_from_wavelength(signal), omega_from_wavelength(idler));
        let dbw = model.delta_beta_omega(ws, wi)?;
        let mut array = Vec::with_capacity(n * n);
        for &a in k {
            for &b in k {
                array.push(delta_beta_a(a, b, ws, wi, model)?);
            }
        }
        let pm: Vec<f64> = array
            .iter()
            .map(|&d| phase_match_factor(dbw + d, length).norm_sqr())
            .collect();
        let ks = Axis::real("k_s", "rad", k);
        let ki = Axis::real("k_i", "rad", k);
        out.grid(
            &format!("delta_beta_a_{label}.csv"),
            "array phase mismatch",
            "1/m",
            &ks,
            &ki,
            &array,
        )?;
        out.grid(
            &format!("phase_matching_{label}.csv"),
            "phase-matching intensity",
            "1",
            &ks,
            &ki,
            &pm,
        )?;
        out.image(
            &format!("phase_matching_{label}.ppm"),
            (n, n),
            &pm,
            ("k_s [rad]", k0, k1),
            ("k_i [rad]", k0, k1),
        )?;
        summary.push(format!(
            "{label}: signal {:.2} nm, idler {:.2} nm, spectral mismatch {:.3} 1/m, coupling {:.2}/{:.2} 1/m",
            to_nm(signal),
            to_nm(idler),
            dbw,
            model.coupling(signal)?,
            model.coupling(idler)?
        ));
    }
    Ok(summary)
}

/// Momentum-summed pair intensity over the frequency grid, rows `ωs`.
pub fn joint_spectrum(jsa: &JsaTensor) -> Vec<f64> {
    let [ms, mi, ..] = jsa.values().dims();
    let measure = jsa.grid().cell_measure();
    let mut out = vec![0.0; ms * mi];
    for (is, ii, slab) in jsa.values().iter_slabs() {
        out[is * mi + ii] = slab.iter().map(|v| v.norm_sqr()).sum::<f64>() * measure;
    }
    out
}

fn write_joint_spectrum(out: &mut Artifacts, prefix: &str, jsa: &JsaTensor) -> Result<()> {
    let grid = jsa.grid();
    let wl = |axis: &[f64]| -> Vec<f64> {
        axis.iter()
            .map(|&w| to_nm(crate::units::wavelength_from_omega(w)))
            .collect()
    };
    let (ws, wi) = (wl(grid.omega_s()), wl(grid.omega_i()));
    let values = joint_spectrum(jsa);
    out.grid(
        &format!("{prefix}joint_spectrum.csv"),
        "pair intensity summed over momentum",
        "probability per frequency cell",
        &Axis::real("lambda_s", "nm", &ws),
        &Axis::real("lambda_i", "nm", &wi),
        &values,
    )?;
    out.image(
        &format!("{prefix}joint_spectrum.ppm"),
        (ws.len(), wi.len()),
        &values,
        ("lambda_s [nm]", ws[0], ws[ws.len() - 1]),
        ("lambda_i [nm]", wi[0], wi[wi.len() - 1]),
    )
}

fn near_degenerate(config: &RunConfig, out: &mut Artifacts, broad: bool) -> Result<Vec<String>> {
    let model = config.material_model()?;
    let coupling = model.coupling(nm(2.0 * config.pump.wavelength_nm))?;
    let mut summary = Vec::new();
    for case in detuned_cases(config)? {
        let c = &case.config;
        let state = c.pipeline()?.state()?;
        let prefix = format!("{}/", case.label);
        write_correlations(out, &prefix, &state)?;
        if broad {
            write_joint_spectrum(out, &prefix, &state)?;
            let map = spatio_spectral_intensity(&state)?;
            write_spectral(out, &prefix, &map, c.smoothing_nm)?;
        }
        summary.push(format!(
            "{}: pump {:.4} nm, degenerate spectral mismatch {:.1} 1/m, contour cos(ks)+cos(ki) = {:.4}",
            case.label,
            c.pump.wavelength_nm,
            case.target_mismatch,
            case.target_mismatch / (2.0 * coupling)
        ));
    }
    if !broad {
        for (label, center) in [("k0", 0.0), ("k_half_pi", PI / 2.0), ("k_pi", PI)] {
            let mut c = config.clone();
            c.pump.channels = None;
            c.pump.k_window = Some(KWindowSection {
                center,
                width: PI / 2.0,
                phase: [0.0; 3],
            });
            let state = c.pipeline()?.state()?;
            write_correlations(out, &format!("central_window_{label}/"), &state)?;
            summary.push(format!(
                "central_window_{label}: pump window of width pi/2 centred at {center:.4} rad"
            ));
        }
    }
    Ok(summary)
}

/// Pump phase variants of the phase engineering scenario.
pub fn phase_cases(config: &RunConfig) -> Result<Vec<(&'static str, RunConfig)>> {
    let window = config
        .pump
        .k_window
        .ok_or_else(|| Error::Config("[pump] the phase engineering scenario needs a k_window pump".into()))?;
    let variant = |d1: f64, d2: f64| {
        let mut c = config.clone();
        let mut w = window;
        w.phase[1] += d1;
        w.phase[2] += d2;
        c.pump.k_window = Some(w);
        c
    };
    Ok(vec![
        ("zero", config.clone()),
        ("linear", variant(LINEAR_PHASE, 0.0)),
        ("quadratic", variant(0.0, QUADRATIC_PHASE)),
    ])
}

fn fig4(config: &RunConfig, out: &mut Artifacts) -> Result<Vec<String>> {
    let mut summary = Vec::new();
    let mut maps = Vec::new();
    for (label, c) in phase_cases(config)? {
        let state = c.pipeline()?.state()?;
        let m = write_correlations(out, &format!("{label}/"), &state)?;
        let (mean, var) = diagonal_moments(&m.gamma_n, &m.channel_axis);
        summary.push(format!(
            "{label}: gamma_n diagonal mean {mean:.4}, diagonal variance {var:.4}"
        ));
        maps.push(m);
    }
    let n = maps[0].channel_axis.len();
    let shift = -(LINEAR_PHASE.round() as i64);
    let shifted = shift_map(&maps[0].gamma_n, n, shift);
    let residual = shifted
        .iter()
        .zip(&maps[1].gamma_n)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    summary.push(format!(
        "linear phase: gamma_n equals the zero-phase map shifted by {shift} channels to {residual:.2e}"
    ));
    Ok(summary)
}

fn fig5(config: &RunConfig, out: &mut Artifacts) -> Result<Vec<String>> {
    let pipeline = config.pipeline()?;
    let state = pipeline.state()?;
    write_correlations(out, "", &state)?;
    let mut open = pipeline.clone();
    open.filter = None;
    write_joint_spectrum(out, "unfiltered_", &open.state()?)?;
    out.tensor("state.jsa", &state)?;
    Ok(vec![format!(
        "pump {:.4} nm; the filter passes {} frequency slabs",
        config.pump.wavelength_nm,
        state.values().stored_slabs()
    )])
}

fn sweep_label(pump_nm: f64) -> String {
    format!("pump_{pump_nm:.2}nm")
}

fn sweep_maps(config: &RunConfig) -> Result<Vec<(f64, SpatioSpectralMap)>> {
    let pipeline = config.pipeline()?;
    config
        .pump
        .sweep_nm
        .par_iter()
        .map(|&lp| {
            let state = pipeline.with_pump_wavelength(nm(lp))?.state()?;
            Ok((lp, spatio_spectral_intensity(&state)?))
        })
        .collect()
}

fn fig7(config: &RunConfig, out: &mut Artifacts) -> Result<Vec<String>> {
    let mut summary = Vec::new();
    for (lp, map) in sweep_maps(config)? {
        let label = sweep_label(lp);
        write_spectral(out, &format!("{label}/"), &map, config.smoothing_nm)?;
        for line in describe_map(config, &map, lp)? {
            summary.push(format!("{label}: {line}"));
        }
    }
    Ok(summary)
}

fn fig8(config: &RunConfig, out: &mut Artifacts) -> Result<Vec<String>> {
    let a = &config.analysis;
    let upper_band = (nm(a.upper_band_nm[0]), nm(a.upper_band_nm[1]));
    let lower_band = (nm(a.lower_band_nm[0]), nm(a.lower_band_nm[1]));
    let maps = sweep_maps(config)?;
    let channels = maps[0].1.channel_axis.clone();
    let mut header = vec!["channel".to_string()];
    let mut columns = Vec::new();
    let mut summary = Vec::new();
    for (lp, map) in &maps {
        let upper = spatial_marginal(map, upper_band)?;
        let lower = spatial_marginal(map, lower_band)?;
        summary.push(format!(
            "{}: channels above {}% of the central channel: upper band {}, lower band {}",
            sweep_label(*lp),
            a.marginal_threshold * 100.0,
            count_above(&upper, 1.0, a.marginal_threshold),
            count_above(&lower, 1.0, a.marginal_threshold)
        ));
        header.push(format!("upper_{lp:.2}nm"));
        header.push(format!("lower_{lp:.2}nm"));
        columns.push(upper);
        columns.push(lower);
    }
    let rows: Vec<Vec<String>> = channels
        .iter()
        .enumerate()
        .map(|(r, ch)| {
            let mut row = vec![ch.to_string()];
            row.extend(columns.iter().map(|c| number(c[r])));
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    out.table(
        "spatial_marginals.csv",
        &format!(
            "band-integrated channel profiles relative to channel 0; upper band {:?} nm, lower band {:?} nm",
            a.upper_band_nm, a.lower_band_nm
        ),
        &header,
        &rows,
    )?;
    Ok(summary)
}

fn fig9(config: &RunConfig, out: &mut Artifacts) -> Result<Vec<String>> {
    let pumps: Vec<f64> = config.pump.sweep_nm.iter().map(|&l| nm(l)).collect();
    let curve = phase_matching_curve(&pumps, &config.pipeline()?, config.analysis.observable)?;
    let opt = |v: Option<f64>| v.map_or("nan".into(), |x| number(to_nm(x)));
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for point in &curve {
        let lp = to_nm(point.pump_wavelength);
        let (kind, lower, upper) = match point.branches {
            Branches::Single(p) => ("single", Some(p), Some(p)),
            Branches::Pair { lower, upper } => ("pair", Some(lower), Some(upper)),
            Branches::Missing => ("missing", None, None),
        };
        let energy = match (lower, upper) {
            (Some(l), Some(u)) => number(point.pump_wavelength * (1.0 / l.position + 1.0 / u.position) - 1.0),
            _ => "nan".into(),
        };
        rows.push(vec![
            number(lp),
            kind.to_string(),
            opt(lower.map(|p| p.position)),
            opt(upper.map(|p| p.position)),
            opt(lower.and_then(|p| p.fwhm)),
            opt(upper.and_then(|p| p.fwhm)),
            opt(point.branches.separation()),
            energy,
        ]);
        summary.push(format!("pump {lp:.2} nm: {}", describe_branches(&point.branches)));
    }
    out.table(
        "pm_curve.csv",
        &format!("branch peaks of the {:?} spectrum", config.analysis.observable),
        &[
            "pump_nm",
            "branches",
            "lower_peak_nm",
            "upper_peak_nm",
            "lower_fwhm_nm",
            "upper_fwhm_nm",
            "separation_nm",
            "energy_mismatch",
        ],
        &rows,
    )?;
    Ok(summary)
}
