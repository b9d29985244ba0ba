//! End-to-end runs of the command-line binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;
use wga_pdc::config::parse_config;
use wga_pdc::io::read_tensor;
use wga_pdc::scenarios::preset;

fn wga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wga-pdc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL: [&str; 6] = [
    "--set",
    "geometry.channel_count=9",
    "--set",
    "grid.points=15",
    "--set",
    "output.images=false",
];

#[test]
fn unknown_scenario_is_a_usage_error() {
    let out = wga(&["simulate", "fig6_nothing"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fig6_nothing"));
}

#[test]
fn unknown_scenario_inside_a_file_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("run.toml");
    fs::write(&file, "scenario = \"fig6\"\n").unwrap();
    assert_eq!(wga(&["simulate", path(&file)]).status.code(), Some(2));
}

#[test]
fn unknown_scenario_override_is_a_usage_error() {
    assert_eq!(wga(&["simulate", "custom", "--set", "scenario=fig6"]).status.code(), Some(2));
}

#[test]
fn bad_configuration_key_fails_with_its_line() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("run.toml");
    fs::write(&file, "[pump]\nwavelength_nm = 775.0\nspeed = 3\n").unwrap();
    let out = wga(&["simulate", path(&file), "--out", path(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("speed") && err.contains("line 3"), "{err}");
}

#[test]
fn bad_override_fails() {
    let out = wga(&["simulate", "custom", "--set", "geometry.channel_count=four"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut manifests = Vec::new();
    for run in ["a", "b"] {
        let target = dir.path().join(run);
        let mut args = vec!["simulate", "custom", "--out", path(&target)];
        args.extend(SMALL);
        let out = wga(&args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        manifests.push(fs::read_to_string(target.join("manifest.txt")).unwrap());
    }
    assert!(manifests[0].lines().count() >= 5);
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn configuration_file_reproduces_the_named_scenario() {
    let dir = TempDir::new().unwrap();
    let named = dir.path().join("named");
    let out = wga(&["simulate", "fig3_pump_shaping", "--out", path(&named)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let mut config = preset("fig3_pump_shaping").unwrap();
    config.scenario = Some("custom".into());
    let file = dir.path().join("fig3.toml");
    fs::write(&file, config.to_toml().unwrap()).unwrap();
    let from_file = dir.path().join("file");
    let out = wga(&["simulate", path(&file), "--out", path(&from_file)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    for name in ["gamma_n.csv", "gamma_k.csv", "phase_k.csv"] {
        let a = fs::read(named.join("central").join(name)).unwrap();
        let b = fs::read(from_file.join(name)).unwrap();
        assert!(a == b, "{name} differs");
    }
}

#[test]
fn overrides_and_smoothing_reach_the_outputs() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("run");
    let mut args = vec!["simulate", "custom", "--out", path(&target), "--smooth-nm", "2.5"];
    args.extend(SMALL);
    let out = wga(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(target.join("spatio_spectral_smoothed.csv").is_file());
    let marginals = fs::read_to_string(target.join("marginals.csv")).unwrap();
    let header = marginals.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.contains("central_channel_smoothed"), "{header}");
    let written = parse_config(&fs::read_to_string(target.join("config.toml")).unwrap()).unwrap();
    assert_eq!(written.geometry.channel_count, 9);
    assert_eq!(written.grid.points, 15);
    assert_eq!(written.smoothing_nm, Some(2.5));
}

#[test]
fn written_configuration_round_trips() {
    for name in wga_pdc::scenarios::SCENARIOS {
        let config = preset(name).unwrap();
        assert_eq!(parse_config(&config.to_toml().unwrap()).unwrap(), config, "{name}");
    }
}

#[test]
fn exported_tensor_reads_back() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("state.jsa");
    let mut args = vec!["export-tensor", path(&file)];
    args.extend(&SMALL[..4]);
    let out = wga(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let state = read_tensor(fs::File::open(&file).unwrap()).unwrap();
    assert_eq!(state.grid().channel_count(), 9);
    assert_eq!(state.grid().omega_s().len(), 15);
    assert!((state.power() - 1.0).abs() < 1e-12);
}

#[test]
fn verify_passes() {
    let out = wga(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8_lossy(&out.stdout);
    assert_eq!(table.matches("PASS").count(), 4, "{table}");
}
