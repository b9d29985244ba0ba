use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use wga_pdc::config::RunConfig;
use wga_pdc::io::write_tensor;
use wga_pdc::{scenarios, verify, Error};

#[derive(Parser)]
#[command(
    name = "wga-pdc",
    version,
    about = "Photon-pair generation in nonlinear waveguide arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario or a TOML configuration file.
    Simulate {
        /// Scenario name or path to a configuration file.
        target: String,
        /// Output directory (default: `output.dir` of the configuration).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override one configuration value, e.g. `--set geometry.channel_count=51`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Detector resolution applied to spatio-spectral maps, nm FWHM.
        #[arg(long, value_name = "NM")]
        smooth_nm: Option<f64>,
    },
    /// Compare the fast paths with the reference implementations.
    #[command(hide = true)]
    Verify {
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
    /// Write the normalised amplitude tensor of a configuration.
    ExportTensor {
        path: PathBuf,
        /// Scenario name or configuration file.
        #[arg(long, default_value = "custom")]
        config: String,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

fn load(target: &str, sets: &[String]) -> Result<RunConfig> {
    let mut config = if scenarios::SCENARIOS.contains(&target) {
        scenarios::preset(target)?
    } else if Path::new(target).is_file() {
        let text = fs::read_to_string(target).with_context(|| format!("reading {target}"))?;
        scenarios::config_from_text(&text).with_context(|| format!("in {target}"))?
    } else {
        return Err(Error::Usage(format!(
            "`{target}` is neither a scenario ({}) nor a configuration file",
            scenarios::SCENARIOS.join(", ")
        ))
        .into());
    };
    for assignment in sets {
        config = config.with_override(assignment)?;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate {
            target,
            out,
            set,
            smooth_nm,
        } => {
            let mut config = load(&target, &set)?;
            if smooth_nm.is_some() {
                config.smoothing_nm = smooth_nm;
                config.validate()?;
            }
            let dir = out.unwrap_or_else(|| config.output.dir.clone());
            let report = scenarios::run_scenario(&config, &dir)?;
            for line in &report.summary {
                println!("{line}");
            }
            println!(
                "{}: wrote {} files to {}",
                report.scenario,
                report.files.len(),
                report.out_dir.display()
            );
            Ok(true)
        }
        Command::Verify { seed } => {
            let checks = verify::run_all(seed)?;
            println!(
                "{:<56} {:>5} {:>11} {:>9}  result",
                "check", "cases", "max error", "tolerance"
            );
            for c in &checks {
                println!(
                    "{:<56} {:>5} {:>11.3e} {:>9.0e}  {}",
                    c.name,
                    c.cases,
                    c.error,
                    c.tolerance,
                    if c.passed() { "PASS" } else { "FAIL" }
                );
            }
            Ok(checks.iter().all(verify::Check::passed))
        }
        Command::ExportTensor { path, config, set } => {
            let config = load(&config, &set)?;
            let state = config.pipeline()?.state()?;
            let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            write_tensor(&state, BufWriter::new(file))?;
            println!(
                "wrote {} ({} of {} frequency slabs stored)",
                path.display(),
                state.values().stored_slabs(),
                state.grid().omega_s().len() * state.grid().omega_i().len()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::Usage(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
