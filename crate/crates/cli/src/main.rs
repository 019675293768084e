//! `ris-isl` — evaluate RIS-assisted THz inter-satellite links from TOML
//! scenario files: constellation geometry, analytic and Monte Carlo BER
//! sweeps, rate surfaces, and the analytic-vs-simulation agreement suite.
//!
//! Every subcommand emits CSV, to stdout or to `--out`; diagnostics go to
//! stderr. Exit codes: 0 success, 1 agreement-suite check failures,
//! 2 configuration or parse errors, 3 numerical failures, 4 I/O failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ris_isl::geometry::distance_set;
use ris_isl::output::{emit_csv, Cell, SweepResult};
use ris_isl::scenario::{
    parse_scenario, run_sweep, validation_suite, ConstellationChoice, Scenario, SweepVariable,
};
use ris_isl::Error;

#[derive(Parser)]
#[command(
    name = "ris-isl",
    version,
    about = "RIS-assisted inter-satellite link evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the inter-satellite distances of a constellation.
    Geometry {
        /// Constellation preset (starlink, iridium).
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Scenario file whose constellation to use instead of a preset.
        #[arg(long, required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// Output CSV path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario's sweep with analytic columns only.
    Ber {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario's constellation with a preset.
        #[arg(long)]
        preset: Option<String>,
    },
    /// Run a scenario's distance sweep into a rate surface.
    Rate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
    },
    /// Run a scenario's sweep with Monte Carlo columns alongside the
    /// analytic ones.
    Mc {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Override the scenario's simulation seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the scenario's trial count.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Run the analytic-vs-simulation agreement suite and print a
    /// pass/fail table to stderr.
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Geometry {
            preset,
            config,
            out,
        } => {
            let choice = match (preset, config) {
                (Some(name), _) => ConstellationChoice::Preset(name),
                (None, Some(path)) => load_scenario(&path, None)?.constellation,
                (None, None) => unreachable!("clap enforces one source"),
            };
            let spec = choice.resolve()?;
            let distances = distance_set(&spec)?;
            let mut result = SweepResult::new(vec![
                "d_intra_km".into(),
                "d_nearest_km".into(),
                "d_farthest_km".into(),
            ]);
            result.add_metadata("tool_version", env!("CARGO_PKG_VERSION"));
            result.add_metadata("constellation", choice_label(&choice));
            result.push_row(vec![
                Cell::Float(distances.d_intra_km),
                Cell::Float(distances.d_nearest_km),
                Cell::Float(distances.d_farthest_km),
            ]);
            write_result(&result, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ber {
            config,
            out,
            preset,
        } => {
            let mut scenario = load_scenario(&config, preset)?;
            require_ber_axis(&scenario, "ber")?;
            scenario.mc = None;
            write_result(&run_sweep(&scenario)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Rate {
            config,
            out,
            preset,
        } => {
            let scenario = load_scenario(&config, preset)?;
            if scenario.sweep.variable != SweepVariable::Distance {
                return Err(Error::InvalidConfig(
                    "the rate subcommand requires sweep.variable = \"distance\"".into(),
                ));
            }
            write_result(&run_sweep(&scenario)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc {
            config,
            out,
            preset,
            seed,
            trials,
        } => {
            let mut scenario = load_scenario(&config, preset)?;
            require_ber_axis(&scenario, "mc")?;
            let mut mc = scenario.mc.unwrap_or_default();
            if let Some(seed) = seed {
                mc.seed = seed;
            }
            if let Some(trials) = trials {
                mc.trials = trials;
            }
            scenario.mc = Some(mc);
            write_result(&run_sweep(&scenario)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { out, trials, seed } => {
            let report = validation_suite(trials, seed)?;
            write_result(&report.result, out.as_deref())?;
            eprintln!("analytic-vs-simulation agreement ({trials} trials, seed {seed}):");
            for check in &report.checks {
                let verdict = if !check.checkable {
                    "SKIP (tail)"
                } else if check.pass {
                    "PASS"
                } else {
                    "FAIL"
                };
                eprintln!(
                    "  {:<22} target {:.2e} at {:8.3} dB  ratio {:6.3}  {verdict}",
                    check.scenario_id, check.analytic_ber, check.pt_over_n0_db, check.ratio
                );
            }
            if report.all_passed() {
                eprintln!("all checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("some checks FAILED");
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

/// Read and parse a scenario file, optionally overriding its
/// constellation with a named preset.
fn load_scenario(path: &Path, preset: Option<String>) -> Result<Scenario, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut scenario = parse_scenario(&text)?;
    if let Some(name) = preset {
        scenario.constellation = ConstellationChoice::Preset(name);
        scenario.validate()?;
    }
    Ok(scenario)
}

fn require_ber_axis(scenario: &Scenario, command: &str) -> Result<(), Error> {
    if scenario.sweep.variable == SweepVariable::Distance {
        Err(Error::InvalidConfig(format!(
            "the {command} subcommand needs a BER sweep axis; \
             use the rate subcommand for distance sweeps"
        )))
    } else {
        Ok(())
    }
}

fn choice_label(choice: &ConstellationChoice) -> &str {
    match choice {
        ConstellationChoice::Preset(name) => name,
        ConstellationChoice::Custom(_) => "custom",
    }
}

fn write_result(result: &SweepResult, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => emit_csv(result, path),
        None => {
            print!("{}", result.to_csv_string());
            Ok(())
        }
    }
}
