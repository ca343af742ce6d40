use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use isslab::oracles::{lemma_oracles_with, DEFAULT_CASES};
use isslab::scenario::{self, builtin, builtin_names, run_scenario, write_outputs, write_outputs_at, RunStatus};
use isslab::{Error, Result};

/// Decay certificates and fading-memory bounds for 1-D parabolic problems.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve or synthesize the scenario's certificate.
    Certify {
        /// Built-in name or path to a TOML scenario.
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the scenario's problem; CSV trajectory goes beside --out.
    Simulate {
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certificate, integration and every bound check.
    Check {
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tightness of the estimate over a grid of decay rates.
    Sweep {
        scenario: String,
        /// Comma-separated decay rates.
        #[arg(long, value_delimiter = ',', required = true)]
        zeta_grid: Vec<f64>,
        /// Read the grid as fractions of the certificate's sigma.
        #[arg(long)]
        fractions: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the norm-derivative oracle suite.
    Oracles {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    ListBuiltins,
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = writeln!(stdout, "{text}");
        }
    }
    Ok(())
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Certify { scenario, out } => {
            let s = scenario::resolve(&scenario)?;
            match scenario::certify(&s) {
                Ok(resolved) => {
                    emit(&resolved.certificate, out.as_ref())?;
                    Ok(if s.expect_infeasible { 1 } else { 0 })
                }
                Err(Error::InfeasibleCertificate(msg)) => {
                    eprintln!("infeasible: {msg}");
                    Ok(if s.expect_infeasible { 0 } else { 2 })
                }
                Err(e) => Err(e),
            }
        }
        Command::Simulate { scenario, out } => {
            let s = scenario::resolve(&scenario)?;
            let trajectory = scenario::simulate(&s)?;
            emit(&trajectory.summary(), out.as_ref())?;
            if let Some(path) = out {
                let csv = path.with_file_name(format!(
                    "{}_trajectory.csv",
                    path.file_stem().unwrap_or_default().to_string_lossy()
                ));
                trajectory.write_csv(std::fs::File::create(csv)?)?;
            }
            Ok(0)
        }
        Command::Check { scenario, out } => {
            let s = scenario::resolve(&scenario)?;
            let outcome = run_scenario(&s);
            match (out, &s.output.directory) {
                (Some(path), _) => {
                    write_outputs_at(&outcome, &path)?;
                }
                (None, Some(dir)) => {
                    write_outputs(&outcome, dir.as_ref())?;
                }
                (None, None) => emit(&outcome.report, None)?,
            }
            if let Some(err) = &outcome.report.error {
                eprintln!("{}: {err}", s.name);
            }
            Ok(outcome.report.status.exit_code() as u8)
        }
        Command::Sweep {
            scenario,
            zeta_grid,
            fractions,
            out,
        } => {
            let s = scenario::resolve(&scenario)?;
            let grid = if fractions {
                let sigma = scenario::certify(&s)?.certificate.sigma;
                zeta_grid.iter().map(|f| f * sigma).collect()
            } else {
                zeta_grid
            };
            let rows = scenario::sweep_zeta(&s, &grid)?;
            emit(&rows, out.as_ref())?;
            Ok(if rows.iter().all(|r| r.violations == 0) { 0 } else { 1 })
        }
        Command::Oracles { seed, cases, out } => {
            let report = lemma_oracles_with(seed, cases);
            emit(&report, out.as_ref())?;
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::ListBuiltins => {
            for name in builtin_names() {
                let s = builtin(name).expect("registered builtin");
                println!("{name:<26} {}", s.description);
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RunStatus::ModelError.exit_code() as u8)
        }
    }
}
