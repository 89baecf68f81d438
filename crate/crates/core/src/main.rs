use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use ftangle::cli::{self, CliError, Corruption};

/// Entanglement measures for two-qubit reductions of fermionic four-qubit states.
#[derive(Parser)]
#[command(name = "ftangle", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measures, residual tangles and invariants of one state.
    Measures {
        /// w as three comma-separated complex numbers, e.g. "0.5,0.5i,0"
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Rescale (w, z) to unit norm instead of rejecting it.
        #[arg(long)]
        normalize: bool,
    },
    /// Random states as CSV rows of (concurrence, negativity, eta, r, s, entangled).
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Keep drawing until n entangled rows are collected.
        #[arg(long)]
        entangled_only: bool,
    },
    /// Closed forms against eigensolver oracles on random states.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, hide = true, default_value_t = 0.0)]
        corrupt_concurrence: f64,
    },
    /// Bures metric forms and finite-difference checks on random states.
    BuresCheck {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        eta_min: f64,
    },
    /// Local-unitary canonical form of one state.
    Canonical {
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        normalize: bool,
    },
}

fn emit<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        // a closed pipe (`| head`) is not worth reporting
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Measures { w, z, normalize } => emit(&cli::cmd_measures(&w, &z, normalize)?),
        Command::Sample { n, seed, out, entangled_only } => {
            emit(&cli::cmd_sample(n, seed, &out, entangled_only)?)
        }
        Command::Verify { n, seed, tol, corrupt_concurrence } => {
            let corruption = Corruption {
                concurrence_offset: corrupt_concurrence,
            };
            let report = cli::cmd_verify(n, seed, tol, corruption)?;
            emit(&report)?;
            if report.failures > 0 {
                return Err(CliError::Property(format!("{} of {} states failed", report.failures, report.n)));
            }
            Ok(())
        }
        Command::BuresCheck { n, seed, eta_min } => {
            let report = cli::cmd_bures_check(n, seed, eta_min)?;
            emit(&report)?;
            if report.failures > 0 {
                return Err(CliError::Property(format!("{} of {} states failed", report.failures, report.n)));
            }
            Ok(())
        }
        Command::Canonical { w, z, normalize } => emit(&cli::cmd_canonical(&w, &z, normalize)?),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
