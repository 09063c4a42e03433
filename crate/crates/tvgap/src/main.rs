use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tvgap::report::to_text;
use tvgap::{run, Command, Options, EXIT_CERTIFICATE};

/// Robust stabilization of finite-horizon linear time-varying systems.
#[derive(Debug, Parser)]
#[command(name = "tvgap", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Horizon override for fir and state_space inputs.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Tolerance for the numerical certificates in the report.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Include wall-clock timings (reports are then no longer reproducible).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Normalized coprime factorization and its residuals.
    Factorize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Stability margins, profile, Corona value and row radius.
    Margin {
        #[arg(long)]
        input: PathBuf,
    },
    /// Time-varying gap between two plants.
    Gap {
        #[arg(long)]
        plant_a: PathBuf,
        #[arg(long)]
        plant_b: PathBuf,
    },
    /// Optimal Youla parameter, robust controller and certificates.
    Synthesize {
        #[arg(long)]
        input: PathBuf,
    },
    /// Corona criterion for the normalized right factors.
    Corona {
        #[arg(long)]
        input: PathBuf,
    },
    /// Randomized property suite.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::Factorize { input } => Command::Factorize { input },
        Sub::Margin { input } => Command::Margin { input },
        Sub::Gap { plant_a, plant_b } => Command::Gap { plant_a, plant_b },
        Sub::Synthesize { input } => Command::Synthesize { input },
        Sub::Corona { input } => Command::Corona { input },
        Sub::Selftest => Command::Selftest,
    };
    let opts = Options {
        horizon: cli.common.horizon,
        tol: cli.common.tol,
        seed: cli.common.seed,
        timings: cli.common.timings,
    };
    let outcome = match run(&command, &opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("tvgap: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let text = to_text(&outcome.report);
    match &cli.common.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("tvgap: {}: {e}", path.display());
                return ExitCode::from(tvgap::EXIT_VALIDATION as u8);
            }
        }
        None => print!("{text}"),
    }
    if outcome.certified {
        ExitCode::SUCCESS
    } else {
        eprintln!("tvgap: one or more certificates failed");
        ExitCode::from(EXIT_CERTIFICATE as u8)
    }
}
