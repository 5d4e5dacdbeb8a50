use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod analyze;
mod exit;
mod experiment;
mod manifest;
mod verify;

use exit::Exit;

#[derive(Debug, Parser)]
#[command(name = "specpert", version, about = "Weighted perturbation series for symmetric eigenproblems")]
struct Cli {
    /// Overrides the seed of the command's config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory for machine-readable files and the run manifest.
    #[arg(long, global = true, default_value = "specpert-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Series coefficients, partial sums and every bound for one instance.
    Analyze {
        /// Unperturbed matrix (text or JSON).
        matrix: PathBuf,
        /// Perturbation E (text or JSON).
        perturbation: PathBuf,
        /// 1-based eigenvalue index.
        #[arg(short, long)]
        j: usize,
        /// Series order.
        #[arg(short, long, default_value_t = 3)]
        p: usize,
    },
    /// Randomized sweep of every implemented inequality.
    Verify {
        /// key = value config; defaults are used for missing keys.
        config: Option<PathBuf>,
    },
    /// Monte Carlo eigenvalue/eigenprojection errors across j.
    Experiment {
        config: PathBuf,
        /// Also write one two-column `j value` file per curve.
        #[arg(long)]
        emit_gnuplot_style: bool,
    },
}

pub struct Globals {
    pub seed: Option<u64>,
    pub threads: usize,
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<u8, Exit> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Exit::usage(format!("cannot start {n} threads: {e}")))?;
    }
    let g = Globals {
        seed: cli.seed,
        threads: rayon::current_num_threads(),
        out: cli.out,
    };
    match cli.command {
        Command::Analyze { matrix, perturbation, j, p } => analyze::run(&g, &matrix, &perturbation, j, p),
        Command::Verify { config } => verify::run(&g, config.as_deref()),
        Command::Experiment { config, emit_gnuplot_style } => experiment::run(&g, &config, emit_gnuplot_style),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("specpert: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
