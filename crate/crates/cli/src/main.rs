//! `qpv`: run protocols, optimize attacks, evaluate bounds and execute the
//! check suites from the command line.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or configuration
//! error, 3 resource budget exceeded.

mod attack;
mod bounds;
mod output;
mod simulate;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::{Context, Failure, Format};

#[derive(Parser, Debug)]
#[command(name = "qpv", version, about = "Position-verification simulator and verification toolkit")]
struct Cli {
    /// Seed for every random choice; overrides a seed given in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel trials and restarts.
    #[arg(long, env = "QPV_THREADS", global = true)]
    threads: Option<usize>,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a protocol experiment described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Search for, or evaluate, an attack described by a JSON config.
    AttackOptimize {
        #[arg(long)]
        config: PathBuf,
    },
    /// Counting bound, net sizes and attacker qubit limits.
    Bounds {
        #[arg(long, conflicts_with_all = ["n", "q"])]
        config: Option<PathBuf>,
        /// Input half-length.
        #[arg(long, requires = "q")]
        n: Option<u32>,
        /// Attacker qubits.
        #[arg(long, requires = "n")]
        q: Option<u32>,
    },
    /// Run check suites and emit one JSON line per bound.
    Verify {
        /// Suite names, or `all`.
        #[arg(default_value = "all")]
        suites: Vec<String>,
    },
}

fn run(cli: Cli) -> Result<bool, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    }
    let ctx = Context {
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
    };
    match cli.command {
        Command::Simulate { config } => simulate::run(&ctx, &config),
        Command::AttackOptimize { config } => attack::run(&ctx, &config),
        Command::Bounds { config, n, q } => bounds::run(&ctx, config.as_deref(), n.zip(q)),
        Command::Verify { suites } => verify::run(&ctx, &suites),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("qpv: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
