//! `imsteer`: evaluate imaginarity steering criteria from the command line.

mod commands;
mod output;
mod state;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{Format, Sink};

/// Default seed for every sampled command.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "imsteer", version, about = "Imaginarity steering criteria for two-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn sink(&self, default: Format) -> Sink {
        Sink {
            format: self.format.unwrap_or(default),
            out: self.out.clone(),
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct StateArgs {
    /// werner, mems, mixed, singlet, xstate, or a path to a JSON state file.
    #[arg(long)]
    pub state: String,
    /// Werner visibility.
    #[arg(long)]
    pub v: Option<f64>,
    /// MEMS concurrence.
    #[arg(long)]
    pub c: Option<f64>,
    /// X-state β_xx (other β completed as in `region`).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub bxx: f64,
    /// X-state β_yy.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub byy: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every criterion on one state.
    Eval {
        #[command(flatten)]
        state: StateArgs,
        /// Sharpness of Alice's measurements (1 = projective).
        #[arg(long)]
        lambda: Option<f64>,
        /// Search over measurement triads for the three-setting imaginarity criterion.
        #[arg(long)]
        optimize: bool,
    },
    /// I₂ over a grid of X-states in the (β_xx, β_yy) plane.
    Region {
        #[arg(long, default_value_t = 201)]
        resolution: usize,
    },
    /// Critical Werner visibility and unsharp-singlet sharpness per criterion.
    Thresholds {
        /// Add the searched three-setting imaginarity criterion.
        #[arg(long)]
        optimize: bool,
    },
    /// Monte-Carlo check of the tripartite monogamy bound.
    Monogamy {
        #[arg(long, visible_alias = "n", default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Evaluate the known maximizer in addition to the samples.
        #[arg(long)]
        include_maximizer: bool,
    },
    /// Best witness for a state with its local projector decomposition.
    Witness {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Run the invariant suites.
    Audit {
        /// One of separable, convexity, duality, complementarity, closed_form; all by default.
        #[arg(long)]
        suite: Option<String>,
        /// Samples per suite; each suite has its own default.
        #[arg(long, visible_alias = "n")]
        samples: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Failure classes, mapped to exit codes 2 and 3.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Invariant(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<imsteer_core::Error> for Failure {
    fn from(e: imsteer_core::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("IMSTEER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| anyhow::anyhow!("IMSTEER_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(args: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let out = &args.output;
    match args.command {
        Command::Eval {
            state,
            lambda,
            optimize,
        } => commands::eval(&state, lambda, optimize, &out.sink(Format::Json)),
        Command::Region { resolution } => commands::region(resolution, &out.sink(Format::Csv)),
        Command::Thresholds { optimize } => commands::thresholds(optimize, &out.sink(Format::Csv)),
        Command::Monogamy {
            samples,
            seed,
            include_maximizer,
        } => commands::monogamy(samples, seed, include_maximizer, &out.sink(Format::Json)),
        Command::Witness { state } => commands::witness(&state, &out.sink(Format::Json)),
        Command::Audit { suite, samples, seed } => {
            commands::audit(suite.as_deref(), samples, seed, &out.sink(Format::Json))
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant failure: {msg}");
            ExitCode::from(3)
        }
    }
}
