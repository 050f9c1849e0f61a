//! `contrast`: mine contrast subgraphs between two weighted graphs.

mod check;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use contrast_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "contrast",
    version,
    about = "Contrast subgraph mining over a pair of weighted graphs"
)]
pub struct Cli {
    /// Print solver diagnostics to stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Find the coherent core around the seeds and the contrast subgraphs grown from it.
    Mine(MineArgs),
    /// Compare the exact solver against brute force and greedy peeling.
    Check(CheckArgs),
    /// Generate a planted graph pair with ground truth.
    Gen(GenArgs),
    /// Split a timestamped event list into two edge-list files.
    Split(SplitArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Edge list of graph A (`u v weight` per line).
    #[arg(long = "graph-a", value_name = "PATH")]
    pub graph_a: Option<PathBuf>,
    /// Edge list of graph B.
    #[arg(long = "graph-b", value_name = "PATH")]
    pub graph_b: Option<PathBuf>,
    /// Seed node label; repeat for several. Omit for seedless mining.
    #[arg(long = "seed", value_name = "LABEL")]
    pub seeds: Vec<String>,
    /// Neighborhood radius around the seeds.
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    /// Neighborhood radius for growing the contrast subgraph (defaults to --radius).
    #[arg(long = "radius-grow")]
    pub radius_grow: Option<usize>,
    #[arg(long, default_value = "min")]
    pub coherence: String,
    #[arg(long, default_value = "absdiff")]
    pub contrast: String,
    #[arg(long, default_value = "uniform")]
    pub penalty: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(Args, Debug)]
pub struct MineArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Maximum number of non-overlapping contrast subgraphs.
    #[arg(short = 'k', long = "k", default_value_t = 1)]
    pub k: usize,
    /// Skip the coherent core and grow directly from the seeds.
    #[arg(long = "no-core")]
    pub no_core: bool,
    /// Grow over every node instead of the core's neighborhood.
    #[arg(long = "no-neighbor")]
    pub no_neighbor: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Run this many random instances instead of reading files.
    #[arg(long, conflicts_with_all = ["graph_a", "graph_b"])]
    pub trials: Option<usize>,
    /// Base seed for random trials.
    #[arg(long = "rng-seed", default_value_t = 0)]
    pub rng_seed: u64,
    /// Largest node count of a random trial instance.
    #[arg(long = "max-nodes", default_value_t = 16)]
    pub max_nodes: usize,
    #[arg(long = "inject-fault", hide = true)]
    pub inject_fault: bool,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Planted core size.
    #[arg(long, default_value_t = 10)]
    pub core: usize,
    /// Planted contrast block size.
    #[arg(long, default_value_t = 15)]
    pub contrast: usize,
    /// Background edge probability, applied to each graph independently.
    #[arg(long = "p-bg", default_value_t = 0.0)]
    pub p_bg: f64,
    #[arg(long = "bg-min", default_value_t = 0.1)]
    pub bg_min: f64,
    #[arg(long = "bg-max", default_value_t = 0.3)]
    pub bg_max: f64,
    #[arg(long = "w-core", default_value_t = 2.0)]
    pub w_core: f64,
    #[arg(long = "w-con", default_value_t = 3.0)]
    pub w_con: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    /// File name prefix.
    #[arg(long, default_value = "planted")]
    pub stem: String,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Event list (`u v timestamp [magnitude]` per line).
    #[arg(long, value_name = "PATH")]
    pub events: PathBuf,
    /// Events before this timestamp go to graph A, the rest to graph B.
    #[arg(long = "split-at")]
    pub split_at: i64,
    /// `identity` or `log1` (ln(x) + 1).
    #[arg(long, default_value = "identity")]
    pub transform: String,
    #[arg(long = "out-a", value_name = "PATH")]
    pub out_a: PathBuf,
    #[arg(long = "out-b", value_name = "PATH")]
    pub out_b: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Mine(a) => commands::mine(a, cli.verbose),
        Command::Check(a) => check::run(a, cli.verbose),
        Command::Gen(a) => commands::gen(a),
        Command::Split(a) => commands::split(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input() {
        1
    } else {
        2
    }
}
