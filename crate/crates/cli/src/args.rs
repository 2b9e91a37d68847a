use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "dynlab",
    version,
    about = "Simulation laboratory for 3-majority consensus under a bounded adversary"
)]
pub struct Cli {
    /// Plain-text `key = value` defaults; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run independent trials and emit one CSV row per trial.
    Run(RunArgs),
    /// Run a grid of (n, k) points and fit median rounds against k ln n.
    Sweep(SweepArgs),
    /// Check the phase and epoch properties against fixed thresholds.
    Verify(VerifyArgs),
    /// Emit one JSON object per round of a single agent-mode trajectory.
    Trace(TraceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Run(_) => "run",
            Command::Sweep(_) => "sweep",
            Command::Verify(_) => "verify",
            Command::Trace(_) => "trace",
        }
    }
}

/// Protocol and adversary flags shared by run, sweep and trace.
#[derive(Debug, Clone, Default, Args)]
pub struct DynamicsArgs {
    /// two-sample-own or three-random.
    #[arg(long)]
    pub variant: Option<String>,
    /// Sample only among the other n - 1 nodes.
    #[arg(long)]
    pub exclude_self: bool,
    /// none, invalid, equalizer, anti-plurality or scramble.
    #[arg(long)]
    pub adversary: Option<String>,
    /// Adversary strength; the per-round budget is floor(epsilon sqrt(n) / k^1.5).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fixed per-round budget, overriding the epsilon law.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Defaults to 1000 k ceil(ln n).
    #[arg(long)]
    pub max_rounds: Option<u64>,
    /// Stop once n - slack nodes agree; defaults to the adversary budget.
    #[arg(long)]
    pub slack: Option<u64>,
    /// auto, agent or aggregate.
    #[arg(long)]
    pub engine: Option<String>,
    /// Phase-length constant of the epoch clock.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct RunArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// uniform, plurality:GAP or counts:C1,C2,...
    #[arg(long)]
    pub initial: Option<String>,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// Exit with status 3 if any trial does not converge.
    #[arg(long)]
    pub strict: bool,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    /// Comma-separated node counts.
    #[arg(long)]
    pub n_list: Option<String>,
    /// Comma-separated opinion counts.
    #[arg(long)]
    pub k_list: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// Refit a previously written sweep CSV instead of simulating.
    #[arg(long, value_name = "FILE")]
    pub replay: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    /// p1 to p7, a comma-separated list, or all.
    #[arg(long)]
    pub property: Option<String>,
    /// Reduced trial counts.
    #[arg(long)]
    pub quick: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Starting gap for p5.
    #[arg(long)]
    pub gap: Option<f64>,
    /// two-sample-own or three-random.
    #[arg(long)]
    pub variant: Option<String>,
    /// Include wall-clock seconds in the JSON report.
    #[arg(long)]
    pub timing: bool,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct TraceArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// uniform, plurality:GAP or counts:C1,C2,...
    #[arg(long)]
    pub initial: Option<String>,
    #[command(flatten)]
    pub dynamics: DynamicsArgs,
    /// Comma-separated opinion ids to color; each must be strong at the start.
    #[arg(long)]
    pub track: Option<String>,
    /// full or clear: which sigma2 drives the clear recurrence.
    #[arg(long)]
    pub sigma2: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}
