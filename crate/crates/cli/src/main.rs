//! `kicktop`: evolutions, (k, t) sweeps, classical portraits and the
//! verification suite of the quantum kicked top.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn from_core(e: kicktop::Error) -> Self {
        match e {
            kicktop::Error::Input(m) => CliError::Usage(m),
            other => CliError::Numerical(other.to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kicktop", version, about = "Quantum kicked top simulator and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Correlation measures along one stroboscopic evolution.
    Evolve(EvolveArgs),
    /// Correlation measures over a grid of kick strengths.
    Sweep(SweepArgs),
    /// Classical phase portrait.
    Classical(ClassicalArgs),
    /// Run a verification suite and write a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key=value` configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Twice the spin quantum number.
    #[arg(long = "two-j")]
    two_j: Option<u32>,
    /// Precession angle: a float or `[n]pi[/m]`.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long = "t-max")]
    t_max: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    theta0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi0: Option<String>,
    /// `all` or a comma-separated subset of the measure columns.
    #[arg(long)]
    measures: Option<String>,
    /// `coarse` or `fine`.
    #[arg(long = "discord-grid")]
    discord_grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    state: StateArgs,
    /// Kick strength: a float or `[n]pi[/m]`.
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    state: StateArgs,
    /// Largest `r` in `k = r pi / s`.
    #[arg(long = "r-max")]
    r_max: Option<u64>,
    #[arg(long)]
    s: Option<u64>,
    /// Explicit comma-separated kick strengths, instead of `--r-max`/`--s`.
    #[arg(long = "k-list", allow_hyphen_values = true)]
    k_list: Option<String>,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// Number of trajectories.
    #[arg(long = "n-initial")]
    n_initial: Option<usize>,
    /// Map iterations per trajectory.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of k-period, time-period, mirrors, reflection, lu, classical, reduction, all.
    suite: String,
    #[command(flatten)]
    common: Common,
    /// Discord minimizer grid, `coarse` or `fine`.
    #[arg(long = "discord-grid", alias = "discord")]
    discord_grid: Option<String>,
    /// Random draws per spin for sampled checks.
    #[arg(long)]
    samples: Option<usize>,
    /// Largest denominator in the rational kick tables.
    #[arg(long = "s-max")]
    s_max: Option<u64>,
    #[arg(long = "t-max")]
    t_max: Option<usize>,
    /// Periods to compare in the time-period checks.
    #[arg(long)]
    cycles: Option<usize>,
    /// Also scan for time periods at larger spins.
    #[arg(long)]
    scan: bool,
    /// Break the physics on purpose, to confirm the suite notices.
    #[arg(long, value_parser = ["torsion-sign", "binomial-weight"])]
    mutate: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evolve(a) => commands::evolve(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Classical(a) => commands::classical(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("kicktop: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
