//! `minority`: simulations, sweeps, equilibrium queries and strategy-space
//! diagnostics for the minority game.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "minority", version, about = "Minority-game laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write a one-row summary.
    Simulate(SimulateArgs),
    /// Run an ensemble sweep over a parameter grid.
    Sweep(SweepArgs),
    /// Pure and mixed Nash equilibria of the stage game.
    Nash(NashArgs),
    /// Reduced strategy space and correlation diagnostics.
    Strategies(StrategiesArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Flat JSON object with flag names as keys; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of players (odd, >= 3).
    #[arg(long)]
    pub n: Option<u64>,
    /// Memory length.
    #[arg(long)]
    pub m: Option<u32>,
    /// Response modes per player [default: 2].
    #[arg(long)]
    pub ns: Option<usize>,
    /// Inverse noise, or `inf` [default: inf].
    #[arg(long)]
    pub beta: Option<String>,
    /// step | linear | sign [default: linear].
    #[arg(long)]
    pub payoff: Option<String>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Equilibration rounds [default: max(1000, 200 * 2^m)].
    #[arg(long)]
    pub t_eq: Option<u64>,
    /// Measured rounds [default: max(10000, 200 * 2^m)].
    #[arg(long)]
    pub t_meas: Option<u64>,
    /// Summary CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-round log `t,history_code,A,winning_side`.
    #[arg(long)]
    pub round_log: Option<PathBuf>,
    /// Per-round selections `t,agent,mode_index`.
    #[arg(long)]
    pub selection_log: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma list of player counts.
    #[arg(long)]
    pub n: Option<String>,
    /// Comma list or inclusive range `a:b` of memories.
    #[arg(long)]
    pub m: Option<String>,
    /// Comma list [default: 2].
    #[arg(long)]
    pub ns: Option<String>,
    /// Comma list, `inf` allowed [default: inf].
    #[arg(long)]
    pub beta: Option<String>,
    /// Comma list [default: linear].
    #[arg(long)]
    pub payoff: Option<String>,
    /// Realizations per point [default: 32].
    #[arg(long)]
    pub r: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    pub master_seed: Option<u64>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Fixed equilibration rounds for every point (needs --t-meas).
    #[arg(long)]
    pub t_eq: Option<u64>,
    /// Fixed measured rounds for every point (needs --t-eq).
    #[arg(long)]
    pub t_meas: Option<u64>,
    /// Sweep CSV path; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write fig2.tsv and fig3.tsv.
    #[arg(long)]
    pub emit_figs: bool,
    /// Directory for the figure files [default: directory of --out, else .].
    #[arg(long)]
    pub fig_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct NashArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u64>,
    /// [default: linear]
    #[arg(long)]
    pub payoff: Option<String>,
    /// Number of players surely choosing -1.
    #[arg(long)]
    pub l: Option<u32>,
    /// Number of players surely choosing +1.
    #[arg(long)]
    pub r: Option<u32>,
    /// Residual tolerance [default: 1e-10].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct StrategiesArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Memory length (<= 16).
    #[arg(long)]
    pub m: Option<u32>,
    /// Dump the reduced strategy space, one mode per line.
    #[arg(long)]
    pub reduced: bool,
    /// Sample this many players.
    #[arg(long)]
    pub sample: Option<usize>,
    /// Modes per sampled player [default: 2].
    #[arg(long)]
    pub ns: Option<usize>,
    /// Pairwise-correlation histogram of the sampled modes.
    #[arg(long)]
    pub hist: bool,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Nash(a) => commands::nash(a),
        Command::Strategies(a) => commands::strategies(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            if f.code == 2 {
                eprintln!("run `minority --help` for usage");
            }
            ExitCode::from(f.code)
        }
    }
}
