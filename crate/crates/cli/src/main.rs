//! `shadecraft`: runs one bid-shading experiment described by a JSON
//! config and writes its CSV or JSON result.
//!
//! Exit codes: 0 success, 1 runtime error, 2 invalid config or flags,
//! 3 optimizer failure. Output files are only created on success.

mod commands;
mod config;
mod output;

use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::load;

#[derive(Debug, Parser)]
#[command(name = "shadecraft", version, about = "Bid-shading experiments against revenue-maximizing auctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Payoff of linear shading per alpha and bidder count (CSV).
    PayoffCurve(Common),
    /// Symmetric equilibrium checks: payoffs, revenues, residuals (JSON).
    EquilibriumDemo(Common),
    /// Bid profiles of one strategic bidder against truthful uniforms (CSV).
    OneStrategicDemo(Common),
    /// Optimize a GP-reparametrized bid (JSON).
    BspOpt(Common),
    /// Monte Carlo payoffs for any bidder profile and mechanism (JSON).
    Simulate(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides the config's `out`. Stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo rounds; overrides the config.
    #[arg(long)]
    rounds: Option<u64>,
    /// Monte Carlo seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, env = "SHADECRAFT_WORKERS")]
    workers: Option<NonZeroUsize>,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Optimizer(String),
    Run(anyhow::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Run(_) => 1,
            Failure::Config(_) => 2,
            Failure::Optimizer(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid config: {m}"),
            Failure::Optimizer(m) => write!(f, "optimizer failed: {m}"),
            Failure::Run(e) => write!(f, "{e:#}"),
        }
    }
}

/// Monte Carlo flags are meaningless for the deterministic commands.
fn no_mc_flags(c: &Common, name: &str) -> Result<(), Failure> {
    if c.rounds.is_some() || c.seed.is_some() {
        return Err(Failure::Config(format!("{name} is deterministic and takes neither --rounds nor --seed")));
    }
    Ok(())
}

fn run(cmd: Command) -> Result<(), Failure> {
    let (common, bytes, cfg_out) = match cmd {
        Command::PayoffCurve(c) => {
            no_mc_flags(&c, "payoff-curve")?;
            let cfg: config::PayoffCurveConfig = load(&c.config, "payoff-curve")?;
            let b = in_pool(&c, || commands::payoff_curve(&cfg))?;
            (c, b, cfg.out)
        }
        Command::EquilibriumDemo(c) => {
            no_mc_flags(&c, "equilibrium-demo")?;
            let cfg: config::EquilibriumDemoConfig = load(&c.config, "equilibrium-demo")?;
            let b = in_pool(&c, || commands::equilibrium_demo(&cfg))?;
            (c, b, cfg.out)
        }
        Command::OneStrategicDemo(c) => {
            no_mc_flags(&c, "one-strategic-demo")?;
            let cfg: config::OneStrategicDemoConfig = load(&c.config, "one-strategic-demo")?;
            let b = in_pool(&c, || commands::one_strategic_demo(&cfg))?;
            (c, b, cfg.out)
        }
        Command::BspOpt(c) => {
            no_mc_flags(&c, "bsp-opt")?;
            let cfg: config::BspOptConfig = load(&c.config, "bsp-opt")?;
            let b = in_pool(&c, || commands::bsp_opt(&cfg))?;
            (c, b, cfg.out)
        }
        Command::Simulate(c) => {
            let mut cfg: config::SimulateConfig = load(&c.config, "simulate")?;
            cfg.rounds = c.rounds.or(cfg.rounds);
            cfg.seed = c.seed.or(cfg.seed);
            let b = commands::simulate(&cfg, workers(&c))?;
            (c, b, cfg.out)
        }
    };
    let dest = common.out.or(cfg_out);
    output::write_output(dest.as_deref(), &bytes).map_err(Failure::Run)
}

fn workers(c: &Common) -> usize {
    c.workers.or_else(|| std::thread::available_parallelism().ok()).map_or(1, NonZeroUsize::get)
}

/// Runs `f` on a thread pool of the requested size.
fn in_pool<T: Send>(c: &Common, f: impl FnOnce() -> Result<T, Failure> + Send) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(c))
        .build()
        .map_err(|e| Failure::Run(anyhow::anyhow!("cannot start worker pool: {e}")))?;
    pool.install(f)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shadecraft: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
