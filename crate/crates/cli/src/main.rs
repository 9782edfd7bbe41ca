use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mfgs_cli::{
    cmd_compute, cmd_converge, cmd_props, cmd_sweep, cmd_usc, init_numerics, parse_config, parse_props_config,
    with_workers, CliError, PropsConfig,
};

#[derive(Parser)]
#[command(
    name = "mfgs",
    version,
    about = "Mean-force Gibbs states and their ultrastrong-coupling limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (defaults to the config's `output`, then `.`)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks one per core
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact reduced state at each coupling
    Compute(Common),
    /// Ultrastrong-coupling state at each coupling
    Usc(Common),
    /// Trace distance to the ultrastrong-coupling state over a coupling sweep
    Sweep(Common),
    /// Grid convergence report at each coupling
    Converge(Common),
    /// Inequality bench and h-function curves
    Props(Common),
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_numerics();
    let (which, common) = match &cli.command {
        Command::Compute(c) => ("compute", c),
        Command::Usc(c) => ("usc", c),
        Command::Sweep(c) => ("sweep", c),
        Command::Converge(c) => ("converge", c),
        Command::Props(c) => ("props", c),
    };
    if which == "props" {
        let mut cfg = match &common.config {
            Some(p) => parse_props_config(p)?,
            None => PropsConfig::default(),
        };
        if let Some(s) = common.seed {
            cfg = cfg.with_seed(s);
        }
        let out = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
        let r = with_workers(common.workers, || cmd_props(&cfg, &out))??;
        log::info!(
            "props: mu = {:.6}, prop1 violations {}, prop2 violations {}",
            r.h_minima.mu,
            r.prop1_violations,
            r.prop2_violations
        );
        return Ok(());
    }

    let path = common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("`{which}` needs --config")))?;
    let mut cfg = parse_config(path)?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    let cfg = cfg.resolve()?;
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    with_workers(common.workers, || match which {
        "compute" => cmd_compute(&cfg, &out),
        "usc" => cmd_usc(&cfg, &out),
        "sweep" => cmd_sweep(&cfg, &out).map(|o| {
            log::info!("sweep: {} rows, {} errors", o.rows.len(), o.errors.len());
        }),
        _ => cmd_converge(&cfg, &out).map(|_| ()),
    })?
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
