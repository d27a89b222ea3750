//! `spinsync` runs the synchronization experiments from a JSON config and
//! writes CSV/JSON artifacts into the output directory.
//!
//! Exit status: 0 on success, 1 for configuration errors, 2 when a solve fails.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::{Context, Failure};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "spinsync", version, about = "Phase locking of a driven, dissipative spin")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; omitted keys take their defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config's `output` directory
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    spin: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma_g: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma_d: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Steady-state Husimi Q on the sphere grid (qfunc.csv)
    Qfunc,
    /// Steady-state density matrix and phase distribution (steady_state.json, phase.csv)
    Steady,
    /// Time-resolved phase distribution (evolution.csv)
    Evolve,
    /// Detuning/strength sweep (arnold.csv, arnold.params.json)
    Arnold,
    /// Resonant strength sweep (breakdown.csv, breakdown.params.json, breakdown_band.csv)
    Breakdown,
    /// Qubit limit-cycle report (nogo.json)
    Nogo,
    /// Peak phase preference across spins (compare_spins.csv)
    CompareSpins,
}

fn resolve(common: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).map_err(Failure::Config)?,
        None => RunConfig::default(),
    };
    let overrides = [
        (common.spin, &mut cfg.spin),
        (common.delta, &mut cfg.delta),
        (common.epsilon, &mut cfg.epsilon),
        (common.gamma_g, &mut cfg.gamma_g),
        (common.gamma_d, &mut cfg.gamma_d),
    ];
    for (flag, slot) in overrides {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    if let Some(dir) = &common.output_dir {
        cfg.output = dir.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Failure> {
    if let Some(n) = cli.common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("thread pool: {e}")))?;
    }
    let ctx = Context::new(resolve(&cli.common)?)?;
    match cli.command {
        Command::Qfunc => commands::qfunc(&ctx),
        Command::Steady => commands::steady(&ctx),
        Command::Evolve => commands::evolve_phase(&ctx),
        Command::Arnold => commands::arnold(&ctx),
        Command::Breakdown => commands::breakdown(&ctx),
        Command::Nogo => commands::nogo(&ctx),
        Command::CompareSpins => commands::compare_spins(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("spinsync: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
