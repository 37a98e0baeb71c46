use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcdma_harness::scenarios;
use qcdma_harness::{ExperimentConfig, Result};

#[derive(Parser)]
#[command(name = "qcdma", version, about = "Chaotic-phase quantum CDMA simulator")]
struct Cli {
    /// JSON configuration; missing keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Overrides the configured output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correction factors and Lyapunov exponents versus bandwidth.
    Fig4,
    /// Fidelity over (M, n̄) and versus bandwidth.
    Fig5,
    /// Fidelity versus decay rate with and without EOMs.
    Fig6,
    /// Drive-response synchronization traces.
    Sync,
    /// One protocol run, written as JSON.
    Distribute,
    /// Branch simulator against the number-basis oracle.
    OracleCheck,
    /// Prints the resolved configuration.
    ShowConfig,
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = cli.out {
        cfg.output_dir = o;
    }
    cfg.validate()?;
    let out = cfg.output_dir.clone();
    let files = match cli.command {
        Command::Fig4 => scenarios::run_fig4(&cfg, &out)?,
        Command::Fig5 => scenarios::run_fig5(&cfg, &out)?,
        Command::Fig6 => scenarios::run_fig6(&cfg, &out)?,
        Command::Sync => scenarios::run_sync(&cfg, &out)?,
        Command::Distribute => {
            let (r, files) = scenarios::run_distribute(&cfg, &out)?;
            println!("F1 = {:?}  F2 = {:?}  p_success = {:?}", r.f1, r.f2, r.p_success);
            files
        }
        Command::OracleCheck => scenarios::run_oracle_check(&cfg, &out)?,
        Command::ShowConfig => {
            println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
            return Ok(());
        }
    };
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
