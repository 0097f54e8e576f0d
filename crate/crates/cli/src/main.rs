//! `tpi-sim`: two-photon interference between imperfect single-photon sources.

mod commands;
mod config;
mod output;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{ConfigError, Format, RunConfig};
use tpi_core::exec::Execution;

/// Exit status for an unusable configuration (same as a command-line usage error).
const EXIT_CONFIG: u8 = 2;
/// Exit status when `verify` finds a failing check.
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "tpi-sim", version, about = "Two-photon interference simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[arg(long, short, value_enum, global = true)]
    format: Option<Format>,
    /// Seed for the Monte-Carlo checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Evaluate sweeps on the current thread only.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Second-order correlation G²(τ) behind an arbitrary gate.
    G2,
    /// HOM visibility as a function of the detuning between the emitters.
    Tuning,
    /// Visibility over the normalized (ϑ_PD, ϑ_SD) plane.
    Vmap,
    /// Bell-state fidelity over the normalized (ϑ_PD, ϑ_SD) plane.
    Fmap,
    /// All (Γ*, σ′) splits of a measured linewidth, with V and F for each.
    Decompose,
    /// Visibility and fidelity ranges for one or two emitter types.
    Assess,
    /// Cross-check closed forms against numerical integration and sampling.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("tpi-sim: verification failed");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
        Err(e) if e.is::<ConfigError>() => {
            eprintln!("tpi-sim: invalid configuration: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("tpi-sim: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Runs the command; `Ok(false)` means it ran but a check failed.
fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    // Flags override the file and are recorded in the emitted config.
    if let Some(seed) = cli.common.seed {
        cfg.seed = Some(seed);
    }
    if let Some(format) = cli.common.format {
        cfg.format = Some(format);
    }
    if let Some(out) = &cli.common.out {
        cfg.output = Some(out.clone());
    }
    let exec = if cli.common.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };

    let (report, passed) = match cli.command {
        Command::G2 => (commands::g2(&cfg, exec)?, true),
        Command::Tuning => (commands::tuning(&cfg, exec)?, true),
        Command::Vmap => (commands::vmap(&cfg, exec)?, true),
        Command::Fmap => (commands::fmap(&cfg, exec)?, true),
        Command::Decompose => (commands::decompose(&cfg, exec)?, true),
        Command::Assess => (commands::assess(&cfg, exec)?, true),
        Command::Verify => {
            let v = commands::verify(&cfg, exec)?;
            (v.report, v.passed)
        }
    };

    let format = cfg.format.unwrap_or(Format::Csv);
    match &cfg.output {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            output::render(&report, &cfg, format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            output::render(&report, &cfg, format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(passed)
}
