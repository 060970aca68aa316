//! `nhjc`: spectra, sweeps, encircling loops and oracle checks for the
//! non-Hermitian Jaynes-Cummings model.
//!
//! Exit codes: 0 ok, 1 usage, 2 no pseudo-fermion representation (two-level
//! degeneracy), 3 loop passes through an EP, 4 verification failure.

mod commands;
mod config;
mod error;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{
    merge_model, merge_output, EncircleBlock, Format, ModelFlags, RunConfig, ScanBlock, SpectrumBlock,
    SweepNBlock, SweepTauBlock, VerifyBlock,
};
use crate::error::CliError;
use crate::verify::Fault;

const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "nhjc", version, about = "Non-Hermitian Jaynes-Cummings spectra and exceptional points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; data goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for the random parameter draws of `verify`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Only ħ = 1 is supported.
    #[arg(long, global = true)]
    hbar: Option<f64>,
    #[command(flatten)]
    model: ModelFlags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pseudo-fermion representations of the two-level block.
    GmmCheck,
    /// Closed-form sector levels and eigenvector coefficients.
    Spectrum(SpectrumBlock),
    /// Levels of one sector against τ, with ħω₀ = ħω + iτ.
    SweepTau(SweepTauBlock),
    /// Levels against the sector index at fixed τ.
    SweepN(SweepNBlock),
    /// Track a level around a loop in the complex τ plane.
    Encircle(EncircleBlock),
    /// Levels over a scanned two-level parameter and sector index.
    Scan(ScanBlock),
    /// Run every oracle check and report PASS/FAIL per check.
    Verify {
        #[command(flatten)]
        block: VerifyBlock,
        /// Corrupt the closed forms on purpose; the run must then fail.
        #[arg(long, value_enum)]
        inject_fault: Option<Fault>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::GmmCheck => "gmm-check",
            Command::Spectrum(_) => "spectrum",
            Command::SweepTau(_) => "sweep-tau",
            Command::SweepN(_) => "sweep-n",
            Command::Encircle(_) => "encircle",
            Command::Scan(_) => "scan",
            Command::Verify { .. } => "verify",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.check_blocks(cli.command.name())?;
    if let Some(h) = cli.hbar.or(cfg.hbar) {
        if h != 1.0 {
            return Err(CliError::Usage(format!("only hbar = 1 is supported, got {h}")));
        }
    }
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let (out, format) = merge_output(cli.out.clone(), cli.format, &cfg)?;
    let model = merge_model(&cli.model, &cfg)?;

    let outcome: Outcome = match cli.command {
        Command::GmmCheck => commands::gmm_check(&model)?,
        Command::Spectrum(b) => commands::spectrum(&model, b.over(cfg.spectrum))?,
        Command::SweepTau(b) => commands::sweep_tau_cmd(&model, b.over(cfg.sweep_tau))?,
        Command::SweepN(b) => commands::sweep_n_cmd(&model, b.over(cfg.sweep_n))?,
        Command::Encircle(b) => commands::encircle_cmd(&model, b.over(cfg.encircle))?,
        Command::Scan(b) => commands::scan_cmd(&model, b.over(cfg.scan))?,
        Command::Verify { block, inject_fault } => {
            verify::verify_cmd(&model, block.over(cfg.verify), seed, inject_fault)?
        }
    };

    let text = outcome.table.render(format);
    match out {
        Some(path) => {
            std::fs::write(&path, text)?;
            println!("{}", outcome.summary);
        }
        None => {
            print!("{text}");
            eprintln!("{}", outcome.summary);
        }
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
