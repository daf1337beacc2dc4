//! `direx`: reproducible experiment driver for the device-independent
//! randomness-expansion laboratory.
//!
//! Every subcommand is fully deterministic: all randomness derives from the
//! mandatory master seed through labelled substreams, so identical
//! configuration always reproduces identical output files, byte for byte.
//! Settings resolve as flag > config file > default; exit codes are 0 for
//! success or an accepted run, 2 for a rejected run or failed verification,
//! and 1 for anything that prevented a result.

mod commands;
mod config;
mod pairs;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use config::FileConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// JSON reports only.
    Json,
    /// JSON reports plus CSV tables where a table form exists.
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "direx",
    version,
    about = "Device-independent randomness expansion: simulate, certify, attack, extract"
)]
struct Cli {
    /// JSON config file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; all randomness derives from it (no ambient entropy).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trial/round count for sampling commands.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output directory for report files (default: current directory).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Output format for tabular data.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-input-pair CHSH success table for a device pair.
    ChshStats(ChshStatsArgs),
    /// Run certification protocol A or B and write its transcript.
    Run(RunArgs),
    /// Play the guessing-game attack against a device pair.
    Guess(GuessArgs),
    /// Min-entropy and smooth min-entropy of an explicit distribution.
    Entropy(EntropyArgs),
    /// Build a weak design and write it as JSON.
    Design(DesignArgs),
    /// Apply the t-XOR extractor to an input string.
    Extract(ExtractArgs),
    /// Re-validate a transcript or weak-design file.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct ChshStatsArgs {
    /// Device pair: honest, all-zeros, shared-uniform, or deterministic.
    #[arg(long)]
    pair: Option<String>,
    /// Monte Carlo rounds per input pair.
    #[arg(long)]
    rounds: Option<u64>,
    /// Response table for side A (deterministic pair), e.g. "01".
    #[arg(long)]
    fa: Option<String>,
    /// Response table for side B (deterministic pair).
    #[arg(long)]
    fb: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Which protocol to run: "a" or "b".
    #[arg(long)]
    protocol: Option<String>,
    /// Device pair: honest, all-zeros, shared-uniform, or deterministic.
    #[arg(long)]
    pair: Option<String>,
    /// Response table for side A (deterministic pair).
    #[arg(long)]
    fa: Option<String>,
    /// Response table for side B (deterministic pair).
    #[arg(long)]
    fb: Option<String>,
    /// Security parameter: Bell blocks appear with probability 1/ell.
    #[arg(long)]
    ell: Option<u64>,
    /// Protocol A block-count factor: m = delta * ell.
    #[arg(long)]
    delta: Option<u64>,
    /// Protocol B block-count factor: m = ceil(c * ell * log2(ell)^2).
    #[arg(long)]
    c: Option<f64>,
    /// Override the derived block length k.
    #[arg(long)]
    k_override: Option<u64>,
    /// Override the derived block count m (protocol B).
    #[arg(long)]
    m_override: Option<u64>,
    /// Override the per-block Bell probability (protocol A).
    #[arg(long)]
    bell_probability: Option<f64>,
    /// Per-block mismatch budget as a fraction of k.
    #[arg(long)]
    mismatch_threshold: Option<f64>,
    /// Lower edge of protocol B's (A1, A0) acceptance window.
    #[arg(long)]
    window_low: Option<f64>,
    /// Upper edge of protocol B's (A1, A0) acceptance window.
    #[arg(long)]
    window_high: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GuessArgs {
    /// Device pair: honest, cheating, all-zeros, shared-uniform, deterministic.
    #[arg(long)]
    pair: Option<String>,
    /// Response table for side A (deterministic pair).
    #[arg(long)]
    fa: Option<String>,
    /// Response table for side B (deterministic pair).
    #[arg(long)]
    fb: Option<String>,
    /// Cheating pair: probability of deviating from its favored block.
    #[arg(long)]
    gamma: Option<f64>,
    /// Cheating pair: seed selecting its favored block.
    #[arg(long)]
    b0_seed: Option<u64>,
    /// Rounds per block.
    #[arg(long)]
    k: Option<u64>,
    /// Decision radius for the Hamming-shell test.
    #[arg(long)]
    decision_radius: Option<f64>,
    /// How to obtain the reference block: calibrate, known, or fixed.
    #[arg(long)]
    b0_mode: Option<String>,
    /// Reference block as hex (with --b0-mode fixed).
    #[arg(long)]
    b0_hex: Option<String>,
    /// Calibration runs (with --b0-mode calibrate).
    #[arg(long)]
    calibration_samples: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Distribution file: {"outcomes": ["0110", ...], "probs": [...]}.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Smoothing parameter.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Entropy level to test; emits the high-probability witness set when
    /// the smooth min-entropy is at most this.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Number of sets (one per output bit).
    #[arg(long)]
    r: Option<u64>,
    /// Size of every set.
    #[arg(long)]
    set_size: Option<u64>,
    /// Overlap budget: sum over earlier sets of 2^|overlap| stays within
    /// rho * (r - 1).
    #[arg(long)]
    rho: Option<f64>,
    /// Universe (seed length) budget in bits; defaults to 4 * set_size^2.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Source length in bits (a power of two).
    #[arg(long)]
    m: Option<u64>,
    /// Parity weight: each output bit XORs t source positions.
    #[arg(long)]
    t: Option<u64>,
    /// Output length in bits.
    #[arg(long)]
    r: Option<u64>,
    /// Universe (seed length) budget in bits; defaults to 4 * (t log2 m)^2.
    #[arg(long)]
    budget: Option<u64>,
    /// Source string as hex, most significant bit first.
    #[arg(long)]
    input_hex: Option<String>,
    /// Seed as hex, most significant bit first.
    #[arg(long)]
    seed_hex: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Transcript or design file to re-validate.
    #[arg(value_name = "FILE")]
    file: Option<PathBuf>,
}

/// Fully resolved global settings every subcommand sees.
pub struct Ctx {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: PathBuf,
    pub format: Format,
    pub file: FileConfig,
}

fn dispatch(cli: &Cli) -> Result<u8> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let ctx = Ctx {
        seed: cli.seed.or(file.seed),
        trials: cli.trials,
        out: cli.out.clone().or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from(".")),
        format: cli.format.or(file.format).unwrap_or(Format::Json),
        file,
    };
    match &cli.command {
        Command::ChshStats(args) => commands::chsh_stats(&ctx, args),
        Command::Run(args) => commands::run(&ctx, args),
        Command::Guess(args) => commands::guess(&ctx, args),
        Command::Entropy(args) => commands::entropy(&ctx, args),
        Command::Design(args) => commands::design(&ctx, args),
        Command::Extract(args) => commands::extract_cmd(&ctx, args),
        Command::Verify(args) => commands::verify(&ctx, args),
    }
}

fn main() -> ExitCode {
    // Exit code 2 is reserved for rejected runs, so usage errors map to 1
    // rather than clap's default 2 (help and version still exit 0).
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
