//! Subcommand implementations. Each resolves its settings (flags beat the
//! config file), runs the corresponding library routine, and writes
//! self-describing JSON reports (plus CSV tables) into the output
//! directory. The returned number is the process exit code: 0 for
//! success/accepted, 2 for a rejected protocol run or failed verification;
//! configuration and I/O problems surface as errors and exit 1.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use direx_core::analysis::{
    classical_chsh_optimum, min_entropy, smooth_min_entropy, smoothcap_witness, transcript_stats,
    wilson_interval, ChshOptimum, Distribution, TranscriptStats,
};
use direx_core::bits::{bits_to_hex, hex_to_bits, BitString};
use direx_core::devices::{GameKind, InputSymbol, PairSpec, Side};
use direx_core::extractor::{
    build_weak_design, extract, ExtractorParams, WeakDesign, DEFAULT_RHO,
};
use direx_core::guessing::{
    run_attack, B0Spec, GuessingConfig, GuessingResult, DEFAULT_DECISION_RADIUS,
};
use direx_core::referee::{
    run_protocol_a_with_spec, run_protocol_b_with_spec, verify_transcript, ProtocolAParams,
    ProtocolBParams, ProtocolParams, Transcript,
};

use crate::config::{require, resolve};
use crate::pairs::{resolve_pair, PairOptions};
use crate::report::{write_csv, write_json, Report};
use crate::{
    ChshStatsArgs, Ctx, DesignArgs, EntropyArgs, ExtractArgs, Format, GuessArgs, RunArgs,
    VerifyArgs,
};

/// Default Monte Carlo rounds per input pair for `chsh-stats`.
const DEFAULT_CHSH_ROUNDS: u64 = 100_000;
/// Desk-scale protocol defaults: security parameter and output-size factor.
const DEFAULT_ELL: u64 = 100;
const DEFAULT_DELTA: u64 = 5;
const DEFAULT_C: f64 = 1.0;
const DEFAULT_CALIBRATION_SAMPLES: u64 = 1000;

fn require_seed(ctx: &Ctx) -> Result<u64> {
    ctx.seed.context("a master seed is required (pass --seed or set \"seed\" in the config file)")
}

// ---------------------------------------------------------------------------
// chsh-stats

#[derive(Serialize)]
struct ChshConfigEcho {
    pair: PairSpec,
    rounds: u64,
    seed: u64,
}

#[derive(Serialize)]
struct ChshRow {
    x: u8,
    y: u8,
    rounds: u64,
    wins: u64,
    estimate: f64,
    ci_low: f64,
    ci_high: f64,
    /// Exact success for this input pair, when a closed form exists.
    closed_form: Option<f64>,
}

#[derive(Serialize)]
struct ChshPayload {
    per_input_pair: Vec<ChshRow>,
    overall_estimate: f64,
    overall_closed_form: Option<f64>,
    classical_optimum: ChshOptimum,
}

pub fn chsh_stats(ctx: &Ctx, args: &ChshStatsArgs) -> Result<u8> {
    let section = &ctx.file.chsh_stats;
    let seed = require_seed(ctx)?;
    let pair_name = resolve(args.pair.clone(), section.pair.clone(), "honest".into());
    let rounds = args
        .rounds
        .or(ctx.trials)
        .or(section.rounds)
        .or(ctx.file.trials)
        .unwrap_or(DEFAULT_CHSH_ROUNDS);
    if rounds == 0 {
        bail!("rounds must be positive");
    }
    let opts = PairOptions {
        fa: args.fa.clone().or_else(|| section.fa.clone()),
        fb: args.fb.clone().or_else(|| section.fb.clone()),
        ..PairOptions::default()
    };
    let spec = resolve_pair(&pair_name, GameKind::Chsh, &opts)?;

    let mut rows = Vec::with_capacity(4);
    for (i, (x, y)) in [(false, false), (false, true), (true, false), (true, true)]
        .into_iter()
        .enumerate()
    {
        let mut pair = spec.build(seed, &format!("cli.chsh-stats.{i}"))?;
        let mut wins = 0u64;
        for _ in 0..rounds {
            let a = pair.respond(Side::A, InputSymbol::Bit(x))?;
            let b = pair.respond(Side::B, InputSymbol::Bit(y))?;
            wins += u64::from((a ^ b) == (x && y));
        }
        let (ci_low, ci_high) = wilson_interval(wins, rounds);
        rows.push(ChshRow {
            x: u8::from(x),
            y: u8::from(y),
            rounds,
            wins,
            estimate: wins as f64 / rounds as f64,
            ci_low,
            ci_high,
            closed_form: spec.closed_form_chsh_success(x, y),
        });
    }
    let overall_estimate = rows.iter().map(|r| r.estimate).sum::<f64>() / 4.0;
    let overall_closed_form = rows
        .iter()
        .map(|r| r.closed_form)
        .sum::<Option<f64>>()
        .map(|s| s / 4.0);
    let classical = classical_chsh_optimum();
    let classical_value = classical.value;

    let report = Report::new(
        ChshConfigEcho { pair: spec, rounds, seed },
        ChshPayload {
            per_input_pair: rows,
            overall_estimate,
            overall_closed_form,
            classical_optimum: classical,
        },
    );
    write_json(&ctx.out, "chsh_stats.json", &report)?;
    if ctx.format == Format::Csv {
        let rows: Vec<Vec<String>> = report
            .payload
            .per_input_pair
            .iter()
            .map(|r| {
                vec![
                    r.x.to_string(),
                    r.y.to_string(),
                    r.rounds.to_string(),
                    r.wins.to_string(),
                    r.estimate.to_string(),
                    r.ci_low.to_string(),
                    r.ci_high.to_string(),
                    r.closed_form.map(|v| v.to_string()).unwrap_or_default(),
                ]
            })
            .collect();
        write_csv(
            &ctx.out,
            "chsh_stats.csv",
            &["x", "y", "rounds", "wins", "estimate", "ci_low", "ci_high", "closed_form"],
            &rows,
        )?;
    }
    println!(
        "chsh-stats: overall success {overall_estimate:.6} over {rounds} rounds per input pair \
         (classical optimum {classical_value})"
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// run

#[derive(Serialize)]
struct RunConfigEcho {
    #[serde(flatten)]
    params: ProtocolParams,
    pair: PairSpec,
}

#[derive(Serialize)]
struct RunPayload {
    stats: TranscriptStats,
}

pub fn run(ctx: &Ctx, args: &RunArgs) -> Result<u8> {
    let section = &ctx.file.run;
    let seed = require_seed(ctx)?;
    let protocol = require(args.protocol.clone(), section.protocol.clone(), "protocol")?;
    let pair_name = resolve(args.pair.clone(), section.pair.clone(), "honest".into());
    let opts = PairOptions {
        fa: args.fa.clone().or_else(|| section.fa.clone()),
        fb: args.fb.clone().or_else(|| section.fb.clone()),
        ..PairOptions::default()
    };
    let ell = resolve(args.ell, section.ell, DEFAULT_ELL);

    let (params, spec, transcript) = match protocol.as_str() {
        "a" => {
            let delta = resolve(args.delta, section.delta, DEFAULT_DELTA);
            let mut params = ProtocolAParams::new(ell, delta, seed);
            params.k_override = args.k_override.or(section.k_override);
            params.bell_probability = args.bell_probability.or(section.bell_probability);
            if let Some(f) = args.mismatch_threshold.or(section.mismatch_threshold_fraction) {
                params.mismatch_threshold_fraction = f;
            }
            params.validate()?;
            let spec = resolve_pair(&pair_name, GameKind::Chsh, &opts)?;
            let transcript = run_protocol_a_with_spec(&params, &spec)?;
            (ProtocolParams::A(params), spec, transcript)
        }
        "b" => {
            let c = resolve(args.c, section.c, DEFAULT_C);
            let mut params = ProtocolBParams::new(ell, c, seed);
            params.k_override = args.k_override.or(section.k_override);
            params.m_override = args.m_override.or(section.m_override);
            if let Some(f) = args.mismatch_threshold.or(section.mismatch_threshold_fraction) {
                params.mismatch_threshold_fraction = f;
            }
            if let Some(w) = args.window_low.or(section.window_low) {
                params.window_low = w;
            }
            if let Some(w) = args.window_high.or(section.window_high) {
                params.window_high = w;
            }
            params.validate()?;
            let spec = resolve_pair(&pair_name, GameKind::Extended, &opts)?;
            let transcript = run_protocol_b_with_spec(&params, &spec)?;
            (ProtocolParams::B(params), spec, transcript)
        }
        other => bail!("unknown protocol {other:?} (expected a or b)"),
    };

    write_json(&ctx.out, "transcript.json", &transcript)?;
    let rows: Vec<Vec<String>> = transcript
        .blocks
        .iter()
        .map(|b| {
            vec![
                b.index.to_string(),
                b.is_bell.to_string(),
                b.input_a.to_string(),
                b.input_b.to_string(),
                b.mismatch_count.to_string(),
                b.passed.to_string(),
            ]
        })
        .collect();
    write_csv(
        &ctx.out,
        "blocks.csv",
        &["index", "is_bell", "input_a", "input_b", "mismatch_count", "passed"],
        &rows,
    )?;
    let report =
        Report::new(RunConfigEcho { params, pair: spec }, RunPayload { stats: transcript_stats(&transcript) });
    write_json(&ctx.out, "stats.json", &report)?;

    if transcript.accepted {
        println!(
            "run: accepted ({} blocks of {} rounds, {} Bell blocks)",
            transcript.blocks.len(),
            transcript.k,
            transcript.bell_set.len()
        );
        Ok(0)
    } else {
        let at = transcript
            .first_failure
            .map(|i| format!(" at block {i}"))
            .unwrap_or_default();
        println!("run: rejected{at}");
        Ok(2)
    }
}

// ---------------------------------------------------------------------------
// guess

#[derive(Serialize)]
struct GuessConfigEcho {
    pair: PairSpec,
    game: GuessingConfig,
}

#[derive(Serialize)]
struct GuessPayload {
    result: GuessingResult,
}

pub fn guess(ctx: &Ctx, args: &GuessArgs) -> Result<u8> {
    let section = &ctx.file.guess;
    let seed = require_seed(ctx)?;
    let k = require(args.k, section.k, "k")?;
    let trials = ctx
        .trials
        .or(section.trials)
        .or(ctx.file.trials)
        .context("trials is required (pass --trials or set it in the config file)")?;
    let decision_radius =
        resolve(args.decision_radius, section.decision_radius, DEFAULT_DECISION_RADIUS);
    let b0_mode = resolve(args.b0_mode.clone(), section.b0_mode.clone(), "calibrate".into());
    let b0 = match b0_mode.as_str() {
        "calibrate" => B0Spec::Calibrate {
            samples: resolve(
                args.calibration_samples,
                section.calibration_samples,
                DEFAULT_CALIBRATION_SAMPLES,
            ),
        },
        "known" => B0Spec::Known,
        "fixed" => {
            let hex = require(args.b0_hex.clone(), section.b0_hex.clone(), "b0-hex")?;
            B0Spec::Fixed { bits: BitString(hex_to_bits(&hex, k as usize)?) }
        }
        other => bail!("unknown b0 mode {other:?} (expected calibrate, known, or fixed)"),
    };
    let pair_name = resolve(args.pair.clone(), section.pair.clone(), "honest".into());
    let opts = PairOptions {
        fa: args.fa.clone().or_else(|| section.fa.clone()),
        fb: args.fb.clone().or_else(|| section.fb.clone()),
        gamma: args.gamma.or(section.gamma),
        b0_seed: args.b0_seed.or(section.b0_seed),
        cheating_k: Some(k),
    };
    let spec = resolve_pair(&pair_name, GameKind::Chsh, &opts)?;
    let config = GuessingConfig { k, trials, b0, decision_radius, master_seed: seed };
    let result = run_attack(&spec, &config)?;

    let bound_note = result
        .bound
        .map(|b| format!(", lemma bound {b}"))
        .unwrap_or_default();
    println!(
        "guess: success {:.4} over {} trials (95% CI [{:.4}, {:.4}]{bound_note})",
        result.estimate, result.trials, result.wilson_ci.0, result.wilson_ci.1
    );
    let report = Report::new(GuessConfigEcho { pair: spec, game: config }, GuessPayload { result });
    write_json(&ctx.out, "guess.json", &report)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// entropy

#[derive(Serialize)]
struct EntropyConfigEcho {
    epsilon: f64,
    alpha: Option<f64>,
    support_size: usize,
    outcome_bits: usize,
}

#[derive(Serialize)]
struct WitnessEcho {
    /// High-probability outcomes as 0/1 strings, lexicographically sorted.
    outcomes: Vec<String>,
    mass: f64,
}

#[derive(Serialize)]
struct EntropyPayload {
    min_entropy: f64,
    smooth_min_entropy: f64,
    /// Present when alpha was given and the smooth min-entropy is <= alpha.
    witness: Option<WitnessEcho>,
}

pub fn entropy(ctx: &Ctx, args: &EntropyArgs) -> Result<u8> {
    let section = &ctx.file.entropy;
    let input = require(args.input.clone(), section.input.clone(), "input")?;
    let epsilon = resolve(args.epsilon, section.epsilon, 0.0);
    let alpha = args.alpha.or(section.alpha);

    let text = std::fs::read_to_string(&input)
        .with_context(|| format!("reading distribution file {}", input.display()))?;
    let dist: Distribution = serde_json::from_str(&text).with_context(|| {
        format!(
            "parsing {} (expected {{\"outcomes\": [\"0110\", ...], \"probs\": [...]}})",
            input.display()
        )
    })?;

    let h_min = min_entropy(&dist);
    let h_smooth = smooth_min_entropy(&dist, epsilon)?;
    let witness = match alpha {
        Some(alpha) => smoothcap_witness(&dist, epsilon, alpha)?.map(|w| WitnessEcho {
            outcomes: w
                .outcomes
                .iter()
                .map(|o| o.iter().map(|&b| if b { '1' } else { '0' }).collect())
                .collect(),
            mass: w.mass,
        }),
        None => None,
    };

    let witness_note = match (&alpha, &witness) {
        (Some(_), Some(w)) => format!(", witness mass {:.6}", w.mass),
        (Some(a), None) => format!(", no witness at alpha = {a}"),
        _ => String::new(),
    };
    println!("entropy: H_min {h_min:.6}, smooth H_min({epsilon}) {h_smooth:.6}{witness_note}");

    let report = Report::new(
        EntropyConfigEcho {
            epsilon,
            alpha,
            support_size: dist.support_size(),
            outcome_bits: dist.outcomes()[0].len(),
        },
        EntropyPayload { min_entropy: h_min, smooth_min_entropy: h_smooth, witness },
    );
    write_json(&ctx.out, "entropy.json", &report)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// design

#[derive(Serialize)]
struct DesignConfigEcho {
    r: usize,
    set_size: u64,
    rho: f64,
    budget: u64,
}

#[derive(Serialize)]
struct DesignPayload {
    design: WeakDesign,
}

pub fn design(ctx: &Ctx, args: &DesignArgs) -> Result<u8> {
    let section = &ctx.file.design;
    let r = require(args.r, section.r, "r")? as usize;
    let set_size = require(args.set_size, section.set_size, "set-size")?;
    let rho = resolve(args.rho, section.rho, DEFAULT_RHO);
    // The greedy builder needs up to ~4 set_size^2 universe bits at the
    // default rho before overlaps fit, so default generously.
    let budget =
        resolve(args.budget, section.budget, 4 * set_size.saturating_mul(set_size));

    let design = build_weak_design(r, set_size, rho, budget)?;
    println!(
        "design: {} sets of size {} in a {}-bit universe (rho = {rho})",
        design.r(),
        design.set_size(),
        design.s()
    );
    let report = Report::new(DesignConfigEcho { r, set_size, rho, budget }, DesignPayload { design });
    write_json(&ctx.out, "design.json", &report)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// extract

#[derive(Serialize)]
struct ExtractConfigEcho {
    m: u64,
    t: u64,
    r: usize,
    budget: u64,
    input_hex: String,
    seed_hex: String,
}

#[derive(Serialize)]
struct ExtractPayload {
    output: BitString,
    output_hex: String,
}

pub fn extract_cmd(ctx: &Ctx, args: &ExtractArgs) -> Result<u8> {
    let section = &ctx.file.extract;
    let m = require(args.m, section.m, "m")?;
    let t = resolve(args.t, section.t, 1);
    let r = require(args.r, section.r, "r")? as usize;
    let default_budget = if m.is_power_of_two() && m >= 2 {
        let set_size = t * u64::from(m.trailing_zeros());
        4 * set_size.saturating_mul(set_size).max(1)
    } else {
        1 // standard() rejects such an m with a proper error
    };
    let budget = resolve(args.budget, section.budget, default_budget);
    let input_hex = require(args.input_hex.clone(), section.input_hex.clone(), "input-hex")?;
    let seed_hex = require(args.seed_hex.clone(), section.seed_hex.clone(), "seed-hex")?;

    let params = ExtractorParams::standard(m, t, r, budget)?;
    let x = hex_to_bits(&input_hex, m as usize).context("parsing --input-hex")?;
    let seed =
        hex_to_bits(&seed_hex, params.seed_len() as usize).context("parsing --seed-hex")?;
    let output = extract(&x, &seed, &params)?;
    let output_hex = bits_to_hex(&output);

    println!("extract: {} bits in, {} bits out: {output_hex}", m, output.len());
    let report = Report::new(
        ExtractConfigEcho {
            m,
            t,
            r,
            budget,
            input_hex: bits_to_hex(&x),
            seed_hex: bits_to_hex(&seed),
        },
        ExtractPayload { output: BitString(output), output_hex },
    );
    write_json(&ctx.out, "extract.json", &report)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify

pub fn verify(ctx: &Ctx, args: &VerifyArgs) -> Result<u8> {
    let file: PathBuf = require(args.file.clone(), ctx.file.verify.file.clone(), "file")?;
    let text = std::fs::read_to_string(&file)
        .with_context(|| format!("reading {}", file.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {} as JSON", file.display()))?;

    if value.get("format_version").is_some() && value.get("blocks").is_some() {
        let transcript = match Transcript::from_json(&text) {
            Ok(t) => t,
            Err(e) => {
                println!("verify: malformed transcript: {e}");
                return Ok(2);
            }
        };
        return match verify_transcript(&transcript) {
            Ok(()) => {
                println!(
                    "verify: transcript ok (accepted = {}, {} blocks)",
                    transcript.accepted,
                    transcript.blocks.len()
                );
                Ok(0)
            }
            Err(e) => {
                println!("verify: transcript invalid: {e}");
                Ok(2)
            }
        };
    }

    // A design file: either the bare design or a report wrapping one.
    let design_value = if value.get("sets").is_some() {
        value
    } else if let Some(inner) = value.get("design") {
        inner.clone()
    } else {
        bail!("unrecognized file {}: expected a transcript or weak-design JSON", file.display());
    };
    match serde_json::from_value::<WeakDesign>(design_value) {
        Ok(design) => match design.check() {
            Ok(()) => {
                println!(
                    "verify: design ok ({} sets of size {} in a {}-bit universe)",
                    design.r(),
                    design.set_size(),
                    design.s()
                );
                Ok(0)
            }
            Err(e) => {
                println!("verify: design invalid: {e}");
                Ok(2)
            }
        },
        Err(e) => {
            println!("verify: design invalid: {e}");
            Ok(2)
        }
    }
}
