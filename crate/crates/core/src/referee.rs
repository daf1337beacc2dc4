//! Referee: drives device pairs through the two expansion protocols and
//! records everything needed to audit the run.
//!
//! Both protocols share one shape. The run is split into `m` blocks of `k`
//! identical-input rounds. A sparse random subset of blocks (each block
//! independently with probability `1/ell`) becomes a Bell block with random
//! inputs; every other block uses the fixed cheap input pair. A block that
//! violates its acceptance rule rejects the whole run and aborts immediately,
//! so a transcript is complete up to and including the first failing block.
//!
//! Protocol A plays the CHSH game: a block passes when the number of rounds
//! with `a xor b != x and y` is at most `ceil(0.16 k)`. Protocol B plays the
//! extended game with inputs A0, A1, B0, B1: equal-input blocks must agree
//! exactly, `y = B0` blocks must stay within relative Hamming distance 0.16,
//! and `x = A1, y = A0` blocks must land in the window `[0.49, 0.51]`.
//!
//! Randomness accounting reports both the Shannon content of what the
//! referee consumed (`m h(p)` for the Bell-set choice plus 2 bits per
//! executed Bell block) and the raw bits actually drawn from its stream.

use crate::analysis::binary_entropy;
use crate::bits::BitString;
use crate::devices::{DeviceError, DevicePair, ExtendedSymbol, GameKind, InputSymbol, PairSpec, Side};
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TRANSCRIPT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum RefereeError {
    #[error("invalid protocol parameters: {0}")]
    InvalidParams(String),
    #[error("protocol needs a {expected} pair but got a {got} pair")]
    GameKindMismatch { expected: GameKind, got: GameKind },
    #[error(transparent)]
    Device(#[from] DeviceError),
}

fn default_mismatch_fraction() -> f64 {
    0.16
}

fn default_window_low() -> f64 {
    0.49
}

fn default_window_high() -> f64 {
    0.51
}

/// Derived block length `ceil(10 log2(ell)^2)` shared by both protocols.
fn derived_k(ell: u64) -> u64 {
    let l = (ell as f64).log2();
    (10.0 * l * l).ceil() as u64
}

/// Ceiling of `fraction * count` with a guard against floating-point noise:
/// products within 1e-9 of an integer round to it instead of ceiling up.
fn ceil_fraction(fraction: f64, count: u64) -> u64 {
    let scaled = fraction * count as f64;
    let nearest = scaled.round();
    if (scaled - nearest).abs() < 1e-9 {
        nearest as u64
    } else {
        scaled.ceil() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolAParams {
    pub ell: u64,
    pub delta: u64,
    /// Replaces the derived `k = ceil(10 log2(ell)^2)` when set.
    #[serde(default)]
    pub k_override: Option<u64>,
    /// Per-block Bell probability; defaults to `1/ell`.
    #[serde(default)]
    pub bell_probability: Option<f64>,
    #[serde(default = "default_mismatch_fraction")]
    pub mismatch_threshold_fraction: f64,
    pub master_seed: u64,
}

impl ProtocolAParams {
    pub fn new(ell: u64, delta: u64, master_seed: u64) -> Self {
        ProtocolAParams {
            ell,
            delta,
            k_override: None,
            bell_probability: None,
            mismatch_threshold_fraction: default_mismatch_fraction(),
            master_seed,
        }
    }

    pub fn k(&self) -> u64 {
        self.k_override.unwrap_or_else(|| derived_k(self.ell))
    }

    pub fn m(&self) -> u64 {
        self.delta * self.ell
    }

    pub fn bell_probability(&self) -> f64 {
        self.bell_probability.unwrap_or(1.0 / self.ell as f64)
    }

    /// Per-block mismatch budget `ceil(0.16 k)`; a block fails when its
    /// mismatch count is strictly greater.
    pub fn threshold_count(&self) -> u64 {
        ceil_fraction(self.mismatch_threshold_fraction, self.k())
    }

    pub fn validate(&self) -> Result<(), RefereeError> {
        if self.ell < 2 {
            return Err(RefereeError::InvalidParams("ell must be at least 2".into()));
        }
        if self.k() == 0 {
            return Err(RefereeError::InvalidParams("block length k must be positive".into()));
        }
        let p = self.bell_probability();
        if !(p > 0.0 && p <= 1.0) {
            return Err(RefereeError::InvalidParams(format!(
                "bell probability {p} outside (0, 1]"
            )));
        }
        let f = self.mismatch_threshold_fraction;
        if !(f > 0.0 && f < 0.5) {
            return Err(RefereeError::InvalidParams(format!(
                "mismatch threshold fraction {f} outside (0, 0.5)"
            )));
        }
        Ok(())
    }
}

/// Parameters for the expansion target `(n, epsilon)`: a transcript of
/// `Delta = 1000 ceil(log2(1/epsilon))` blocks per `ell = ceil(c n)` aimed at
/// `n` extracted bits with soundness error `epsilon`. The box-use constant
/// `c` is configurable because only its order is pinned down.
pub fn protocol_a_params_for_target(
    n: u64,
    epsilon: f64,
    c: f64,
    master_seed: u64,
) -> Result<ProtocolAParams, RefereeError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(RefereeError::InvalidParams(format!("epsilon {epsilon} outside (0, 1)")));
    }
    if !(c > 0.0) || n == 0 {
        return Err(RefereeError::InvalidParams("need n >= 1 and c > 0".into()));
    }
    let delta = 1000 * (1.0 / epsilon).log2().ceil() as u64;
    let ell = (c * n as f64).ceil() as u64;
    let params = ProtocolAParams::new(ell.max(2), delta, master_seed);
    params.validate()?;
    Ok(params)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolBParams {
    pub ell: u64,
    /// Box-use constant: `m = ceil(c * ell * log2(ell)^2)` unless overridden.
    pub c: f64,
    #[serde(default)]
    pub k_override: Option<u64>,
    #[serde(default)]
    pub m_override: Option<u64>,
    /// Relative-distance budget for `y = B0` Bell blocks (closed comparison).
    #[serde(default = "default_mismatch_fraction")]
    pub mismatch_threshold_fraction: f64,
    /// Closed acceptance window for `x = A1, y = A0` Bell blocks.
    #[serde(default = "default_window_low")]
    pub window_low: f64,
    #[serde(default = "default_window_high")]
    pub window_high: f64,
    pub master_seed: u64,
}

impl ProtocolBParams {
    pub fn new(ell: u64, c: f64, master_seed: u64) -> Self {
        ProtocolBParams {
            ell,
            c,
            k_override: None,
            m_override: None,
            mismatch_threshold_fraction: default_mismatch_fraction(),
            window_low: default_window_low(),
            window_high: default_window_high(),
            master_seed,
        }
    }

    pub fn k(&self) -> u64 {
        self.k_override.unwrap_or_else(|| derived_k(self.ell))
    }

    pub fn m(&self) -> u64 {
        self.m_override.unwrap_or_else(|| {
            let l = (self.ell as f64).log2();
            (self.c * self.ell as f64 * l * l).ceil() as u64
        })
    }

    pub fn bell_probability(&self) -> f64 {
        1.0 / self.ell as f64
    }

    pub fn validate(&self) -> Result<(), RefereeError> {
        if self.ell < 2 {
            return Err(RefereeError::InvalidParams("ell must be at least 2".into()));
        }
        if self.m_override.is_none() && !(self.c > 0.0) {
            return Err(RefereeError::InvalidParams(format!(
                "box-use constant c = {} must be positive",
                self.c
            )));
        }
        if self.k() == 0 {
            return Err(RefereeError::InvalidParams("block length k must be positive".into()));
        }
        let f = self.mismatch_threshold_fraction;
        if !(f > 0.0 && f < 0.5) {
            return Err(RefereeError::InvalidParams(format!(
                "mismatch threshold fraction {f} outside (0, 0.5)"
            )));
        }
        if !(0.0 <= self.window_low && self.window_low < self.window_high && self.window_high <= 1.0)
        {
            return Err(RefereeError::InvalidParams(format!(
                "window [{}, {}] is not a subinterval of [0, 1]",
                self.window_low, self.window_high
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol", content = "params", rename_all = "snake_case")]
pub enum ProtocolParams {
    A(ProtocolAParams),
    B(ProtocolBParams),
}

/// One block of `k` identical-input rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub index: u64,
    pub is_bell: bool,
    pub input_a: InputSymbol,
    pub input_b: InputSymbol,
    pub output_a: BitString,
    pub output_b: BitString,
    /// Hamming weight of the block's relevant comparison vector:
    /// `a xor b xor (x and y)^k` for protocol A, `a xor b` for protocol B.
    pub mismatch_count: u64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomnessCost {
    /// Information content of the referee's draws: `m h(p) + 2 |Bell blocks executed|`.
    pub shannon_bits: f64,
    /// Raw bits actually consumed from the referee's stream.
    pub raw_bits_drawn: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub format_version: u32,
    pub params: ProtocolParams,
    /// Resolved block length.
    pub k: u64,
    /// Resolved block count the run would execute if nothing failed.
    pub m: u64,
    /// Sorted indices of the Bell blocks chosen up front.
    pub bell_set: Vec<u64>,
    pub blocks: Vec<BlockRecord>,
    pub accepted: bool,
    pub first_failure: Option<u64>,
    pub randomness_cost: RandomnessCost,
}

impl Transcript {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// Chooses the Bell set: each block index joins independently with
/// probability `p`. Returns sorted indices.
pub fn select_bell_blocks(
    m: u64,
    p: f64,
    rng: &mut RngStream,
) -> Result<Vec<u64>, RefereeError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(RefereeError::InvalidParams(format!("bell probability {p} outside (0, 1]")));
    }
    Ok((0..m).filter(|_| rng.bernoulli(p)).collect())
}

/// Runs one block: side A then side B, `k` rounds each with fixed inputs.
fn drive_block(
    pair: &mut DevicePair,
    input_a: InputSymbol,
    input_b: InputSymbol,
    k: u64,
) -> Result<(Vec<bool>, Vec<bool>), DeviceError> {
    let mut a = Vec::with_capacity(k as usize);
    let mut b = Vec::with_capacity(k as usize);
    for _ in 0..k {
        a.push(pair.respond(Side::A, input_a)?);
        b.push(pair.respond(Side::B, input_b)?);
    }
    Ok((a, b))
}

fn mismatch_vs_target(a: &[bool], b: &[bool], target: bool) -> u64 {
    a.iter().zip(b).filter(|(&x, &y)| (x ^ y) != target).count() as u64
}

fn require_kind(pair: &DevicePair, expected: GameKind) -> Result<(), RefereeError> {
    if pair.game_kind() != expected {
        return Err(RefereeError::GameKindMismatch { expected, got: pair.game_kind() });
    }
    Ok(())
}

/// Protocol A: CHSH blocks with a `ceil(0.16 k)` mismatch budget.
pub fn run_protocol_a(
    params: &ProtocolAParams,
    pair: &mut DevicePair,
) -> Result<Transcript, RefereeError> {
    params.validate()?;
    require_kind(pair, GameKind::Chsh)?;
    let k = params.k();
    let m = params.m();
    let p = params.bell_probability();
    let threshold = params.threshold_count();
    let mut rng = RngStream::from_master(params.master_seed, "referee.protocol-a", 0);

    let bell_set = select_bell_blocks(m, p, &mut rng)?;
    let mut is_bell = vec![false; m as usize];
    for &i in &bell_set {
        is_bell[i as usize] = true;
    }

    let mut blocks = Vec::new();
    let mut bell_executed = 0u64;
    let mut first_failure = None;
    for index in 0..m {
        let bell = is_bell[index as usize];
        let (x, y) = if bell {
            bell_executed += 1;
            (rng.next_bit(), rng.next_bit())
        } else {
            (false, false)
        };
        let (a, b) = drive_block(pair, InputSymbol::Bit(x), InputSymbol::Bit(y), k)?;
        let mismatch_count = mismatch_vs_target(&a, &b, x && y);
        let passed = mismatch_count <= threshold;
        blocks.push(BlockRecord {
            index,
            is_bell: bell,
            input_a: InputSymbol::Bit(x),
            input_b: InputSymbol::Bit(y),
            output_a: BitString(a),
            output_b: BitString(b),
            mismatch_count,
            passed,
        });
        if !passed {
            first_failure = Some(index);
            break;
        }
    }

    let shannon_bits = m as f64 * binary_entropy(p) + 2.0 * bell_executed as f64;
    Ok(Transcript {
        format_version: TRANSCRIPT_FORMAT_VERSION,
        params: ProtocolParams::A(params.clone()),
        k,
        m,
        bell_set,
        blocks,
        accepted: first_failure.is_none(),
        first_failure,
        randomness_cost: RandomnessCost { shannon_bits, raw_bits_drawn: rng.bits_drawn() },
    })
}

/// Protocol B: extended-game blocks; equal inputs must agree exactly.
pub fn run_protocol_b(
    params: &ProtocolBParams,
    pair: &mut DevicePair,
) -> Result<Transcript, RefereeError> {
    params.validate()?;
    require_kind(pair, GameKind::Extended)?;
    let k = params.k();
    let m = params.m();
    let p = params.bell_probability();
    let mut rng = RngStream::from_master(params.master_seed, "referee.protocol-b", 0);

    let bell_set = select_bell_blocks(m, p, &mut rng)?;
    let mut is_bell = vec![false; m as usize];
    for &i in &bell_set {
        is_bell[i as usize] = true;
    }

    let mut blocks = Vec::new();
    let mut bell_executed = 0u64;
    let mut first_failure = None;
    for index in 0..m {
        let bell = is_bell[index as usize];
        let (x, y) = if bell {
            bell_executed += 1;
            // Input sampling order is pinned: x first, then y.
            let x = if rng.next_bit() { ExtendedSymbol::A1 } else { ExtendedSymbol::A0 };
            let y = if rng.next_bit() { ExtendedSymbol::B0 } else { ExtendedSymbol::A0 };
            (x, y)
        } else {
            (ExtendedSymbol::A0, ExtendedSymbol::A0)
        };
        let (a, b) = drive_block(pair, InputSymbol::Ext(x), InputSymbol::Ext(y), k)?;
        let mismatch_count = mismatch_vs_target(&a, &b, false);
        let passed = protocol_b_block_passes(params, bell, x, y, mismatch_count, k);
        blocks.push(BlockRecord {
            index,
            is_bell: bell,
            input_a: InputSymbol::Ext(x),
            input_b: InputSymbol::Ext(y),
            output_a: BitString(a),
            output_b: BitString(b),
            mismatch_count,
            passed,
        });
        if !passed {
            first_failure = Some(index);
            break;
        }
    }

    let shannon_bits = m as f64 * binary_entropy(p) + 2.0 * bell_executed as f64;
    Ok(Transcript {
        format_version: TRANSCRIPT_FORMAT_VERSION,
        params: ProtocolParams::B(params.clone()),
        k,
        m,
        bell_set,
        blocks,
        accepted: first_failure.is_none(),
        first_failure,
        randomness_cost: RandomnessCost { shannon_bits, raw_bits_drawn: rng.bits_drawn() },
    })
}

/// Protocol B acceptance rule for one block.
fn protocol_b_block_passes(
    params: &ProtocolBParams,
    is_bell: bool,
    x: ExtendedSymbol,
    y: ExtendedSymbol,
    mismatch_count: u64,
    k: u64,
) -> bool {
    if !is_bell {
        return mismatch_count == 0;
    }
    let d = mismatch_count as f64 / k as f64;
    (mismatch_count == 0 && x == y)
        || (d <= params.mismatch_threshold_fraction && y == ExtendedSymbol::B0)
        || (params.window_low <= d
            && d <= params.window_high
            && x == ExtendedSymbol::A1
            && y == ExtendedSymbol::A0)
}

/// Convenience wrapper: builds the pair from its spec (stream label
/// "protocol.pair" under the params' master seed) and runs protocol A.
pub fn run_protocol_a_with_spec(
    params: &ProtocolAParams,
    spec: &PairSpec,
) -> Result<Transcript, RefereeError> {
    let mut pair = spec.build(params.master_seed, "protocol.pair")?;
    run_protocol_a(params, &mut pair)
}

/// Same as [`run_protocol_a_with_spec`] for protocol B.
pub fn run_protocol_b_with_spec(
    params: &ProtocolBParams,
    spec: &PairSpec,
) -> Result<Transcript, RefereeError> {
    let mut pair = spec.build(params.master_seed, "protocol.pair")?;
    run_protocol_b(params, &mut pair)
}

#[derive(Debug, Error, PartialEq)]
pub enum TranscriptVerifyError {
    #[error("unsupported transcript format version {0}")]
    Version(u32),
    #[error("parameter echo is invalid: {0}")]
    Params(String),
    #[error("field {field} does not match its parameters (stored {stored}, derived {derived})")]
    EchoMismatch { field: &'static str, stored: u64, derived: u64 },
    #[error("bell set is invalid: {0}")]
    BellSet(String),
    #[error("block {index}: {problem}")]
    Block { index: u64, problem: String },
    #[error("acceptance flags are inconsistent: {0}")]
    Acceptance(String),
    #[error("randomness accounting is inconsistent: {0}")]
    Accounting(String),
}

/// Shannon bits recomputed from the transcript contents alone.
pub fn recompute_shannon_bits(t: &Transcript) -> f64 {
    let p = match &t.params {
        ProtocolParams::A(p) => p.bell_probability(),
        ProtocolParams::B(p) => p.bell_probability(),
    };
    let bell_executed = t.blocks.iter().filter(|b| b.is_bell).count() as f64;
    t.m as f64 * binary_entropy(p) + 2.0 * bell_executed
}

/// Re-derives every declared check of a transcript: parameter echo, Bell-set
/// shape, per-block rule outcomes recomputed from the stored bit vectors,
/// abort semantics, and the randomness accounting identities.
pub fn verify_transcript(t: &Transcript) -> Result<(), TranscriptVerifyError> {
    if t.format_version != TRANSCRIPT_FORMAT_VERSION {
        return Err(TranscriptVerifyError::Version(t.format_version));
    }
    let (k, m) = match &t.params {
        ProtocolParams::A(p) => {
            p.validate().map_err(|e| TranscriptVerifyError::Params(e.to_string()))?;
            (p.k(), p.m())
        }
        ProtocolParams::B(p) => {
            p.validate().map_err(|e| TranscriptVerifyError::Params(e.to_string()))?;
            (p.k(), p.m())
        }
    };
    if t.k != k {
        return Err(TranscriptVerifyError::EchoMismatch { field: "k", stored: t.k, derived: k });
    }
    if t.m != m {
        return Err(TranscriptVerifyError::EchoMismatch { field: "m", stored: t.m, derived: m });
    }

    if !t.bell_set.windows(2).all(|w| w[0] < w[1]) {
        return Err(TranscriptVerifyError::BellSet("indices not strictly increasing".into()));
    }
    if t.bell_set.iter().any(|&i| i >= m) {
        return Err(TranscriptVerifyError::BellSet("index beyond block count".into()));
    }

    let expected_len = match t.first_failure {
        Some(i) => i + 1,
        None => m,
    };
    if t.blocks.len() as u64 != expected_len {
        return Err(TranscriptVerifyError::Acceptance(format!(
            "{} blocks recorded but first_failure = {:?} implies {}",
            t.blocks.len(),
            t.first_failure,
            expected_len
        )));
    }
    if t.accepted != t.first_failure.is_none() {
        return Err(TranscriptVerifyError::Acceptance(
            "accepted flag contradicts first_failure".into(),
        ));
    }

    for (position, block) in t.blocks.iter().enumerate() {
        let index = block.index;
        let fail = |problem: String| TranscriptVerifyError::Block { index, problem };
        if index != position as u64 {
            return Err(fail(format!("expected index {position}")));
        }
        if block.is_bell != t.bell_set.binary_search(&index).is_ok() {
            return Err(fail("is_bell flag disagrees with bell_set".into()));
        }
        if block.output_a.len() as u64 != k || block.output_b.len() as u64 != k {
            return Err(fail("output length differs from k".into()));
        }
        let recomputed = verify_block(t, block).map_err(fail)?;
        if recomputed.0 != block.mismatch_count {
            return Err(TranscriptVerifyError::Block {
                index,
                problem: format!(
                    "stored mismatch_count {} but recomputed {}",
                    block.mismatch_count, recomputed.0
                ),
            });
        }
        if recomputed.1 != block.passed {
            return Err(TranscriptVerifyError::Block {
                index,
                problem: format!("stored passed = {} disagrees with the rule", block.passed),
            });
        }
        let is_last = position + 1 == t.blocks.len();
        if !block.passed && (t.first_failure != Some(index) || !is_last) {
            return Err(TranscriptVerifyError::Acceptance(format!(
                "failing block {index} is not the recorded abort point"
            )));
        }
        if block.passed && t.first_failure == Some(index) {
            return Err(TranscriptVerifyError::Acceptance(format!(
                "first_failure points at passing block {index}"
            )));
        }
    }

    let shannon = recompute_shannon_bits(t);
    if (t.randomness_cost.shannon_bits - shannon).abs() > 1e-9 {
        return Err(TranscriptVerifyError::Accounting(format!(
            "stored shannon_bits {} but recomputed {}",
            t.randomness_cost.shannon_bits, shannon
        )));
    }
    if (t.randomness_cost.raw_bits_drawn as f64) < shannon {
        return Err(TranscriptVerifyError::Accounting(
            "raw bits drawn fall below the Shannon content".into(),
        ));
    }
    Ok(())
}

/// Recomputes `(mismatch_count, passed)` for one block from its stored data.
fn verify_block(t: &Transcript, block: &BlockRecord) -> Result<(u64, bool), String> {
    let a: &[bool] = &block.output_a;
    let b: &[bool] = &block.output_b;
    match &t.params {
        ProtocolParams::A(params) => {
            let (x, y) = match (block.input_a, block.input_b) {
                (InputSymbol::Bit(x), InputSymbol::Bit(y)) => (x, y),
                _ => return Err("protocol A inputs must be bits".into()),
            };
            if !block.is_bell && (x || y) {
                return Err("non-Bell blocks use inputs (0, 0)".into());
            }
            let mismatch = mismatch_vs_target(a, b, x && y);
            Ok((mismatch, mismatch <= params.threshold_count()))
        }
        ProtocolParams::B(params) => {
            let (x, y) = match (block.input_a, block.input_b) {
                (InputSymbol::Ext(x), InputSymbol::Ext(y)) => (x, y),
                _ => return Err("protocol B inputs must be extended symbols".into()),
            };
            if !block.is_bell && (x != ExtendedSymbol::A0 || y != ExtendedSymbol::A0) {
                return Err("non-Bell blocks use inputs (A0, A0)".into());
            }
            if block.is_bell
                && (!matches!(x, ExtendedSymbol::A0 | ExtendedSymbol::A1)
                    || !matches!(y, ExtendedSymbol::A0 | ExtendedSymbol::B0))
            {
                return Err("bell inputs outside {A0, A1} x {A0, B0}".into());
            }
            let mismatch = mismatch_vs_target(a, b, false);
            let passed =
                protocol_b_block_passes(params, block.is_bell, x, y, mismatch, t.k);
            Ok((mismatch, passed))
        }
    }
}
