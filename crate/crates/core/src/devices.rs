//! Device pairs: the untrusted boxes the referee and the guessing game drive.
//!
//! A pair exposes one operation, [`DevicePair::respond`]: endpoint `A` or `B`
//! receives one input symbol for its current round and returns one output
//! bit. Endpoints see only their own inputs; correlations come from hidden
//! shared state owned by the pair (a shared RNG substream plus strategy
//! constants). Rounds pair up by index — each endpoint's round counter
//! advances on every call — so drivers may interleave sides or run one side
//! a block ahead, as the guessing game does.
//!
//! The honest entangled strategies realize the exact quantum joint
//! distribution sequentially: whichever endpoint moves first in a round draws
//! from its marginal (uniform for the EPR pair at any angle), and the second
//! mover draws from the conditional given the first outcome. The cheating
//! pair is openly signaling (`is_signaling` returns true) and exists to
//! demonstrate the guessing-game attack; it requires side B to move first.

use crate::quantum::{joint_outcome_distribution, MeasurementAngle, TwoQubitState};
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DeviceError {
    #[error("input symbol {input} does not fit game kind {kind}")]
    InputKindMismatch { kind: GameKind, input: String },
    #[error("cheating pair requires side B to respond before side A (side A round {round})")]
    SignalingOrder { round: u64 },
    #[error("invalid device parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    Chsh,
    Extended,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::Chsh => "chsh",
            GameKind::Extended => "extended",
        })
    }
}

/// Input alphabet of the extended game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExtendedSymbol {
    A0,
    A1,
    B0,
    B1,
}

impl ExtendedSymbol {
    pub const ALL: [ExtendedSymbol; 4] =
        [ExtendedSymbol::A0, ExtendedSymbol::A1, ExtendedSymbol::B0, ExtendedSymbol::B1];

    fn index(self) -> usize {
        match self {
            ExtendedSymbol::A0 => 0,
            ExtendedSymbol::A1 => 1,
            ExtendedSymbol::B0 => 2,
            ExtendedSymbol::B1 => 3,
        }
    }
}

impl fmt::Display for ExtendedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtendedSymbol::A0 => "A0",
            ExtendedSymbol::A1 => "A1",
            ExtendedSymbol::B0 => "B0",
            ExtendedSymbol::B1 => "B1",
        })
    }
}

/// One round input: a bit for the CHSH game, a four-letter symbol for the
/// extended game. Serializes as the strings "0", "1", "A0", "A1", "B0", "B1".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InputSymbol {
    Bit(bool),
    Ext(ExtendedSymbol),
}

impl fmt::Display for InputSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSymbol::Bit(b) => f.write_str(if *b { "1" } else { "0" }),
            InputSymbol::Ext(s) => s.fmt(f),
        }
    }
}

impl std::str::FromStr for InputSymbol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "0" => Ok(InputSymbol::Bit(false)),
            "1" => Ok(InputSymbol::Bit(true)),
            "A0" => Ok(InputSymbol::Ext(ExtendedSymbol::A0)),
            "A1" => Ok(InputSymbol::Ext(ExtendedSymbol::A1)),
            "B0" => Ok(InputSymbol::Ext(ExtendedSymbol::B0)),
            "B1" => Ok(InputSymbol::Ext(ExtendedSymbol::B1)),
            other => Err(format!("unknown input symbol {other:?}")),
        }
    }
}

impl Serialize for InputSymbol {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for InputSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Measurement angle used by the honest CHSH strategy for `side` on `input`.
///
/// Side A measures at 0 or pi/4; side B at pi/8 or -pi/8. All four input
/// pairs then win with probability exactly cos^2(pi/8).
pub fn chsh_angle(side: Side, input: bool) -> MeasurementAngle {
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
    MeasurementAngle::new(match (side, input) {
        (Side::A, false) => 0.0,
        (Side::A, true) => FRAC_PI_4,
        (Side::B, false) => FRAC_PI_8,
        (Side::B, true) => -FRAC_PI_8,
    })
}

/// Measurement angle used by the honest extended strategy; both endpoints
/// share this map, so equal inputs always produce equal outputs.
pub fn extended_angle(symbol: ExtendedSymbol) -> MeasurementAngle {
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
    MeasurementAngle::new(match symbol {
        ExtendedSymbol::A0 => 0.0,
        ExtendedSymbol::A1 => FRAC_PI_4,
        ExtendedSymbol::B0 => FRAC_PI_8,
        ExtendedSymbol::B1 => -FRAC_PI_8,
    })
}

/// Derives the fixed block the cheating pair clings to on input 0. Depends
/// only on `b0_seed` and `k`, so referees and analysts can reconstruct it.
pub fn cheating_b0_bits(b0_seed: u64, k: u64) -> Vec<bool> {
    RngStream::from_master(b0_seed, "devices.cheating.b0", 0).bit_vector(k as usize)
}

/// Buildable strategy descriptor: name plus parameters. This is what CLI
/// configs and experiment records carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum PairSpec {
    /// EPR pair with the standard CHSH measurement angles.
    HonestChsh,
    /// EPR pair with the shared four-angle map of the extended game.
    HonestExtended,
    /// Fixed local tables: `fa[input]`, `fb[input]` (lengths 2 for the CHSH
    /// game, 4 in symbol order A0, A1, B0, B1 for the extended game).
    Deterministic { game: GameKind, fa: Vec<bool>, fb: Vec<bool> },
    /// Both endpoints always answer 0.
    AllZeros { game: GameKind },
    /// Both endpoints answer with the same fresh shared random bit each round.
    SharedUniform { game: GameKind },
    /// Signaling attack pair for the guessing game: on block input 0, side B
    /// outputs a fixed k-bit block with probability `1 - gamma` and a uniform
    /// block otherwise (uniform on block input 1 too); side A sees `(x, y, b)`
    /// and answers `a = b xor (x and y)^k`, so the CHSH condition holds with
    /// zero violations.
    CheatingLowEntropy { gamma: f64, k: u64, b0_seed: u64 },
}

impl PairSpec {
    pub fn game_kind(&self) -> GameKind {
        match self {
            PairSpec::HonestChsh | PairSpec::CheatingLowEntropy { .. } => GameKind::Chsh,
            PairSpec::HonestExtended => GameKind::Extended,
            PairSpec::Deterministic { game, .. }
            | PairSpec::AllZeros { game }
            | PairSpec::SharedUniform { game } => *game,
        }
    }

    /// Exact per-input-pair CHSH success where a closed form exists
    /// (win iff `a xor b = x and y`).
    pub fn closed_form_chsh_success(&self, x: bool, y: bool) -> Option<f64> {
        match self {
            PairSpec::HonestChsh => {
                let joint = joint_outcome_distribution(
                    &TwoQubitState::epr_pair(),
                    chsh_angle(Side::A, x),
                    chsh_angle(Side::B, y),
                );
                Some(if x && y { 1.0 - joint.p_equal() } else { joint.p_equal() })
            }
            PairSpec::Deterministic { game: GameKind::Chsh, fa, fb } => {
                let win = fa[usize::from(x)] ^ fb[usize::from(y)] == (x && y);
                Some(if win { 1.0 } else { 0.0 })
            }
            PairSpec::AllZeros { game: GameKind::Chsh }
            | PairSpec::SharedUniform { game: GameKind::Chsh } => {
                Some(if x && y { 0.0 } else { 1.0 })
            }
            PairSpec::CheatingLowEntropy { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Instantiates the pair. `label` isolates this instance's RNG substream
    /// under the master seed.
    pub fn build(&self, master_seed: u64, label: &str) -> Result<DevicePair, DeviceError> {
        let rng = RngStream::from_master(master_seed, &format!("devices.{label}"), 0);
        let kind = self.game_kind();
        let state = match self {
            PairSpec::HonestChsh => StrategyState::Entangled {
                p_equal: chsh_p_equal_table(),
                rng,
                pending: VecDeque::new(),
            },
            PairSpec::HonestExtended => StrategyState::Entangled {
                p_equal: extended_p_equal_table(),
                rng,
                pending: VecDeque::new(),
            },
            PairSpec::Deterministic { game, fa, fb } => {
                let expected = match game {
                    GameKind::Chsh => 2,
                    GameKind::Extended => 4,
                };
                if fa.len() != expected || fb.len() != expected {
                    return Err(DeviceError::InvalidParameter(format!(
                        "deterministic tables for the {game} game need {expected} entries"
                    )));
                }
                StrategyState::Deterministic { fa: fa.clone(), fb: fb.clone() }
            }
            PairSpec::AllZeros { game } => {
                let entries = match game {
                    GameKind::Chsh => 2,
                    GameKind::Extended => 4,
                };
                StrategyState::Deterministic {
                    fa: vec![false; entries],
                    fb: vec![false; entries],
                }
            }
            PairSpec::SharedUniform { .. } => {
                StrategyState::SharedUniform { rng, pending: VecDeque::new() }
            }
            PairSpec::CheatingLowEntropy { gamma, k, b0_seed } => {
                if !(0.0..=1.0).contains(gamma) {
                    return Err(DeviceError::InvalidParameter(format!(
                        "gamma = {gamma} outside [0, 1]"
                    )));
                }
                if *k == 0 {
                    return Err(DeviceError::InvalidParameter("block length k must be positive".into()));
                }
                StrategyState::Cheating {
                    gamma: *gamma,
                    b0: cheating_b0_bits(*b0_seed, *k),
                    rng,
                    blocks: VecDeque::new(),
                }
            }
        };
        let signaling = matches!(self, PairSpec::CheatingLowEntropy { .. });
        Ok(DevicePair { kind, signaling, rounds: [0, 0], state })
    }
}

/// `P(a = b)` for the honest EPR strategies, cached per input pair so the
/// per-round hot path avoids trigonometry. Entry `[i][j]` is indexed by side
/// A's symbol `i` and side B's symbol `j`.
#[derive(Debug, Clone)]
struct PEqualTable {
    table: [[f64; 4]; 4],
}

fn chsh_p_equal_table() -> PEqualTable {
    let epr = TwoQubitState::epr_pair();
    let mut table = [[0.0; 4]; 4];
    for (i, x) in [false, true].into_iter().enumerate() {
        for (j, y) in [false, true].into_iter().enumerate() {
            table[i][j] =
                joint_outcome_distribution(&epr, chsh_angle(Side::A, x), chsh_angle(Side::B, y))
                    .p_equal();
        }
    }
    PEqualTable { table }
}

fn extended_p_equal_table() -> PEqualTable {
    let epr = TwoQubitState::epr_pair();
    let mut table = [[0.0; 4]; 4];
    for a in ExtendedSymbol::ALL {
        for b in ExtendedSymbol::ALL {
            table[a.index()][b.index()] =
                joint_outcome_distribution(&epr, extended_angle(a), extended_angle(b)).p_equal();
        }
    }
    PEqualTable { table }
}

#[derive(Debug, Clone, Copy)]
struct FirstMove {
    side: Side,
    symbol_index: usize,
    outcome: bool,
}

#[derive(Debug, Clone)]
struct CheatingBlock {
    y: bool,
    bits: Vec<bool>,
}

#[derive(Debug, Clone)]
enum StrategyState {
    Entangled { p_equal: PEqualTable, rng: RngStream, pending: VecDeque<(u64, FirstMove)> },
    Deterministic { fa: Vec<bool>, fb: Vec<bool> },
    SharedUniform { rng: RngStream, pending: VecDeque<(u64, bool)> },
    Cheating { gamma: f64, b0: Vec<bool>, rng: RngStream, blocks: VecDeque<(u64, CheatingBlock)> },
}

/// A pair of black boxes driven in lockstep rounds.
#[derive(Debug, Clone)]
pub struct DevicePair {
    kind: GameKind,
    signaling: bool,
    rounds: [u64; 2],
    state: StrategyState,
}

impl DevicePair {
    pub fn game_kind(&self) -> GameKind {
        self.kind
    }

    /// True only for attack-demo pairs whose endpoints share input data.
    pub fn is_signaling(&self) -> bool {
        self.signaling
    }

    pub fn rounds_played(&self, side: Side) -> u64 {
        self.rounds[side_index(side)]
    }

    /// One output bit for `side`'s current round given its input symbol.
    pub fn respond(&mut self, side: Side, input: InputSymbol) -> Result<bool, DeviceError> {
        let symbol_index = self.symbol_index(input)?;
        let round = self.rounds[side_index(side)];
        let out = match &mut self.state {
            StrategyState::Entangled { p_equal, rng, pending } => {
                // The partner's move for this round sits at the front in
                // every lockstep driving pattern, so the scan is O(1) there.
                let first = pending
                    .iter()
                    .position(|&(r, _)| r == round)
                    .and_then(|i| pending.remove(i))
                    .map(|(_, f)| f);
                match first {
                    None => {
                        // First mover: EPR marginals are uniform at every
                        // angle, so a fair bit is the exact marginal.
                        let outcome = rng.next_bit();
                        pending.push_back((round, FirstMove { side, symbol_index, outcome }));
                        outcome
                    }
                    Some(first) => {
                        let p_same = match first.side {
                            Side::A => p_equal.table[first.symbol_index][symbol_index],
                            Side::B => p_equal.table[symbol_index][first.symbol_index],
                        };
                        if rng.bernoulli(p_same) {
                            first.outcome
                        } else {
                            !first.outcome
                        }
                    }
                }
            }
            StrategyState::Deterministic { fa, fb } => match side {
                Side::A => fa[symbol_index],
                Side::B => fb[symbol_index],
            },
            StrategyState::SharedUniform { rng, pending } => {
                let shared = pending
                    .iter()
                    .position(|&(r, _)| r == round)
                    .and_then(|i| pending.remove(i))
                    .map(|(_, b)| b);
                match shared {
                    None => {
                        let bit = rng.next_bit();
                        pending.push_back((round, bit));
                        bit
                    }
                    Some(bit) => bit,
                }
            }
            StrategyState::Cheating { gamma, b0, rng, blocks } => {
                let k = b0.len() as u64;
                let block_index = round / k;
                let position = (round % k) as usize;
                let y_input = match input {
                    InputSymbol::Bit(b) => b,
                    InputSymbol::Ext(_) => unreachable!("kind checked above"),
                };
                match side {
                    Side::B => {
                        if position == 0 {
                            let honest = !y_input && !rng.bernoulli(*gamma);
                            let bits = if honest {
                                b0.clone()
                            } else {
                                rng.bit_vector(b0.len())
                            };
                            blocks.push_back((block_index, CheatingBlock { y: y_input, bits }));
                        }
                        blocks
                            .iter()
                            .rev()
                            .find(|(i, _)| *i == block_index)
                            .expect("block drawn at position 0")
                            .1
                            .bits[position]
                    }
                    Side::A => {
                        let idx = blocks
                            .iter()
                            .position(|(i, _)| *i == block_index)
                            .ok_or(DeviceError::SignalingOrder { round })?;
                        let bit = {
                            let block = &blocks[idx].1;
                            block.bits[position] ^ (y_input && block.y)
                        };
                        if position == b0.len() - 1 && self.rounds[side_index(Side::B)] > round {
                            blocks.remove(idx);
                        }
                        bit
                    }
                }
            }
        };
        self.rounds[side_index(side)] += 1;
        Ok(out)
    }

    fn symbol_index(&self, input: InputSymbol) -> Result<usize, DeviceError> {
        match (self.kind, input) {
            (GameKind::Chsh, InputSymbol::Bit(b)) => Ok(usize::from(b)),
            (GameKind::Extended, InputSymbol::Ext(s)) => Ok(s.index()),
            (kind, input) => Err(DeviceError::InputKindMismatch { kind, input: input.to_string() }),
        }
    }
}

fn side_index(side: Side) -> usize {
    match side {
        Side::A => 0,
        Side::B => 1,
    }
}
