//! Guessing-game attack: can Alice's device predict Bob's secret input?
//!
//! The game is a thought experiment that turns low output entropy into a
//! no-signaling violation. Bob feeds a secret uniform bit `y` to device B for
//! a block of `k` rounds; Alice feeds a uniform `x` to device A, compares her
//! own output block `a` against a reference block `b0` (the block B is most
//! likely to produce on `y = 0`), and claims `y = 0` exactly when the
//! relative Hamming distance `d_H(a, b0)` falls below a decision radius. For
//! any non-signaling pair the claim is independent of `y`, so the success
//! probability is exactly 1/2; a pair whose `y = 0` output is nearly
//! deterministic can be exploited to succeed with probability
//! `1/2 + (1/4 - 2 beta - gamma)`.
//!
//! The radius (default 0.2) must separate the two Hamming shells the
//! argument relies on: winning blocks sit within 0.16 of `b0`, losing ones
//! beyond 0.34 of it.

use crate::analysis::wilson_interval;
use crate::bits::{relative_distance, BitString};
use crate::devices::{
    cheating_b0_bits, DeviceError, DevicePair, GameKind, InputSymbol, PairSpec, Side,
};
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const DEFAULT_DECISION_RADIUS: f64 = 0.2;
/// Open interval of admissible decision radii (exclusive on both ends).
pub const DECISION_RADIUS_RANGE: (f64, f64) = (0.16, 0.34);

#[derive(Debug, Error, PartialEq)]
pub enum GuessingError {
    #[error("invalid guessing configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Device(#[from] DeviceError),
}

/// How the attack obtains its reference block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum B0Spec {
    /// Use this block verbatim.
    Fixed { bits: BitString },
    /// Estimate B's modal `y = 0` block over this many preparatory runs.
    Calibrate { samples: u64 },
    /// Read the favored block straight out of a cheating pair's spec.
    Known,
}

fn default_radius() -> f64 {
    DEFAULT_DECISION_RADIUS
}

fn default_b0() -> B0Spec {
    B0Spec::Calibrate { samples: 1000 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessingConfig {
    pub k: u64,
    pub trials: u64,
    #[serde(default = "default_b0")]
    pub b0: B0Spec,
    #[serde(default = "default_radius")]
    pub decision_radius: f64,
    pub master_seed: u64,
}

impl GuessingConfig {
    pub fn new(k: u64, trials: u64, master_seed: u64) -> Self {
        GuessingConfig {
            k,
            trials,
            b0: default_b0(),
            decision_radius: default_radius(),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<(), GuessingError> {
        if self.k == 0 {
            return Err(GuessingError::InvalidConfig("block length k must be positive".into()));
        }
        if self.trials == 0 {
            return Err(GuessingError::InvalidConfig("need at least one trial".into()));
        }
        let (lo, hi) = DECISION_RADIUS_RANGE;
        if !(self.decision_radius > lo && self.decision_radius < hi) {
            return Err(GuessingError::InvalidConfig(format!(
                "decision radius {} outside the open interval ({lo}, {hi})",
                self.decision_radius
            )));
        }
        if let B0Spec::Calibrate { samples: 0 } = self.b0 {
            return Err(GuessingError::InvalidConfig("calibration needs at least one sample".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessingResult {
    pub k: u64,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub wilson_ci: (f64, f64),
    /// `lemma3_bound(gamma, 0)` when the pair's parameters are known.
    pub bound: Option<f64>,
    pub decision_radius: f64,
    pub b0: BitString,
}

/// Success probability guaranteed for a pair whose `y = 0` block equals a
/// fixed `b0` except with probability `gamma`, playing a strategy that loses
/// each shell test with probability at most `beta`:
/// `1/2 + (1/4 - 2 beta - gamma)`.
pub fn lemma3_bound(gamma: f64, beta: f64) -> f64 {
    assert!(gamma >= 0.0 && beta >= 0.0, "rates must be nonnegative");
    0.5 + (0.25 - 2.0 * beta - gamma)
}

fn require_chsh(pair: &DevicePair) -> Result<(), GuessingError> {
    if pair.game_kind() != GameKind::Chsh {
        return Err(GuessingError::InvalidConfig(
            "guessing game drives CHSH-input pairs only".into(),
        ));
    }
    Ok(())
}

/// Estimates the block B is most likely to output on `y = 0`: runs `samples`
/// fresh `k`-round blocks and returns the modal one, breaking ties toward
/// the lexicographically smallest block.
pub fn calibrate_b0(
    pair: &mut DevicePair,
    k: u64,
    samples: u64,
) -> Result<BitString, GuessingError> {
    require_chsh(pair)?;
    if k == 0 || samples == 0 {
        return Err(GuessingError::InvalidConfig("k and samples must be positive".into()));
    }
    let mut counts: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
    for _ in 0..samples {
        let mut block = Vec::with_capacity(k as usize);
        for _ in 0..k {
            block.push(pair.respond(Side::B, InputSymbol::Bit(false))?);
        }
        *counts.entry(block).or_insert(0) += 1;
    }
    let mut best: Option<(&Vec<bool>, u64)> = None;
    for (block, &count) in &counts {
        // Strictly greater keeps the first (lexicographically smallest) of
        // the tied maxima, since BTreeMap iterates in sorted order.
        if best.map_or(true, |(_, c)| count > c) {
            best = Some((block, count));
        }
    }
    Ok(BitString(best.expect("samples >= 1").0.clone()))
}

/// Plays the game for `config.trials` rounds and tallies Alice's successes.
///
/// Per trial, in pinned order: draw `y`, drive B's block, draw `x`, drive
/// A's block, then claim `y = 0` iff `d_H(a, b0) < decision_radius`.
pub fn run_guessing_game(
    pair: &mut DevicePair,
    b0: &BitString,
    config: &GuessingConfig,
    rng: &mut RngStream,
) -> Result<GuessingResult, GuessingError> {
    config.validate()?;
    require_chsh(pair)?;
    if b0.len() as u64 != config.k {
        return Err(GuessingError::InvalidConfig(format!(
            "reference block has {} bits but k = {}",
            b0.len(),
            config.k
        )));
    }
    let mut successes = 0u64;
    for _ in 0..config.trials {
        let y = rng.next_bit();
        for _ in 0..config.k {
            pair.respond(Side::B, InputSymbol::Bit(y))?;
        }
        let x = rng.next_bit();
        let mut a = Vec::with_capacity(config.k as usize);
        for _ in 0..config.k {
            a.push(pair.respond(Side::A, InputSymbol::Bit(x))?);
        }
        let d = relative_distance(&a, b0).expect("lengths were validated");
        let claim = d >= config.decision_radius; // claim y = 0 iff d < radius
        if claim == y {
            successes += 1;
        }
    }
    let estimate = successes as f64 / config.trials as f64;
    Ok(GuessingResult {
        k: config.k,
        trials: config.trials,
        successes,
        estimate,
        wilson_ci: wilson_interval(successes, config.trials),
        bound: None,
        decision_radius: config.decision_radius,
        b0: b0.clone(),
    })
}

/// Full attack against a pair built from its spec: resolves the reference
/// block (fixed, calibrated on a fresh pair, or read from a cheating spec),
/// plays the game, and attaches the lemma bound when the pair's cheating
/// parameters are known. Streams: "guess.calibrate" for the preparatory
/// pair, "guess.game" for the game pair, "guess.rounds" for alice and bob.
pub fn run_attack(spec: &PairSpec, config: &GuessingConfig) -> Result<GuessingResult, GuessingError> {
    config.validate()?;
    if let PairSpec::CheatingLowEntropy { k, .. } = spec {
        if *k != config.k {
            return Err(GuessingError::InvalidConfig(format!(
                "cheating pair plays blocks of {k} rounds but the game uses k = {}",
                config.k
            )));
        }
    }
    let b0 = match &config.b0 {
        B0Spec::Fixed { bits } => {
            if bits.len() as u64 != config.k {
                return Err(GuessingError::InvalidConfig(format!(
                    "fixed b0 has {} bits but k = {}",
                    bits.len(),
                    config.k
                )));
            }
            bits.clone()
        }
        B0Spec::Calibrate { samples } => {
            let mut pair = spec.build(config.master_seed, "guess.calibrate")?;
            calibrate_b0(&mut pair, config.k, *samples)?
        }
        B0Spec::Known => match spec {
            PairSpec::CheatingLowEntropy { k, b0_seed, .. } => {
                BitString(cheating_b0_bits(*b0_seed, *k))
            }
            _ => {
                return Err(GuessingError::InvalidConfig(
                    "b0 mode 'known' needs a cheating pair spec".into(),
                ))
            }
        },
    };
    let mut pair = spec.build(config.master_seed, "guess.game")?;
    let mut rng = RngStream::from_master(config.master_seed, "guess.rounds", 0);
    let mut result = run_guessing_game(&mut pair, &b0, config, &mut rng)?;
    if let PairSpec::CheatingLowEntropy { gamma, .. } = spec {
        result.bound = Some(lemma3_bound(*gamma, 0.0));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::xor;
    use proptest::prelude::*;

    #[test]
    fn lemma_bound_examples() {
        assert!((lemma3_bound(0.0, 0.0) - 0.75).abs() < 1e-15);
        assert!((lemma3_bound(0.02, 0.1) - 0.53).abs() < 1e-12);
        // The bound degenerates to 1/2 exactly on the boundary 2 beta + gamma = 1/4.
        assert!((lemma3_bound(0.05, 0.1) - 0.5).abs() < 1e-15);
        assert!(lemma3_bound(0.3, 0.0) < 0.5);
    }

    #[test]
    #[should_panic(expected = "nonnegative")]
    fn lemma_bound_rejects_negative_rates() {
        lemma3_bound(-0.1, 0.0);
    }

    #[test]
    fn calibration_recovers_deterministic_b0() {
        let spec = PairSpec::CheatingLowEntropy { gamma: 0.0, k: 24, b0_seed: 99 };
        let mut pair = spec.build(5, "test.calibrate").unwrap();
        let b0 = calibrate_b0(&mut pair, 24, 10).unwrap();
        assert_eq!(b0.0, cheating_b0_bits(99, 24));
    }

    #[test]
    fn calibration_finds_modal_block_under_noise() {
        // gamma = 0.1: ~900 of 1000 samples repeat b0 exactly; the rest are
        // uniform 16-bit blocks, so the mode is b0 overwhelmingly.
        let spec = PairSpec::CheatingLowEntropy { gamma: 0.1, k: 16, b0_seed: 123 };
        let mut pair = spec.build(21, "test.calibrate-noise").unwrap();
        let b0 = calibrate_b0(&mut pair, 16, 1000).unwrap();
        assert_eq!(b0.0, cheating_b0_bits(123, 16));
    }

    #[test]
    fn cheating_pair_wins_with_certainty_rate() {
        let spec = PairSpec::CheatingLowEntropy { gamma: 0.0, k: 50, b0_seed: 7 };
        let config = GuessingConfig::new(50, 10_000, 42);
        let result = run_attack(&spec, &config).unwrap();
        assert_eq!(result.bound, Some(0.75));
        assert!(
            result.estimate >= 0.74,
            "estimate {} under the lemma bound",
            result.estimate
        );
        // This strategy actually wins almost every trial: the only losses are
        // uniform blocks that stray inside the radius, which at k = 50 is
        // vanishingly rare.
        assert!(result.estimate > 0.99);
    }

    #[test]
    fn noisy_cheating_pair_tracks_one_minus_half_gamma() {
        let gamma = 0.05;
        let spec = PairSpec::CheatingLowEntropy { gamma, k: 50, b0_seed: 7 };
        let config = GuessingConfig::new(50, 10_000, 43);
        let result = run_attack(&spec, &config).unwrap();
        assert!(result.estimate >= lemma3_bound(gamma, 0.0) - 0.01);
        // The pair loses only when its y = 0 block went uniform (rate gamma)
        // and the secret was 0 (half the time).
        assert!(
            (result.estimate - (1.0 - gamma / 2.0)).abs() < 0.01,
            "estimate {}",
            result.estimate
        );
    }

    #[test]
    fn honest_pair_hovers_at_half() {
        let config = GuessingConfig::new(20, 20_000, 314);
        let result = run_attack(&PairSpec::HonestChsh, &config).unwrap();
        assert_eq!(result.bound, None);
        let four_sigma = 4.0 * (0.25f64 / 20_000.0).sqrt();
        assert!(
            (result.estimate - 0.5).abs() < four_sigma,
            "estimate {} strays from 1/2",
            result.estimate
        );
        assert!(result.wilson_ci.0 < 0.5 && 0.5 < result.wilson_ci.1);
    }

    #[test]
    fn deterministic_pair_success_is_coin_agreement() {
        // A's block ignores y entirely, so success reduces to the event
        // x = y: a fair coin agreement.
        let spec = PairSpec::Deterministic {
            game: GameKind::Chsh,
            fa: vec![false, true],
            fb: vec![false, true],
        };
        let config = GuessingConfig::new(12, 4_000, 8);
        let result = run_attack(&spec, &config).unwrap();
        let four_sigma = 4.0 * (0.25f64 / 4_000.0).sqrt();
        assert!((result.estimate - 0.5).abs() < four_sigma, "estimate {}", result.estimate);
    }

    #[test]
    fn known_b0_matches_calibration_on_noiseless_pair() {
        let spec = PairSpec::CheatingLowEntropy { gamma: 0.0, k: 30, b0_seed: 55 };
        let known = run_attack(
            &spec,
            &GuessingConfig { b0: B0Spec::Known, ..GuessingConfig::new(30, 500, 9) },
        )
        .unwrap();
        let calibrated = run_attack(
            &spec,
            &GuessingConfig {
                b0: B0Spec::Calibrate { samples: 50 },
                ..GuessingConfig::new(30, 500, 9)
            },
        )
        .unwrap();
        assert_eq!(known.b0, calibrated.b0);
        assert_eq!(known.successes, calibrated.successes);
    }

    #[test]
    fn configuration_validation() {
        let mut config = GuessingConfig::new(10, 100, 0);
        config.decision_radius = 0.16; // boundary excluded
        assert!(matches!(run_attack(&PairSpec::HonestChsh, &config), Err(GuessingError::InvalidConfig(_))));
        config.decision_radius = 0.34;
        assert!(run_attack(&PairSpec::HonestChsh, &config).is_err());
        config.decision_radius = 0.2;
        config.b0 = B0Spec::Fixed { bits: BitString(vec![false; 9]) };
        assert!(run_attack(&PairSpec::HonestChsh, &config).is_err());
        config.b0 = B0Spec::Known;
        assert!(run_attack(&PairSpec::HonestChsh, &config).is_err());

        // Cheating pair block length must match the game's k.
        let spec = PairSpec::CheatingLowEntropy { gamma: 0.0, k: 11, b0_seed: 0 };
        assert!(run_attack(&spec, &GuessingConfig::new(10, 100, 0)).is_err());

        // Extended pairs do not speak the game's input alphabet.
        assert!(run_attack(&PairSpec::HonestExtended, &GuessingConfig::new(10, 100, 0)).is_err());
    }

    #[test]
    fn results_serialize_round_trip() {
        let spec = PairSpec::CheatingLowEntropy { gamma: 0.0, k: 8, b0_seed: 1 };
        let config = GuessingConfig {
            b0: B0Spec::Known,
            ..GuessingConfig::new(8, 50, 2)
        };
        let result = run_attack(&spec, &config).unwrap();
        let json = serde_json::to_string(&result).unwrap();
        let back: GuessingResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, result);
    }

    fn flip_at(base: &[bool], positions: &[usize]) -> Vec<bool> {
        let mut out = base.to_vec();
        for &p in positions {
            out[p] ^= true;
        }
        out
    }

    fn shell_premise() -> impl Strategy<Value = (Vec<bool>, Vec<usize>, Vec<usize>)> {
        (10usize..=60).prop_flat_map(|k| {
            let max_flips = (0.16 * k as f64).floor() as usize;
            let indices: Vec<usize> = (0..k).collect();
            (
                proptest::collection::vec(any::<bool>(), k),
                proptest::sample::subsequence(indices.clone(), 0..=max_flips),
                proptest::sample::subsequence(indices, 0..=max_flips),
            )
        })
    }

    proptest! {
        // Core of the lemma's separation argument: a block within 0.16 of b
        // and a block within 0.16 of its complement are at least 0.68 apart,
        // so no single block can defeat both shell tests.
        #[test]
        fn hamming_shells_are_separated((b, near_flips, far_flips) in shell_premise()) {
            let ones = vec![true; b.len()];
            let a0 = flip_at(&b, &near_flips);
            let a1 = flip_at(&xor(&b, &ones).unwrap(), &far_flips);
            prop_assert!(relative_distance(&a0, &b).unwrap() <= 0.16 + 1e-12);
            prop_assert!(relative_distance(&a1, &b).unwrap() >= 0.84 - 1e-12);
            prop_assert!(relative_distance(&a0, &a1).unwrap() >= 0.68 - 1e-12);
        }
    }
}
