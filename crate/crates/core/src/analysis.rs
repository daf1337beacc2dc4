//! Entropy toolkit and statistics over explicit finite distributions.
//!
//! Distributions here are literal probability vectors over bit-strings
//! (classical side information only). Smooth min-entropy follows the capping
//! characterization: the optimal epsilon-smoothing of a distribution caps its
//! largest probabilities at a level `lambda*` and moves the excess onto fresh
//! symbols, so `H_inf^eps = -log2(lambda*)` where `lambda*` is the smallest
//! cap whose excess mass `sum_x max(p(x) - lambda, 0)` is at most `eps`.

use crate::bits::bits_to_hex;
use crate::referee::Transcript;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// Two-sided z for 95% Wilson intervals.
pub const WILSON_Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("distribution support is empty")]
    EmptySupport,
    #[error("outcomes and probabilities have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("probability {0} is negative")]
    NegativeProbability(f64),
    #[error("probabilities sum to {0}, not 1 (tolerance {PROBABILITY_SUM_TOLERANCE})")]
    BadProbabilitySum(f64),
    #[error("duplicate outcome {0:?} in support")]
    DuplicateOutcome(String),
    #[error("outcomes must all have the same bit length")]
    MixedOutcomeLengths,
    #[error("epsilon {0} outside [0, 1)")]
    InvalidEpsilon(f64),
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterRange { name: &'static str, value: f64 },
}

/// Explicit probability vector over same-length bit-strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct Distribution {
    outcomes: Vec<Vec<bool>>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize, Clone)]
struct DistributionRepr {
    /// Outcomes as 0/1 strings, e.g. "0110".
    outcomes: Vec<String>,
    probs: Vec<f64>,
}

impl From<Distribution> for DistributionRepr {
    fn from(d: Distribution) -> Self {
        let outcomes = d
            .outcomes
            .iter()
            .map(|bits| bits.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect();
        DistributionRepr { outcomes, probs: d.probs }
    }
}

impl TryFrom<DistributionRepr> for Distribution {
    type Error = AnalysisError;

    fn try_from(repr: DistributionRepr) -> Result<Self, Self::Error> {
        let outcomes: Vec<Vec<bool>> = repr
            .outcomes
            .iter()
            .map(|s| s.chars().map(|c| c == '1').collect())
            .collect();
        Distribution::new(outcomes, repr.probs)
    }
}

impl Distribution {
    /// Validates support and probability vector (sum within 1e-12 of 1,
    /// non-negative entries, distinct same-length outcomes).
    pub fn new(outcomes: Vec<Vec<bool>>, probs: Vec<f64>) -> Result<Self, AnalysisError> {
        if outcomes.is_empty() {
            return Err(AnalysisError::EmptySupport);
        }
        if outcomes.len() != probs.len() {
            return Err(AnalysisError::LengthMismatch(outcomes.len(), probs.len()));
        }
        let len = outcomes[0].len();
        if outcomes.iter().any(|o| o.len() != len) {
            return Err(AnalysisError::MixedOutcomeLengths);
        }
        let mut seen = BTreeSet::new();
        for o in &outcomes {
            if !seen.insert(o.clone()) {
                return Err(AnalysisError::DuplicateOutcome(bits_to_hex(o)));
            }
        }
        if let Some(&p) = probs.iter().find(|&&p| p < 0.0) {
            return Err(AnalysisError::NegativeProbability(p));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(AnalysisError::BadProbabilitySum(sum));
        }
        Ok(Distribution { outcomes, probs })
    }

    /// Point mass on one outcome.
    pub fn point_mass(outcome: Vec<bool>) -> Result<Self, AnalysisError> {
        Distribution::new(vec![outcome], vec![1.0])
    }

    /// Uniform distribution over all `2^len` bit-strings (guarded to len <= 20).
    pub fn uniform_bits(len: usize) -> Result<Self, AnalysisError> {
        assert!(len <= 20, "uniform_bits is an enumeration helper; len must stay desk-scale");
        let n = 1usize << len;
        let outcomes = (0..n)
            .map(|v| (0..len).map(|i| v >> (len - 1 - i) & 1 == 1).collect())
            .collect();
        Distribution::new(outcomes, vec![1.0 / n as f64; n])
    }

    /// Empirical distribution by counting occurrences.
    pub fn from_counts<I: IntoIterator<Item = Vec<bool>>>(items: I) -> Result<Self, AnalysisError> {
        let mut counts: BTreeMap<Vec<bool>, u64> = BTreeMap::new();
        let mut total = 0u64;
        for item in items {
            *counts.entry(item).or_insert(0) += 1;
            total += 1;
        }
        if total == 0 {
            return Err(AnalysisError::EmptySupport);
        }
        let (outcomes, probs) = counts
            .into_iter()
            .map(|(o, c)| (o, c as f64 / total as f64))
            .unzip();
        Distribution::new(outcomes, probs)
    }

    pub fn outcomes(&self) -> &[Vec<bool>] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn support_size(&self) -> usize {
        self.outcomes.len()
    }

    fn as_map(&self) -> BTreeMap<&[bool], f64> {
        self.outcomes.iter().map(|o| o.as_slice()).zip(self.probs.iter().copied()).collect()
    }
}

/// `-log2(max_x p(x))`.
pub fn min_entropy(d: &Distribution) -> f64 {
    let max = d.probs.iter().copied().fold(0.0, f64::max);
    -max.log2()
}

/// Half L1 distance over the union of supports.
pub fn statistical_distance(p: &Distribution, q: &Distribution) -> f64 {
    let pm = p.as_map();
    let qm = q.as_map();
    let keys: BTreeSet<&[bool]> = pm.keys().chain(qm.keys()).copied().collect();
    0.5 * keys
        .into_iter()
        .map(|k| (pm.get(k).unwrap_or(&0.0) - qm.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Smallest cap `lambda*` with excess mass at most `eps`, computed exactly.
///
/// With probabilities sorted in decreasing order and `P_j` the j-th prefix
/// sum, the excess at cap `lambda` equals `max_j (P_j - j * lambda)`, so the
/// smallest admissible cap is `max_j (P_j - eps) / j`.
fn smoothing_cap(d: &Distribution, eps: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&eps) {
        return Err(AnalysisError::InvalidEpsilon(eps));
    }
    let mut sorted = d.probs.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("probabilities are finite"));
    let mut prefix = 0.0;
    let mut cap: f64 = 0.0;
    for (j, p) in sorted.iter().enumerate() {
        prefix += p;
        cap = cap.max((prefix - eps) / (j + 1) as f64);
    }
    Ok(cap)
}

/// Smooth min-entropy `-log2(lambda*)` under the capping construction.
pub fn smooth_min_entropy(d: &Distribution, eps: f64) -> Result<f64, AnalysisError> {
    Ok(-smoothing_cap(d, eps)?.log2())
}

/// High-probability set certifying that the smooth min-entropy is low.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothCapWitness {
    /// Outcomes with `p(x) >= 2^-alpha`, sorted lexicographically.
    pub outcomes: Vec<Vec<bool>>,
    /// Total probability of the set; at least `eps` whenever returned.
    pub mass: f64,
}

/// If `smooth_min_entropy(d, eps) <= alpha`, returns the witness set
/// `B = {x : p(x) >= 2^-alpha}`; its mass is then guaranteed to be >= eps.
/// Returns `None` when the smooth min-entropy exceeds `alpha`.
pub fn smoothcap_witness(
    d: &Distribution,
    eps: f64,
    alpha: f64,
) -> Result<Option<SmoothCapWitness>, AnalysisError> {
    if smooth_min_entropy(d, eps)? > alpha {
        return Ok(None);
    }
    let level = 2f64.powf(-alpha);
    let mut outcomes: Vec<Vec<bool>> = d
        .outcomes
        .iter()
        .zip(&d.probs)
        .filter(|(_, &p)| p >= level)
        .map(|(o, _)| o.clone())
        .collect();
    outcomes.sort();
    let mass = d
        .probs
        .iter()
        .filter(|&&p| p >= level)
        .sum();
    Ok(Some(SmoothCapWitness { outcomes, mass }))
}

/// Binary entropy `h(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = WILSON_Z_95;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One deterministic classical strategy: output tables indexed by input bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicChshStrategy {
    pub fa: [bool; 2],
    pub fb: [bool; 2],
}

impl DeterministicChshStrategy {
    /// Winning probability over uniform inputs: win iff `a xor b = x and y`.
    pub fn success(&self) -> f64 {
        let mut wins = 0u32;
        for x in [false, true] {
            for y in [false, true] {
                if self.fa[usize::from(x)] ^ self.fb[usize::from(y)] == (x && y) {
                    wins += 1;
                }
            }
        }
        f64::from(wins) / 4.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshOptimum {
    pub value: f64,
    /// All deterministic strategies attaining the optimum.
    pub argmax: Vec<DeterministicChshStrategy>,
}

/// Exhaustive maximum of CHSH success over all 16 deterministic strategy
/// pairs. Convexity makes this the optimum over all classical (shared
/// randomness) strategies; the value is exactly 3/4.
pub fn classical_chsh_optimum() -> ChshOptimum {
    let table = |bits: u8| [bits & 1 != 0, bits & 2 != 0];
    let mut value = 0.0;
    let mut argmax = Vec::new();
    for fa in 0..4u8 {
        for fb in 0..4u8 {
            let strategy = DeterministicChshStrategy { fa: table(fa), fb: table(fb) };
            let s = strategy.success();
            if s > value {
                value = s;
                argmax.clear();
            }
            if s == value {
                argmax.push(strategy);
            }
        }
    }
    ChshOptimum { value, argmax }
}

/// Per-input-pair aggregate over a transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputPairStats {
    pub is_bell: bool,
    pub input_a: String,
    pub input_b: String,
    pub blocks: u64,
    pub blocks_passed: u64,
    pub rounds: u64,
    pub mismatch_rounds: u64,
    pub mismatch_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptStats {
    pub accepted: bool,
    pub total_blocks: u64,
    pub rounds_per_block: u64,
    pub bell_blocks: u64,
    pub bell_blocks_passed: u64,
    pub non_bell_blocks: u64,
    pub non_bell_blocks_passed: u64,
    pub per_pair: Vec<InputPairStats>,
}

/// Summarizes a transcript: pass rates plus per-input-pair mismatch rates
/// with 95% Wilson intervals. Rows appear only for observed input pairs, so
/// aborted or empty transcripts are handled without special cases.
pub fn transcript_stats(t: &Transcript) -> TranscriptStats {
    let mut per_pair: BTreeMap<(bool, String, String), (u64, u64, u64, u64)> = BTreeMap::new();
    let mut bell = (0u64, 0u64);
    let mut non_bell = (0u64, 0u64);
    let k = t.k;
    for block in &t.blocks {
        let bucket = if block.is_bell { &mut bell } else { &mut non_bell };
        bucket.0 += 1;
        bucket.1 += u64::from(block.passed);
        let key = (block.is_bell, block.input_a.to_string(), block.input_b.to_string());
        let entry = per_pair.entry(key).or_insert((0, 0, 0, 0));
        entry.0 += 1;
        entry.1 += u64::from(block.passed);
        entry.2 += k;
        entry.3 += block.mismatch_count;
    }
    let per_pair = per_pair
        .into_iter()
        .map(|((is_bell, input_a, input_b), (blocks, passed, rounds, mismatches))| {
            let (ci_low, ci_high) = wilson_interval(mismatches, rounds);
            InputPairStats {
                is_bell,
                input_a,
                input_b,
                blocks,
                blocks_passed: passed,
                rounds,
                mismatch_rounds: mismatches,
                mismatch_rate: mismatches as f64 / rounds as f64,
                ci_low,
                ci_high,
            }
        })
        .collect();
    TranscriptStats {
        accepted: t.accepted,
        total_blocks: t.blocks.len() as u64,
        rounds_per_block: k,
        bell_blocks: bell.0,
        bell_blocks_passed: bell.1,
        non_bell_blocks: non_bell.0,
        non_bell_blocks_passed: non_bell.1,
        per_pair,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn dist(probs: &[f64]) -> Distribution {
        let len = probs.len().next_power_of_two().trailing_zeros().max(1) as usize;
        let outcomes = (0..probs.len())
            .map(|v| (0..len).map(|i| v >> (len - 1 - i) & 1 == 1).collect())
            .collect();
        Distribution::new(outcomes, probs.to_vec()).unwrap()
    }

    #[test]
    fn construction_validation() {
        assert_eq!(
            Distribution::new(vec![], vec![]).unwrap_err(),
            AnalysisError::EmptySupport
        );
        assert!(matches!(
            Distribution::new(vec![vec![true], vec![true]], vec![0.5, 0.5]).unwrap_err(),
            AnalysisError::DuplicateOutcome(_)
        ));
        assert!(matches!(
            Distribution::new(vec![vec![true], vec![false]], vec![0.6, 0.5]).unwrap_err(),
            AnalysisError::BadProbabilitySum(_)
        ));
        assert!(matches!(
            Distribution::new(vec![vec![true], vec![false, true]], vec![0.5, 0.5]).unwrap_err(),
            AnalysisError::MixedOutcomeLengths
        ));
        assert!(matches!(
            Distribution::new(vec![vec![true], vec![false]], vec![1.5, -0.5]).unwrap_err(),
            AnalysisError::NegativeProbability(_)
        ));
    }

    #[test]
    fn min_entropy_examples() {
        assert!((min_entropy(&Distribution::uniform_bits(2).unwrap()) - 2.0).abs() < 1e-12);
        assert_eq!(min_entropy(&Distribution::point_mass(vec![true, false]).unwrap()), 0.0);
        assert!((min_entropy(&dist(&[0.5, 0.25, 0.25])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn statistical_distance_examples() {
        let p = dist(&[0.75, 0.25]);
        let q = dist(&[0.5, 0.5]);
        assert!((statistical_distance(&p, &q) - 0.25).abs() < 1e-12);
        assert_eq!(statistical_distance(&p, &p), 0.0);
        let a = Distribution::point_mass(vec![false]).unwrap();
        let b = Distribution::point_mass(vec![true]).unwrap();
        assert_eq!(statistical_distance(&a, &b), 1.0);
        // Symmetry.
        assert_eq!(statistical_distance(&p, &q), statistical_distance(&q, &p));
    }

    #[test]
    fn statistical_distance_triangle_fuzz() {
        let mut rng = RngStream::from_master(21, "analysis.triangle", 0);
        for _ in 0..500 {
            let raw: Vec<f64> = (0..4).map(|_| rng.next_u64() as f64 + 1.0).collect();
            let mk = |raw: &[f64]| {
                let sum: f64 = raw.iter().sum();
                dist(&raw.iter().map(|v| v / sum).collect::<Vec<_>>())
            };
            let p = mk(&raw);
            let raw2: Vec<f64> = (0..4).map(|_| rng.next_u64() as f64 + 1.0).collect();
            let q = mk(&raw2);
            let raw3: Vec<f64> = (0..4).map(|_| rng.next_u64() as f64 + 1.0).collect();
            let r = mk(&raw3);
            let pq = statistical_distance(&p, &q);
            let qr = statistical_distance(&q, &r);
            let pr = statistical_distance(&p, &r);
            assert!(pr <= pq + qr + 1e-12);
            assert!((0.0..=1.0).contains(&pq));
        }
    }

    #[test]
    fn smooth_min_entropy_examples() {
        let d = dist(&[0.5, 0.25, 0.25]);
        assert!((smooth_min_entropy(&d, 0.25).unwrap() - 2.0).abs() < 1e-12);
        // eps = 0 reduces to plain min-entropy.
        assert!((smooth_min_entropy(&d, 0.0).unwrap() - min_entropy(&d)).abs() < 1e-12);
        // Smoothing the uniform distribution can exceed log2(n): capping
        // below 1/n spreads mass onto fresh symbols.
        let u = Distribution::uniform_bits(2).unwrap();
        let smoothed = smooth_min_entropy(&u, 0.5).unwrap();
        assert!((smoothed - (2.0 - 0.5f64.log2())).abs() < 1e-12);
        assert!(smoothed > 2.0);
        assert!(matches!(
            smooth_min_entropy(&d, 1.0),
            Err(AnalysisError::InvalidEpsilon(_))
        ));
    }

    #[test]
    fn smooth_min_entropy_matches_grid_oracle() {
        // Independent oracle: scan caps on a 1e-4 grid for the smallest one
        // whose excess mass is within eps.
        fn grid_oracle(d: &Distribution, eps: f64) -> f64 {
            let step = 1e-4;
            let mut lambda = step;
            loop {
                let excess: f64 =
                    d.probs().iter().map(|&p| (p - lambda).max(0.0)).sum();
                if excess <= eps || lambda >= 1.0 {
                    return -lambda.log2();
                }
                lambda += step;
            }
        }
        let mut rng = RngStream::from_master(77, "analysis.grid", 0);
        let mut cases = 0;
        while cases < 300 {
            let size = 2 + (rng.next_u64() % 5) as usize;
            let raw: Vec<f64> = (0..size).map(|_| rng.next_u64() as f64 + 1.0).collect();
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.iter().map(|v| v / sum).collect();
            let d = dist(&probs);
            let eps = (rng.next_u64() % 1000) as f64 / 1000.0 * 0.12;
            let fast = smooth_min_entropy(&d, eps).unwrap();
            let oracle = grid_oracle(&d, eps);
            assert!(
                (fast - oracle).abs() <= 1e-3,
                "support {size}, eps {eps}: {fast} vs {oracle}"
            );
            cases += 1;
        }
    }

    #[test]
    fn smooth_min_entropy_monotone_in_eps() {
        let mut rng = RngStream::from_master(78, "analysis.monotone", 0);
        for _ in 0..200 {
            let size = 2 + (rng.next_u64() % 5) as usize;
            let raw: Vec<f64> = (0..size).map(|_| rng.next_u64() as f64 + 1.0).collect();
            let sum: f64 = raw.iter().sum();
            let d = dist(&raw.iter().map(|v| v / sum).collect::<Vec<_>>());
            let e1 = (rng.next_u64() % 1000) as f64 / 2000.0;
            let e2 = e1 + (rng.next_u64() % 1000) as f64 / 2500.0;
            let h1 = smooth_min_entropy(&d, e1).unwrap();
            let h2 = smooth_min_entropy(&d, e2.min(0.999)).unwrap();
            assert!(h2 >= h1 - 1e-12, "eps {e1} -> {h1}, eps {e2} -> {h2}");
        }
    }

    #[test]
    fn smoothcap_witness_examples() {
        let d = dist(&[0.5, 0.3, 0.2]);
        // Smoothed entropy at eps = 0.1 is -log2(0.4) ~ 1.32, so alpha = 1.4
        // admits the witness {00}: the set of outcomes at probability >= 2^-1.4.
        let w = smoothcap_witness(&d, 0.1, 1.4).unwrap().unwrap();
        assert_eq!(w.outcomes, vec![vec![false, false]]);
        assert!((w.mass - 0.5).abs() < 1e-12);
        // Unsmoothed boundary case: H_inf = 1 <= alpha = 1.
        let w0 = smoothcap_witness(&d, 0.0, 1.0).unwrap().unwrap();
        assert!((w0.mass - 0.5).abs() < 1e-12);
        // Far below the actual entropy: no witness.
        assert!(smoothcap_witness(&d, 0.1, 0.2).unwrap().is_none());
    }

    #[test]
    fn smoothcap_witness_fuzz() {
        let mut rng = RngStream::from_master(79, "analysis.witness", 0);
        let mut returned = 0;
        for _ in 0..2000 {
            let size = 2 + (rng.next_u64() % 6) as usize;
            let raw: Vec<f64> = (0..size).map(|_| rng.next_u64() as f64 + 1.0).collect();
            let sum: f64 = raw.iter().sum();
            let d = dist(&raw.iter().map(|v| v / sum).collect::<Vec<_>>());
            let eps = (rng.next_u64() % 1000) as f64 / 1250.0;
            let alpha = (rng.next_u64() % 4000) as f64 / 1000.0;
            let h = smooth_min_entropy(&d, eps).unwrap();
            match smoothcap_witness(&d, eps, alpha).unwrap() {
                Some(w) => {
                    returned += 1;
                    assert!(h <= alpha);
                    assert!(w.mass >= eps - 1e-9, "mass {} < eps {}", w.mass, eps);
                    let level = 2f64.powf(-alpha);
                    for o in &w.outcomes {
                        let idx = d.outcomes().iter().position(|x| x == o).unwrap();
                        assert!(d.probs()[idx] >= level - 1e-15);
                    }
                }
                None => assert!(h > alpha),
            }
        }
        assert!(returned > 100, "fuzz should exercise the Some branch");
    }

    #[test]
    fn classical_optimum_is_three_quarters() {
        let opt = classical_chsh_optimum();
        assert_eq!(opt.value, 0.75);
        assert!(opt
            .argmax
            .contains(&DeterministicChshStrategy { fa: [false, false], fb: [false, false] }));
        // Convex mixtures of deterministic strategies cannot beat 3/4.
        let mut rng = RngStream::from_master(80, "analysis.mixtures", 0);
        let table = |bits: u8| [bits & 1 != 0, bits & 2 != 0];
        for _ in 0..10_000 {
            let raw: Vec<f64> = (0..16).map(|_| rng.next_u64() as f64).collect();
            let sum: f64 = raw.iter().sum();
            let mixed: f64 = (0..16)
                .map(|i| {
                    let s = DeterministicChshStrategy {
                        fa: table(i as u8 / 4),
                        fb: table(i as u8 % 4),
                    };
                    raw[i] / sum * s.success()
                })
                .sum();
            assert!(mixed <= 0.75 + 1e-12);
        }
    }

    #[test]
    fn wilson_interval_behaviour() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!(hi - lo < 0.25);
        let (lo0, hi0) = wilson_interval(0, 100);
        assert!(lo0.abs() < 1e-12);
        assert!(hi0 > 0.0 && hi0 < 0.06);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }
}
