//! Seeded randomness extractor built from parities: the t-XOR code, weak
//! designs, extraction, and desk-scale analysis oracles.
//!
//! The code `C_t` lists the parities of all t-element subsets of an m-bit
//! string. A weak design is a family of seed-index sets with pairwise
//! overlaps bounded by `sum_{i<j} 2^{|S_i cap S_j|} <= rho (r - 1)`; reading
//! the seed through set `S_i` yields `t` chunks of `log2 m` bits, each
//! decoded as a bit position, and output bit `i` is the parity of those
//! positions. Chunks may repeat a position; the parity is taken with
//! multiplicity, so repeats cancel.
//!
//! Two exhaustive oracles accompany the construction. One computes the exact
//! statistical distance between `(seed, output)` and `(seed, uniform)` for a
//! given source by enumerating every seed. The other list-decodes a noisy
//! parity table: every string whose encoding matches a `1/2 + eta` fraction
//! of the table appears, and after pruning candidates closer than
//! `delta = (1/t) ln(2/eta)` the list provably has at most `4 / eta^2`
//! entries.

use crate::analysis::Distribution;
use crate::bits::{relative_distance, BitString};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

/// Default overlap parameter for extractor designs.
pub const DEFAULT_RHO: f64 = 1.25;

/// Enumeration guards for the exact-distance oracle.
const MAX_DISTANCE_INPUT_BITS: u64 = 14;
const MAX_DISTANCE_SEED_BITS: u64 = 16;
const MAX_DISTANCE_OUTPUT_BITS: usize = 16;

/// Enumeration guards for list decoding.
const MAX_LIST_DECODE_INPUT_BITS: u64 = 16;
const MAX_PARITY_ENTRIES: u128 = 100_000;

/// Agreement comparisons allow this much slack so exact rational fractions
/// sitting on the threshold are never lost to rounding.
const AGREEMENT_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ExtractorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("design set {j} breaks the overlap bound: sum {sum} > {bound}")]
    DesignInvariant { j: usize, sum: u128, bound: f64 },
    #[error(
        "cannot build set {j} within seed budget {budget}: best overlap sum {achieved} > {bound}"
    )]
    ConstructionFailed { j: usize, budget: u64, achieved: u128, bound: f64 },
    #[error("bit index {index} out of range for {m}-bit input")]
    IndexOutOfRange { index: u64, m: u64 },
    #[error("length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("instance too large to enumerate: {0}")]
    InstanceTooLarge(String),
}

fn saturating_pow2(exp: usize) -> u128 {
    if exp >= 127 {
        u128::MAX
    } else {
        1u128 << exp
    }
}

fn intersection_size(a: &[u64], b: &[u64]) -> usize {
    // Both sorted ascending.
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Family of subsets of `[s]` with bounded pairwise overlap weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeakDesignRepr", into = "WeakDesignRepr")]
pub struct WeakDesign {
    s: u64,
    set_size: u64,
    rho: f64,
    sets: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct WeakDesignRepr {
    s: u64,
    set_size: u64,
    r: usize,
    rho: f64,
    sets: Vec<Vec<u64>>,
}

impl From<WeakDesign> for WeakDesignRepr {
    fn from(d: WeakDesign) -> Self {
        WeakDesignRepr { s: d.s, set_size: d.set_size, r: d.sets.len(), rho: d.rho, sets: d.sets }
    }
}

impl TryFrom<WeakDesignRepr> for WeakDesign {
    type Error = ExtractorError;

    fn try_from(repr: WeakDesignRepr) -> Result<Self, Self::Error> {
        if repr.r != repr.sets.len() {
            return Err(ExtractorError::InvalidParameter(format!(
                "declared r = {} but {} sets present",
                repr.r,
                repr.sets.len()
            )));
        }
        WeakDesign::new(repr.s, repr.set_size, repr.rho, repr.sets)
    }
}

impl WeakDesign {
    /// Wraps explicit sets after shape validation (sorted, in range, sized).
    /// The overlap invariant is checked separately by [`WeakDesign::check`].
    pub fn new(
        s: u64,
        set_size: u64,
        rho: f64,
        sets: Vec<Vec<u64>>,
    ) -> Result<Self, ExtractorError> {
        if !(rho > 1.0) {
            return Err(ExtractorError::InvalidParameter(format!("rho = {rho} must exceed 1")));
        }
        if set_size == 0 || sets.is_empty() {
            return Err(ExtractorError::InvalidParameter(
                "need at least one set of positive size".into(),
            ));
        }
        for (j, set) in sets.iter().enumerate() {
            if set.len() as u64 != set_size {
                return Err(ExtractorError::InvalidParameter(format!(
                    "set {j} has {} elements, expected {set_size}",
                    set.len()
                )));
            }
            if !set.windows(2).all(|w| w[0] < w[1]) {
                return Err(ExtractorError::InvalidParameter(format!(
                    "set {j} is not strictly ascending"
                )));
            }
            if set.last().copied().unwrap_or(0) >= s {
                return Err(ExtractorError::InvalidParameter(format!(
                    "set {j} reaches beyond seed length {s}"
                )));
            }
        }
        Ok(WeakDesign { s, set_size, rho, sets })
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn set_size(&self) -> u64 {
        self.set_size
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn r(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<u64>] {
        &self.sets
    }

    /// Independent verifier for the overlap invariant: for every `j`,
    /// `sum_{i<j} 2^{|S_i cap S_j|} <= rho (r - 1)`.
    pub fn check(&self) -> Result<(), ExtractorError> {
        let r = self.sets.len();
        let bound = self.rho * (r as f64 - 1.0);
        for j in 1..r {
            let mut sum: u128 = 0;
            for i in 0..j {
                sum = sum
                    .saturating_add(saturating_pow2(intersection_size(&self.sets[i], &self.sets[j])));
            }
            if sum as f64 > bound {
                return Err(ExtractorError::DesignInvariant { j, sum, bound });
            }
        }
        Ok(())
    }
}

/// Greedy weak-design builder: sets are chosen one at a time, each element
/// picked to minimize the marginal overlap weight against all previous sets
/// (ties go to the smallest element). While the seed budget allows, this
/// degenerates to consecutive disjoint sets; once elements must be reused,
/// overlaps grow as slowly as possible. Fails on the first set whose best
/// achievable overlap sum exceeds `rho (r - 1)`.
pub fn build_weak_design(
    r: usize,
    set_size: u64,
    rho: f64,
    s_budget: u64,
) -> Result<WeakDesign, ExtractorError> {
    if !(rho > 1.0) {
        return Err(ExtractorError::InvalidParameter(format!("rho = {rho} must exceed 1")));
    }
    if r == 0 || set_size == 0 {
        return Err(ExtractorError::InvalidParameter(
            "need at least one set of positive size".into(),
        ));
    }
    if s_budget < set_size {
        return Err(ExtractorError::InvalidParameter(format!(
            "seed budget {s_budget} below set size {set_size}"
        )));
    }
    let s = s_budget as usize;
    let k = set_size as usize;
    let bound = rho * (r as f64 - 1.0);
    let mut sets: Vec<Vec<u64>> = Vec::with_capacity(r);
    // For each seed element, the indices of previous sets containing it.
    let mut elem_sets: Vec<Vec<usize>> = vec![Vec::new(); s];
    for j in 0..r {
        // weights[i] = 2^{|S_i cap partial|} for the set under construction.
        let mut weights: Vec<u128> = vec![1; j];
        let mut chosen = vec![false; s];
        let mut set: Vec<u64> = Vec::with_capacity(k);
        for _ in 0..k {
            let mut best_e = usize::MAX;
            let mut best_cost = u128::MAX;
            for e in 0..s {
                if chosen[e] {
                    continue;
                }
                let cost = elem_sets[e]
                    .iter()
                    .fold(0u128, |acc, &i| acc.saturating_add(weights[i]));
                if cost < best_cost {
                    best_cost = cost;
                    best_e = e;
                }
            }
            chosen[best_e] = true;
            set.push(best_e as u64);
            for &i in &elem_sets[best_e] {
                weights[i] = weights[i].saturating_mul(2);
            }
        }
        let total = weights.iter().fold(0u128, |acc, &w| acc.saturating_add(w));
        if j > 0 && total as f64 > bound {
            return Err(ExtractorError::ConstructionFailed {
                j,
                budget: s_budget,
                achieved: total,
                bound,
            });
        }
        set.sort_unstable();
        for &e in &set {
            elem_sets[e as usize].push(j);
        }
        sets.push(set);
    }
    let design = WeakDesign { s: s_budget, set_size, rho, sets };
    design.check()?;
    Ok(design)
}

/// Parameters of the t-XOR extractor: input length `m` (a power of two so
/// seed chunks decode bijectively to positions), arity `t`, and a weak
/// design with `set_size = t log2 m` whose set count is the output length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractorParams {
    pub m: u64,
    pub t: u64,
    pub design: WeakDesign,
}

impl ExtractorParams {
    pub fn new(m: u64, t: u64, design: WeakDesign) -> Result<Self, ExtractorError> {
        let params = ExtractorParams { m, t, design };
        params.validate()?;
        Ok(params)
    }

    /// Builds the design greedily with the default `rho = 5/4`.
    pub fn standard(m: u64, t: u64, r: usize, s_budget: u64) -> Result<Self, ExtractorError> {
        let lg = log2_exact(m)?;
        let design = build_weak_design(r, t * lg as u64, DEFAULT_RHO, s_budget)?;
        ExtractorParams::new(m, t, design)
    }

    pub fn r(&self) -> usize {
        self.design.r()
    }

    pub fn seed_len(&self) -> u64 {
        self.design.s()
    }

    pub fn validate(&self) -> Result<(), ExtractorError> {
        let lg = log2_exact(self.m)?;
        if self.t == 0 {
            return Err(ExtractorError::InvalidParameter("t must be positive".into()));
        }
        let expected = self.t * lg as u64;
        if self.design.set_size() != expected {
            return Err(ExtractorError::InvalidParameter(format!(
                "design set size {} differs from t log2 m = {expected}",
                self.design.set_size()
            )));
        }
        self.design.check()
    }
}

fn log2_exact(m: u64) -> Result<u32, ExtractorError> {
    if m < 2 || !m.is_power_of_two() {
        return Err(ExtractorError::InvalidParameter(format!(
            "input length {m} is not a power of two >= 2"
        )));
    }
    Ok(m.trailing_zeros())
}

/// Parity of the selected bits, with multiplicity: repeated indices cancel.
pub fn txor_bit(x: &[bool], indices: &[u64]) -> Result<bool, ExtractorError> {
    let mut acc = false;
    for &i in indices {
        if i as usize >= x.len() {
            return Err(ExtractorError::IndexOutOfRange { index: i, m: x.len() as u64 });
        }
        acc ^= x[i as usize];
    }
    Ok(acc)
}

/// Decodes the seed through each design set: restrict the seed to the set's
/// positions in ascending order, split into `t` chunks of `log2 m` bits
/// (first bit of each chunk most significant), and read each chunk as a bit
/// position in `[m]`.
pub fn seed_to_subsets(
    seed: &[bool],
    params: &ExtractorParams,
) -> Result<Vec<Vec<u64>>, ExtractorError> {
    if seed.len() as u64 != params.seed_len() {
        return Err(ExtractorError::LengthMismatch {
            expected: params.seed_len() as usize,
            got: seed.len(),
        });
    }
    let lg = log2_exact(params.m)? as usize;
    let mut subsets = Vec::with_capacity(params.r());
    for set in params.design.sets() {
        let bits: Vec<bool> = set.iter().map(|&p| seed[p as usize]).collect();
        let mut indices = Vec::with_capacity(params.t as usize);
        for chunk in bits.chunks(lg) {
            let mut v = 0u64;
            for &bit in chunk {
                v = (v << 1) | bit as u64;
            }
            indices.push(v);
        }
        subsets.push(indices);
    }
    Ok(subsets)
}

/// Extracts `r` bits from `x` under `seed`: output bit `i` is the t-XOR of
/// the positions decoded from design set `i`.
pub fn extract(
    x: &[bool],
    seed: &[bool],
    params: &ExtractorParams,
) -> Result<Vec<bool>, ExtractorError> {
    params.validate()?;
    if x.len() as u64 != params.m {
        return Err(ExtractorError::LengthMismatch { expected: params.m as usize, got: x.len() });
    }
    let subsets = seed_to_subsets(seed, params)?;
    subsets.iter().map(|indices| txor_bit(x, indices)).collect()
}

/// Exact statistical distance between `(seed, extract(X, seed))` and
/// `(seed, uniform)` for `X ~ source` and a uniform seed, by enumerating
/// every seed. Desk-scale only: the guards cap input, seed, and output
/// lengths.
pub fn strong_extractor_distance(
    source: &Distribution,
    params: &ExtractorParams,
) -> Result<f64, ExtractorError> {
    params.validate()?;
    if params.m > MAX_DISTANCE_INPUT_BITS {
        return Err(ExtractorError::InstanceTooLarge(format!(
            "input length {} exceeds {MAX_DISTANCE_INPUT_BITS}",
            params.m
        )));
    }
    if params.seed_len() > MAX_DISTANCE_SEED_BITS {
        return Err(ExtractorError::InstanceTooLarge(format!(
            "seed length {} exceeds {MAX_DISTANCE_SEED_BITS}",
            params.seed_len()
        )));
    }
    if params.r() > MAX_DISTANCE_OUTPUT_BITS {
        return Err(ExtractorError::InstanceTooLarge(format!(
            "output length {} exceeds {MAX_DISTANCE_OUTPUT_BITS}",
            params.r()
        )));
    }
    for outcome in source.outcomes() {
        if outcome.len() as u64 != params.m {
            return Err(ExtractorError::LengthMismatch {
                expected: params.m as usize,
                got: outcome.len(),
            });
        }
    }
    let s = params.seed_len();
    let r = params.r();
    let uniform = 0.5f64.powi(r as i32);
    let z_count = 1u64 << r;
    let mut total = 0.0;
    let mut seed_bits = vec![false; s as usize];
    for seed_val in 0..(1u64 << s) {
        for (b, bit) in seed_bits.iter_mut().enumerate() {
            *bit = (seed_val >> b) & 1 == 1;
        }
        let subsets = seed_to_subsets(&seed_bits, params)?;
        let mut mass: HashMap<u64, f64> = HashMap::new();
        for (outcome, &p) in source.outcomes().iter().zip(source.probs()) {
            let mut z = 0u64;
            for (i, indices) in subsets.iter().enumerate() {
                if txor_bit(outcome, indices)? {
                    z |= 1 << i;
                }
            }
            *mass.entry(z).or_insert(0.0) += p;
        }
        let mut l1 = (z_count - mass.len() as u64) as f64 * uniform;
        for &p in mass.values() {
            l1 += (p - uniform).abs();
        }
        total += l1 / 2.0;
    }
    Ok(total / (1u64 << s) as f64)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// All t-element subsets of `[m]` in lexicographic order, each ascending.
pub fn all_t_subsets(m: u64, t: u64) -> Result<Vec<Vec<u64>>, ExtractorError> {
    if t == 0 || t > m {
        return Err(ExtractorError::InvalidParameter(format!(
            "need 1 <= t <= m, got t = {t}, m = {m}"
        )));
    }
    let count = binomial(m, t);
    if count > MAX_PARITY_ENTRIES {
        return Err(ExtractorError::InstanceTooLarge(format!(
            "C({m}, {t}) = {count} parity entries exceed {MAX_PARITY_ENTRIES}"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current: Vec<u64> = (0..t).collect();
    loop {
        out.push(current.clone());
        // Advance to the next combination in lexicographic order.
        let t = t as usize;
        let mut i = t;
        while i > 0 {
            i -= 1;
            if current[i] != m - (t - i) as u64 {
                current[i] += 1;
                for j in i + 1..t {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return Ok(out);
            }
        }
    }
}

/// A total table of predicted parities, one bit per t-subset of `[m]`,
/// aligned with [`all_t_subsets`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TxorPredictions {
    m: u64,
    t: u64,
    bits: Vec<bool>,
}

impl TxorPredictions {
    /// Exact encoding of `x`: the true parity of every t-subset.
    pub fn encode(x: &[bool], t: u64) -> Result<Self, ExtractorError> {
        let m = x.len() as u64;
        let subsets = all_t_subsets(m, t)?;
        let bits = subsets
            .iter()
            .map(|indices| txor_bit(x, indices))
            .collect::<Result<Vec<bool>, _>>()?;
        Ok(TxorPredictions { m, t, bits })
    }

    /// Builds a table from explicit `(subset, bit)` entries. The entries
    /// must cover every t-subset exactly once; subsets are given as strictly
    /// ascending index lists.
    pub fn from_entries(
        m: u64,
        t: u64,
        entries: &[(Vec<u64>, bool)],
    ) -> Result<Self, ExtractorError> {
        let subsets = all_t_subsets(m, t)?;
        let index_of: HashMap<&[u64], usize> =
            subsets.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        if entries.len() != subsets.len() {
            return Err(ExtractorError::InvalidParameter(format!(
                "{} entries do not cover the {} t-subsets",
                entries.len(),
                subsets.len()
            )));
        }
        let mut bits = vec![None; subsets.len()];
        for (subset, bit) in entries {
            let slot = index_of.get(subset.as_slice()).ok_or_else(|| {
                ExtractorError::InvalidParameter(format!(
                    "{subset:?} is not an ascending t-subset of [{m}]"
                ))
            })?;
            if bits[*slot].replace(*bit).is_some() {
                return Err(ExtractorError::InvalidParameter(format!(
                    "duplicate entry for subset {subset:?}"
                )));
            }
        }
        Ok(TxorPredictions { m, t, bits: bits.into_iter().map(|b| b.unwrap()).collect() })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Flips one table entry (by [`all_t_subsets`] position).
    pub fn toggle(&mut self, entry: usize) {
        self.bits[entry] ^= true;
    }

    /// Fraction of table entries matching the true encoding of `x`.
    pub fn agreement(&self, x: &[bool]) -> Result<f64, ExtractorError> {
        if x.len() as u64 != self.m {
            return Err(ExtractorError::LengthMismatch {
                expected: self.m as usize,
                got: x.len(),
            });
        }
        let subsets = all_t_subsets(self.m, self.t)?;
        let mut matches = 0u64;
        for (indices, &predicted) in subsets.iter().zip(&self.bits) {
            if txor_bit(x, indices)? == predicted {
                matches += 1;
            }
        }
        Ok(matches as f64 / self.bits.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualifyingCandidate {
    pub bits: BitString,
    pub agreement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ListDecodeOutcome {
    pub m: u64,
    pub t: u64,
    pub eta: f64,
    /// Pruning radius `(1/t) ln(2/eta)`, clamped to 1.
    pub delta: f64,
    /// Candidates after radius pruning; provably at most `4 / eta^2` long.
    pub list: Vec<BitString>,
    /// Every string agreeing with the table on at least `1/2 + eta` of
    /// entries, sorted by agreement (descending) then lexicographically.
    pub qualifying: Vec<QualifyingCandidate>,
}

/// Brute-force list decoding of a noisy parity table. Enumerates all
/// `2^m` strings, keeps those with agreement at least `1/2 + eta`, and prunes
/// the sorted list so surviving candidates are pairwise farther than `delta`
/// apart. Every qualifying string is then within `delta` of some survivor.
pub fn list_decode_txor(
    predictions: &TxorPredictions,
    eta: f64,
) -> Result<ListDecodeOutcome, ExtractorError> {
    let (m, t) = (predictions.m, predictions.t);
    if m > MAX_LIST_DECODE_INPUT_BITS {
        return Err(ExtractorError::InstanceTooLarge(format!(
            "input length {m} exceeds {MAX_LIST_DECODE_INPUT_BITS}"
        )));
    }
    let eta_floor = 2.0 * (t * t) as f64 / (1u64 << m) as f64;
    if !(eta > eta_floor) {
        return Err(ExtractorError::InvalidParameter(format!(
            "eta = {eta} must exceed 2 t^2 / 2^m = {eta_floor}"
        )));
    }
    if eta > 0.5 {
        return Err(ExtractorError::InvalidParameter(format!(
            "eta = {eta} exceeds 1/2, leaving no room above chance agreement"
        )));
    }
    let delta = ((2.0 / eta).ln() / t as f64).min(1.0);
    let threshold = 0.5 + eta - AGREEMENT_SLACK;
    let subsets = all_t_subsets(m, t)?;
    let mut qualifying: Vec<(Vec<bool>, f64)> = Vec::new();
    let mut x = vec![false; m as usize];
    for value in 0..(1u64 << m) {
        for (j, bit) in x.iter_mut().enumerate() {
            *bit = (value >> j) & 1 == 1;
        }
        let mut matches = 0u64;
        for (indices, &predicted) in subsets.iter().zip(&predictions.bits) {
            if txor_bit(&x, indices)? == predicted {
                matches += 1;
            }
        }
        let agreement = matches as f64 / subsets.len() as f64;
        if agreement >= threshold {
            qualifying.push((x.clone(), agreement));
        }
    }
    qualifying.sort_by(|a, b| {
        b.1.partial_cmp(&a.1).expect("agreements are finite").then_with(|| a.0.cmp(&b.0))
    });
    let mut list: Vec<Vec<bool>> = Vec::new();
    for (bits, _) in &qualifying {
        if list
            .iter()
            .all(|kept| relative_distance(kept, bits).expect("equal lengths") > delta)
        {
            list.push(bits.clone());
        }
    }
    Ok(ListDecodeOutcome {
        m,
        t,
        eta,
        delta,
        list: list.into_iter().map(BitString).collect(),
        qualifying: qualifying
            .into_iter()
            .map(|(bits, agreement)| QualifyingCandidate { bits: BitString(bits), agreement })
            .collect(),
    })
}
