//! Deterministic randomness for every sampler in the crate.
//!
//! All randomness flows through [`RngStream`], a ChaCha8 generator seeded by
//! hashing `(master seed, stream label, stream index)` with SHA-256. Distinct
//! labels give independent substreams of one master seed, so a whole
//! experiment is reproducible bit-for-bit from a single `u64` while its parts
//! (referee, device pair, per-trial draws) stay decoupled from each other.
//!
//! The stream also counts the raw bits handed to callers, which is what the
//! protocol randomness accounting reports as actual consumption:
//! single-bit draws cost 1 bit, everything built on a full `u64` costs 64.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

const DERIVATION_TAG: &[u8] = b"direx.rng.v1";

/// Seeded random stream with raw-bit accounting.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    bit_buffer: u64,
    bits_in_buffer: u8,
    bits_drawn: u64,
}

impl RngStream {
    /// Derives the substream identified by `(label, index)` from a master seed.
    pub fn from_master(master_seed: u64, label: &str, index: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(DERIVATION_TAG);
        hasher.update(master_seed.to_le_bytes());
        hasher.update([0u8]);
        hasher.update(label.as_bytes());
        hasher.update([0u8]);
        hasher.update(index.to_le_bytes());
        let seed: [u8; 32] = hasher.finalize().into();
        RngStream {
            rng: ChaCha8Rng::from_seed(seed),
            bit_buffer: 0,
            bits_in_buffer: 0,
            bits_drawn: 0,
        }
    }

    /// Total raw bits handed out so far.
    pub fn bits_drawn(&self) -> u64 {
        self.bits_drawn
    }

    /// Uniform 64-bit word (costs 64 raw bits).
    pub fn next_u64(&mut self) -> u64 {
        self.bits_drawn += 64;
        self.rng.next_u64()
    }

    /// Fair bit (costs 1 raw bit; buffered internally).
    pub fn next_bit(&mut self) -> bool {
        if self.bits_in_buffer == 0 {
            self.bit_buffer = self.rng.next_u64();
            self.bits_in_buffer = 64;
        }
        let bit = self.bit_buffer & 1 != 0;
        self.bit_buffer >>= 1;
        self.bits_in_buffer -= 1;
        self.bits_drawn += 1;
        bit
    }

    pub fn bit_vector(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|_| self.next_bit()).collect()
    }

    /// Bernoulli(p) draw via one 64-bit word compare.
    ///
    /// `p <= 0` and `p >= 1` short-circuit without consuming randomness so
    /// that certain events are exactly certain.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            return false;
        }
        if p >= 1.0 {
            return true;
        }
        // p * 2^64 < 2^64 here, so the saturating float-to-int cast is exact
        // up to f64 resolution.
        let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
        self.next_u64() < threshold
    }

    /// Samples an index from an explicit probability vector (one u64 draw).
    pub fn sample_index(&mut self, probs: &[f64]) -> usize {
        debug_assert!(!probs.is_empty());
        let u = self.next_u64() as f64 / 18_446_744_073_709_551_616.0;
        let mut cumulative = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            cumulative += p;
            if u < cumulative {
                return i;
            }
        }
        probs.len() - 1
    }
}
