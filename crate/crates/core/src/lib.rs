//! Simulation and analysis laboratory for device-independent randomness
//! expansion.
//!
//! A short seed certifies a long near-uniform output by playing nonlocal
//! games against a pair of untrusted devices: if the devices win CHSH-style
//! test blocks at a rate no classical strategy achieves, their outputs must
//! contain fresh randomness regardless of how they were built. This crate
//! provides every layer of that pipeline as an executable, desk-scale model:
//!
//! - [`quantum`]: two-qubit states and projective measurements, enough to
//!   derive honest-device statistics exactly;
//! - [`devices`]: pluggable device pairs (honest entangled, deterministic,
//!   shared-randomness, and deliberately cheating strategies) behind a
//!   no-signaling respond interface;
//! - [`referee`]: the two certification protocols, transcript records, and
//!   an independent transcript verifier;
//! - [`guessing`]: the guessing-game attack that converts low-entropy
//!   devices into a no-signaling violation;
//! - [`analysis`]: distributions, min-entropy, smoothing, CHSH optima, and
//!   transcript statistics;
//! - [`extractor`]: the t-XOR extractor with weak-design seed scheduling and
//!   exhaustive soundness oracles;
//! - [`bits`] and [`rng`]: bit-vector plumbing and deterministic, labelled
//!   randomness streams.
//!
//! Everything is deterministic given a master seed: rerunning any experiment
//! with the same configuration reproduces its outputs byte for byte.

pub mod analysis;
pub mod bits;
pub mod devices;
pub mod extractor;
pub mod guessing;
pub mod quantum;
pub mod referee;
pub mod rng;

pub use analysis::{
    binary_entropy, classical_chsh_optimum, min_entropy, smooth_min_entropy, smoothcap_witness,
    statistical_distance, transcript_stats, wilson_interval, AnalysisError, ChshOptimum,
    DeterministicChshStrategy, Distribution, SmoothCapWitness, TranscriptStats,
};
pub use bits::{
    bits_to_hex, hamming_distance, hamming_weight, hex_to_bits, relative_distance, xor, BitString,
    BitsError,
};
pub use devices::{
    cheating_b0_bits, chsh_angle, extended_angle, DeviceError, DevicePair, ExtendedSymbol,
    GameKind, InputSymbol, PairSpec, Side,
};
pub use extractor::{
    all_t_subsets, build_weak_design, extract, list_decode_txor, seed_to_subsets,
    strong_extractor_distance, txor_bit, ExtractorError, ExtractorParams, ListDecodeOutcome,
    TxorPredictions, WeakDesign, DEFAULT_RHO,
};
pub use guessing::{
    calibrate_b0, lemma3_bound, run_attack, run_guessing_game, B0Spec, GuessingConfig,
    GuessingError, GuessingResult,
};
pub use quantum::{
    joint_outcome_distribution, sample_joint, JointDistribution, MeasurementAngle, QuantumError,
    TwoQubitState,
};
pub use referee::{
    protocol_a_params_for_target, recompute_shannon_bits, run_protocol_a,
    run_protocol_a_with_spec, run_protocol_b, run_protocol_b_with_spec, select_bell_blocks,
    verify_transcript, BlockRecord, ProtocolAParams, ProtocolBParams, ProtocolParams,
    RandomnessCost, RefereeError, Transcript, TranscriptVerifyError, TRANSCRIPT_FORMAT_VERSION,
};
pub use rng::RngStream;
