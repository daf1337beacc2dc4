//! Minimal two-qubit statevector simulator.
//!
//! Everything the device strategies need is a real four-amplitude state and
//! one-parameter local measurements. A measurement at angle `theta` uses the
//! orthonormal basis
//!
//! ```text
//! |v0> = cos(theta)|0> + sin(theta)|1>      (outcome 0)
//! |v1> = sin(theta)|0> - cos(theta)|1>      (outcome 1)
//! ```
//!
//! For the EPR pair this gives the textbook correlation
//! `P(a = b) = cos^2(theta_a - theta_b)`.

use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const NORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("state norm is {norm}, not 1 (tolerance {NORM_TOLERANCE})")]
    NotNormalized { norm: f64 },
}

/// Real-amplitude two-qubit pure state, ordered `|00>, |01>, |10>, |11>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    amplitudes: [f64; 4],
}

impl TwoQubitState {
    /// Builds a state, rejecting vectors whose norm is off by more than 1e-12.
    pub fn new(amplitudes: [f64; 4]) -> Result<Self, QuantumError> {
        let norm: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(QuantumError::NotNormalized { norm });
        }
        Ok(TwoQubitState { amplitudes })
    }

    /// The maximally entangled pair `(|00> + |11>) / sqrt(2)`.
    pub fn epr_pair() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        TwoQubitState { amplitudes: [h, 0.0, 0.0, h] }
    }

    pub fn amplitudes(&self) -> [f64; 4] {
        self.amplitudes
    }
}

/// Measurement direction, normalized into `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngle {
    theta: f64,
}

impl MeasurementAngle {
    pub fn new(theta: f64) -> Self {
        let tau = std::f64::consts::TAU;
        let mut t = theta % tau;
        if t <= -std::f64::consts::PI {
            t += tau;
        } else if t > std::f64::consts::PI {
            t -= tau;
        }
        MeasurementAngle { theta: t }
    }

    pub fn radians(&self) -> f64 {
        self.theta
    }

    /// Basis vector assigned to `outcome` (false = 0, true = 1).
    fn basis_vector(&self, outcome: bool) -> [f64; 2] {
        let (sin, cos) = self.theta.sin_cos();
        if outcome {
            [sin, -cos]
        } else {
            [cos, sin]
        }
    }
}

/// Joint outcome distribution of one local measurement per qubit,
/// indexed by `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    /// Probabilities in order `(0,0), (0,1), (1,0), (1,1)`.
    probs: [f64; 4],
}

impl JointDistribution {
    pub fn prob(&self, a: bool, b: bool) -> f64 {
        self.probs[(usize::from(a) << 1) | usize::from(b)]
    }

    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    /// `P(a = b)`.
    pub fn p_equal(&self) -> f64 {
        self.probs[0] + self.probs[3]
    }

    /// `P(a = 0)` (marginal of qubit 1).
    pub fn p_first_zero(&self) -> f64 {
        self.probs[0] + self.probs[1]
    }
}

/// Exact joint distribution of measuring qubit 1 at `angle_a` and qubit 2 at
/// `angle_b`: each cell is the squared projection of the state onto
/// `|v_a> (x) |w_b>`.
pub fn joint_outcome_distribution(
    state: &TwoQubitState,
    angle_a: MeasurementAngle,
    angle_b: MeasurementAngle,
) -> JointDistribution {
    let amps = state.amplitudes;
    let mut probs = [0.0; 4];
    for (idx, p) in probs.iter_mut().enumerate() {
        let va = angle_a.basis_vector(idx & 2 != 0);
        let wb = angle_b.basis_vector(idx & 1 != 0);
        let overlap = va[0] * wb[0] * amps[0]
            + va[0] * wb[1] * amps[1]
            + va[1] * wb[0] * amps[2]
            + va[1] * wb[1] * amps[3];
        *p = overlap * overlap;
    }
    JointDistribution { probs }
}

/// Draws one joint outcome `(a, b)` from the caller's stream.
pub fn sample_joint(
    state: &TwoQubitState,
    angle_a: MeasurementAngle,
    angle_b: MeasurementAngle,
    rng: &mut RngStream,
) -> (bool, bool) {
    let dist = joint_outcome_distribution(state, angle_a, angle_b);
    let idx = rng.sample_index(&dist.probs);
    (idx & 2 != 0, idx & 1 != 0)
}
