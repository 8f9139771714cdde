//! Statevector simulation, shot sampling with noise, and readout mitigation.

mod mitigation;
mod noise;
mod statevector;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mitigation::{
    build_calibration, exact_calibration, mitigate, mitigate_distribution, nnls, CalibrationMatrix, CalibrationOptions,
    MAX_CALIBRATION_QUBITS,
};
pub use noise::{sample, NoiseModel};
pub use statevector::{single_qubit_matrix, Statevector};

use crate::circuit::Circuit;

/// Sum-to-one slack accepted by [`Distribution::new`].
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("{num_qubits} qubits exceed the simulator cap of {limit}")]
    TooManyQubits { num_qubits: u32, limit: u32 },
    #[error("at least one shot is required")]
    ZeroShots,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("invalid probability {0}")]
    BadProbability(f64),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("qubit {0} out of range")]
    QubitOutOfRange(u32),
}

/// Simulator resource limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub max_qubits: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        // 2^26 complex doubles = 1 GiB
        Self { max_qubits: 26 }
    }
}

impl SimConfig {
    pub(crate) fn check(&self, num_qubits: u32) -> Result<(), SimError> {
        if num_qubits > self.max_qubits {
            Err(SimError::TooManyQubits {
                num_qubits,
                limit: self.max_qubits,
            })
        } else {
            Ok(())
        }
    }
}

/// Final state of `c` started from `|0…0⟩`.
pub fn simulate(c: &Circuit, cfg: &SimConfig) -> Result<Statevector, SimError> {
    cfg.check(c.num_qubits())?;
    let mut sv = Statevector::zero(c.num_qubits());
    sv.apply_all(c.gates());
    Ok(sv)
}

pub fn exact_probabilities(c: &Circuit, cfg: &SimConfig) -> Result<Distribution, SimError> {
    let sv = simulate(c, cfg)?;
    Ok(Distribution {
        num_qubits: c.num_qubits(),
        probs: sv.probabilities(),
    })
}

/// Probabilities over all `2^q` basis states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution {
    #[serde(skip)]
    num_qubits: u32,
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, SimError> {
        let len = probs.len();
        if !len.is_power_of_two() {
            return Err(SimError::DimMismatch {
                expected: len.next_power_of_two(),
                found: len,
            });
        }
        if let Some(&p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(SimError::BadProbability(p));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(SimError::NotNormalized(total));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros(),
            probs,
        })
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    /// Distribution of `keep` (in that bit order), other qubits summed out.
    pub fn marginal(&self, keep: &[u32]) -> Result<Distribution, SimError> {
        if let Some(&q) = keep.iter().find(|&&q| q >= self.num_qubits) {
            return Err(SimError::QubitOutOfRange(q));
        }
        Ok(Distribution {
            num_qubits: keep.len() as u32,
            probs: marginalize(&self.probs, keep),
        })
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.probs).expect("floats serialize")
    }
}

pub(crate) fn marginalize(probs: &[f64], keep: &[u32]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << keep.len()];
    for (k, &p) in probs.iter().enumerate() {
        out[project(k as u64, keep) as usize] += p;
    }
    out
}

fn project(k: u64, keep: &[u32]) -> u64 {
    keep.iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | ((k >> q) & 1) << i)
}

/// Shot histogram keyed by basis-state index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    num_qubits: u32,
    shots: u64,
    histogram: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn from_histogram(num_qubits: u32, histogram: BTreeMap<u64, u64>) -> Self {
        let shots = histogram.values().sum();
        Self {
            num_qubits,
            shots,
            histogram,
        }
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn histogram(&self) -> &BTreeMap<u64, u64> {
        &self.histogram
    }

    pub fn get(&self, state: u64) -> u64 {
        self.histogram.get(&state).copied().unwrap_or(0)
    }

    pub fn marginal(&self, keep: &[u32]) -> Result<Counts, SimError> {
        if let Some(&q) = keep.iter().find(|&&q| q >= self.num_qubits) {
            return Err(SimError::QubitOutOfRange(q));
        }
        let mut histogram = BTreeMap::new();
        for (&k, &v) in &self.histogram {
            *histogram.entry(project(k, keep)).or_insert(0) += v;
        }
        Ok(Self::from_histogram(keep.len() as u32, histogram))
    }

    /// Relative frequencies over all `2^q` states.
    pub fn to_distribution(&self) -> Distribution {
        let mut probs = vec![0.0; 1 << self.num_qubits];
        for (&k, &v) in &self.histogram {
            probs[k as usize] = v as f64 / self.shots as f64;
        }
        Distribution {
            num_qubits: self.num_qubits,
            probs,
        }
    }

    /// Bitstring label of `state`, most significant qubit first.
    pub fn label(&self, state: u64) -> String {
        (0..self.num_qubits)
            .rev()
            .map(|q| if state >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn to_json_map(&self) -> serde_json::Map<String, serde_json::Value> {
        self.histogram
            .iter()
            .map(|(&k, &v)| (self.label(k), v.into()))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_map()).expect("counts serialize")
    }
}
