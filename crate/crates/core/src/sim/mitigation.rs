//! Calibration matrices and readout-error mitigation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{sample, Counts, Distribution, NoiseModel, SimConfig, SimError};
use crate::circuit::{Circuit, Gate, GateClass};

/// Largest register a dense calibration matrix is built for.
pub const MAX_CALIBRATION_QUBITS: u32 = 12;

/// Entries of a solution this negative still count as zero.
const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CalibrationOptions {
    /// Let gate errors hit the X gates preparing each basis state, not only
    /// the readout.
    pub gate_noise: bool,
}

/// Column-stochastic: column `j` is the measured distribution when `|j⟩` is
/// prepared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationMatrix {
    num_qubits: u32,
    columns: Vec<Vec<f64>>,
}

impl CalibrationMatrix {
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self, SimError> {
        let dim = columns.len();
        if !dim.is_power_of_two() {
            return Err(SimError::DimMismatch {
                expected: dim.next_power_of_two(),
                found: dim,
            });
        }
        for col in &columns {
            if col.len() != dim {
                return Err(SimError::DimMismatch {
                    expected: dim,
                    found: col.len(),
                });
            }
            Distribution::new(col.clone())?;
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros(),
            columns,
        })
    }

    pub fn identity(num_qubits: u32) -> Self {
        let dim = 1usize << num_qubits;
        let columns = (0..dim)
            .map(|j| (0..dim).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { num_qubits, columns }
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    /// Entry `(measured, prepared)`.
    pub fn get(&self, measured: usize, prepared: usize) -> f64 {
        self.columns[prepared][measured]
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |i, j| self.columns[j][i])
    }

    /// Pushes a noise-free distribution through the calibrated channel.
    pub fn apply(&self, probs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (col, &p) in self.columns.iter().zip(probs) {
            for (o, &m) in out.iter_mut().zip(col) {
                *o += m * p;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let raw: Self = serde_json::from_str(text)?;
        Self::from_columns(raw.columns).map_err(serde::de::Error::custom)
    }
}

fn check_qubits(q: u32) -> Result<(), SimError> {
    if q > MAX_CALIBRATION_QUBITS {
        return Err(SimError::TooManyQubits {
            num_qubits: q,
            limit: MAX_CALIBRATION_QUBITS,
        });
    }
    Ok(())
}

fn prep_circuit(q: u32, state: usize) -> Circuit {
    let gates = (0..q).filter(|b| state >> b & 1 == 1).map(Gate::x).collect();
    Circuit::from_gates(q, gates).expect("prep gates are in range")
}

/// Samples every basis-state preparation `shots_per_state` times.
pub fn build_calibration(
    q: u32,
    noise: &NoiseModel,
    shots_per_state: u64,
    seed: u64,
    opts: CalibrationOptions,
) -> Result<CalibrationMatrix, SimError> {
    check_qubits(q)?;
    let noise = if opts.gate_noise {
        noise.clone()
    } else {
        NoiseModel {
            p_gate: 0.0,
            ..noise.clone()
        }
    };
    let cfg = SimConfig::default();
    let columns = (0..1usize << q)
        .map(|j| {
            let counts = sample(
                &prep_circuit(q, j),
                shots_per_state,
                Some(&noise),
                column_seed(seed, j),
                &cfg,
            )?;
            Ok(counts.to_distribution().into_probs())
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    Ok(CalibrationMatrix { num_qubits: q, columns })
}

/// Independent seed per prepared state (splitmix64 finalizer).
fn column_seed(seed: u64, column: usize) -> u64 {
    let mut z = seed.wrapping_add((column as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The infinite-shot limit of [`build_calibration`].
///
/// Each prepared bit flips independently: by readout with `p_meas`, and, for
/// bits set by a noisy X gate, by an X or Y error with `2/3 · p_gate`.
pub fn exact_calibration(q: u32, noise: &NoiseModel, opts: CalibrationOptions) -> Result<CalibrationMatrix, SimError> {
    check_qubits(q)?;
    let gate_flip = if opts.gate_noise && noise.noisy_kinds.contains(&GateClass::X) {
        2.0 * noise.p_gate / 3.0
    } else {
        0.0
    };
    let dim = 1usize << q;
    let columns = (0..dim)
        .map(|j| {
            let flips: Vec<f64> = (0..q)
                .map(|b| {
                    let e = if j >> b & 1 == 1 { gate_flip } else { 0.0 };
                    e + noise.p_meas - 2.0 * e * noise.p_meas
                })
                .collect();
            (0..dim)
                .map(|i| {
                    flips
                        .iter()
                        .enumerate()
                        .map(|(b, &f)| if (i ^ j) >> b & 1 == 1 { f } else { 1.0 - f })
                        .product()
                })
                .collect()
        })
        .collect();
    Ok(CalibrationMatrix { num_qubits: q, columns })
}

pub fn mitigate(counts: &Counts, cal: &CalibrationMatrix) -> Result<Distribution, SimError> {
    mitigate_distribution(counts.to_distribution().probs(), cal)
}

/// Nonnegative least-squares inverse of the calibrated channel, renormalized.
///
/// Tries a plain LU solve first and keeps it when it is already nonnegative;
/// otherwise solves the constrained problem, with a clamped pseudo-inverse as
/// the last resort.
pub fn mitigate_distribution(probs: &[f64], cal: &CalibrationMatrix) -> Result<Distribution, SimError> {
    if probs.len() != cal.dim() {
        return Err(SimError::DimMismatch {
            expected: cal.dim(),
            found: probs.len(),
        });
    }
    let m = cal.matrix();
    let y = DVector::from_column_slice(probs);
    let direct = m
        .clone()
        .lu()
        .solve(&y)
        .filter(|x| x.iter().all(|v| v.is_finite() && *v >= -NEGATIVE_SLACK));
    let x = match direct {
        Some(x) => x,
        None => nnls(&m, &y).unwrap_or_else(|| {
            m.clone()
                .pseudo_inverse(1e-12)
                .map(|p| p * &y)
                .unwrap_or_else(|_| y.clone())
        }),
    };
    let clamped: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total <= 0.0 {
        return Err(SimError::NotNormalized(total));
    }
    Distribution::new(clamped.into_iter().map(|v| v / total).collect())
}

/// Lawson–Hanson active-set solver for `min ‖A x − b‖₂, x ≥ 0`.
///
/// Returns `None` if it fails to converge.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let n = a.ncols();
    let tol = 1e-12 * a.norm().max(1.0) * b.norm().max(1.0);
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;
    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else {
            return Some(x);
        };
        passive[j] = true;
        loop {
            let s = restricted_lstsq(a, b, &passive)?;
            if (0..n).filter(|&i| passive[i]).all(|i| s[i] > 0.0) {
                x = s;
                break;
            }
            let alpha = (0..n)
                .filter(|&i| passive[i] && s[i] <= 0.0)
                .map(|i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            x += (s - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    None
}

fn restricted_lstsq(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> Option<DVector<f64>> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let sub = a.select_columns(&cols);
    let sol = sub.svd(true, true).solve(b, 1e-14).ok()?;
    let mut full = DVector::zeros(passive.len());
    for (k, &i) in cols.iter().enumerate() {
        full[i] = sol[k];
    }
    Some(full)
}
