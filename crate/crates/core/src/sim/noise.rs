//! Shot sampling under Pauli gate errors and readout flips.
//!
//! Every shot owns a ChaCha8 stream selected by its index, so the histogram
//! does not depend on how rayon schedules shots. Within a shot, random numbers
//! are consumed in a fixed order: gate-error events (only when `p_gate > 0`),
//! then the measurement outcome, then the readout flips.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SimConfig, SimError, Statevector};
use crate::circuit::{Circuit, GateClass};
use crate::sim::Counts;

/// Memory spent on cached noiseless prefix states.
const CHECKPOINT_BYTES: usize = 64 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p_meas: f64,
    pub p_gate: f64,
    pub noisy_kinds: BTreeSet<GateClass>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p_meas: 0.0,
            p_gate: 0.0,
            noisy_kinds: BTreeSet::from([GateClass::X, GateClass::CX]),
        }
    }
}

impl NoiseModel {
    pub fn new(p_meas: f64, p_gate: f64) -> Result<Self, SimError> {
        for p in [p_meas, p_gate] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SimError::BadProbability(p));
            }
        }
        Ok(Self {
            p_meas,
            p_gate,
            ..Self::default()
        })
    }

    pub fn readout_only(p_meas: f64) -> Result<Self, SimError> {
        Self::new(p_meas, 0.0)
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_meas == 0.0 && self.p_gate == 0.0
    }
}

/// One Pauli error: after gate `gate`, on `qubit`, kind 0/1/2 = X/Y/Z.
#[derive(Debug, Clone, Copy)]
struct Event {
    gate: usize,
    qubit: u32,
    pauli: u8,
}

/// Draws `shots` measurement outcomes of `c`, optionally under `noise`.
pub fn sample(
    c: &Circuit,
    shots: u64,
    noise: Option<&NoiseModel>,
    seed: u64,
    cfg: &SimConfig,
) -> Result<Counts, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    cfg.check(c.num_qubits())?;
    let noise = noise.cloned().unwrap_or_default();
    let mut ideal = Statevector::zero(c.num_qubits());
    let engine = if noise.p_gate > 0.0 {
        Some(Trajectories::new(c, &noise, &mut ideal))
    } else {
        ideal.apply_all(c.gates());
        None
    };
    let cdf = cumulative(&ideal.probabilities());
    let q = c.num_qubits();
    let histogram = (0..shots)
        .into_par_iter()
        .fold(BTreeMap::new, |mut hist: BTreeMap<u64, u64>, shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shot);
            let events = engine.as_ref().map(|e| e.draw(&mut rng)).unwrap_or_default();
            let u: f64 = rng.gen();
            let mut outcome = if events.is_empty() {
                pick(&cdf, u)
            } else {
                let sv = engine.as_ref().expect("events imply an engine").run(c, &events);
                pick_amplitudes(&sv, u)
            };
            if noise.p_meas > 0.0 {
                for bit in 0..q {
                    if rng.gen::<f64>() < noise.p_meas {
                        outcome ^= 1 << bit;
                    }
                }
            }
            *hist.entry(outcome).or_insert(0) += 1;
            hist
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(Counts::from_histogram(q, histogram))
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

/// First state whose cumulative mass exceeds `u`, scaled to the actual total.
fn pick(cdf: &[f64], u: f64) -> u64 {
    let target = u * cdf.last().copied().unwrap_or(1.0);
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1) as u64
}

fn pick_amplitudes(sv: &Statevector, u: f64) -> u64 {
    let amps = sv.amplitudes();
    let target = u * sv.norm_sqr();
    let mut acc = 0.0;
    let mut last_nonzero = 0;
    for (k, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            last_nonzero = k;
        }
        acc += p;
        if acc > target {
            return k as u64;
        }
    }
    last_nonzero as u64
}

/// Noisy-trajectory engine: the error slots of the circuit plus cached
/// noiseless prefix states to restart from.
struct Trajectories {
    /// `(gate index, qubit)` for every qubit of every noisy gate, in order.
    slots: Vec<(usize, u32)>,
    p_gate: f64,
    stride: usize,
    /// `checkpoints[k]` is the state before gate `k · stride`.
    checkpoints: Vec<Statevector>,
}

impl Trajectories {
    /// Also leaves the noiseless final state in `ideal`.
    fn new(c: &Circuit, noise: &NoiseModel, ideal: &mut Statevector) -> Self {
        let slots = c
            .gates()
            .iter()
            .enumerate()
            .filter(|(_, g)| noise.noisy_kinds.contains(&g.class()))
            .flat_map(|(i, g)| g.qubits.iter().map(move |&q| (i, q)))
            .collect();
        let state_bytes = 16usize << c.num_qubits();
        let max_checkpoints = (CHECKPOINT_BYTES / state_bytes).max(1);
        let len = c.len().max(1);
        let stride = len.div_ceil(max_checkpoints);
        let mut checkpoints = Vec::new();
        for (i, g) in c.gates().iter().enumerate() {
            if i % stride == 0 {
                checkpoints.push(ideal.clone());
            }
            ideal.apply(g);
        }
        Self {
            slots,
            p_gate: noise.p_gate,
            stride,
            checkpoints,
        }
    }

    /// Error events of one shot; gaps between hits are geometric.
    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<Event> {
        let mut events = Vec::new();
        let mut pos = 0usize;
        let log_miss = (1.0 - self.p_gate).ln();
        while pos < self.slots.len() {
            if self.p_gate < 1.0 {
                let u: f64 = rng.gen();
                let skip = ((1.0 - u).ln() / log_miss).floor();
                if skip >= (self.slots.len() - pos) as f64 {
                    break;
                }
                pos += skip as usize;
            }
            let (gate, qubit) = self.slots[pos];
            events.push(Event {
                gate,
                qubit,
                pauli: rng.gen_range(0..3),
            });
            pos += 1;
        }
        events
    }

    fn run(&self, c: &Circuit, events: &[Event]) -> Statevector {
        let first = events[0].gate;
        let k = (first / self.stride).min(self.checkpoints.len() - 1);
        let mut sv = self.checkpoints[k].clone();
        let mut next = 0;
        for (i, g) in c.gates().iter().enumerate().skip(k * self.stride) {
            sv.apply(g);
            while next < events.len() && events[next].gate == i {
                sv.apply_pauli(events[next].qubit, events[next].pauli);
                next += 1;
            }
        }
        sv
    }
}
