//! Rewriting into the basis `{I, X, SX, Rz, CX}`.
//!
//! Euler forms hold up to global phase:
//!
//! * `H      = Rz(π/2) · SX · Rz(π/2)`
//! * `U(θ,φ,λ)`, time order: `Rz(λ), SX, Rz(θ+π), SX, Rz(φ+π)`
//! * `Ry(θ)  = U(θ, 0, 0)`, i.e. `SX, Rz(θ+π), SX, Rz(π)`
//!
//! Rz angles are reduced to `(−π, π]`; rotations that reduce to zero are
//! dropped.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::builder::{decompose_mary, decompose_rcccx, decompose_rccx};
use crate::circuit::{Circuit, CircuitStats, CuAngles, Gate, GateKind};

/// Below this an Rz angle counts as zero.
const ZERO_ANGLE: f64 = 1e-14;

pub fn lower(c: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(c.len());
    for g in c.gates() {
        lower_gate(g, &mut |x| gates.push(x));
    }
    Circuit::from_parts(c.num_qubits(), gates, c.roles().clone())
}

/// Depth and counts of `lower(c)` without holding the lowered gate list.
pub fn lower_stats(c: &Circuit) -> CircuitStats {
    let mut stats = CircuitStats::new(c.num_qubits());
    for g in c.gates() {
        lower_gate(g, &mut |x| stats.record(&x));
    }
    stats
}

/// Number of basis gates `g` lowers to.
pub fn lowered_len(g: &Gate) -> u64 {
    match g.kind {
        // closed form, the expansion itself is exponential in the controls
        GateKind::Mcry { controls, .. } if controls > 3 => {
            let cus = (1u64 << controls) - 1;
            let cu_len = {
                let mut n = 0;
                lower_gate(&Gate::cu(0, 1, CuAngles::ry(1.0)), &mut |_| n += 1);
                n
            };
            cus - 1 + cus * cu_len
        }
        _ => {
            let mut n = 0;
            lower_gate(g, &mut |_| n += 1);
            n
        }
    }
}

/// Feeds the basis-gate expansion of `g` to `emit`.
pub fn lower_gate(g: &Gate, emit: &mut dyn FnMut(Gate)) {
    let q = &g.qubits;
    match &g.kind {
        GateKind::I | GateKind::X | GateKind::SX | GateKind::Rz(_) | GateKind::CX => emit(g.clone()),
        GateKind::H => {
            emit(Gate::rz(q[0], FRAC_PI_2));
            emit(Gate::sx(q[0]));
            emit(Gate::rz(q[0], FRAC_PI_2));
        }
        GateKind::Ry(theta) => u_gate(q[0], *theta, 0.0, 0.0, emit),
        GateKind::CU(a) => cu_gate(q[0], q[1], a, emit),
        GateKind::Swap => {
            emit(Gate::cx(q[0], q[1]));
            emit(Gate::cx(q[1], q[0]));
            emit(Gate::cx(q[0], q[1]));
        }
        GateKind::Mcry { theta, .. } => {
            for x in mcry_gates(*theta, g.controls(), g.target()) {
                lower_gate(&x, emit);
            }
        }
        GateKind::Mary { theta, .. } => {
            let parts = decompose_mary(*theta, g.controls(), g.target()).expect("validated MARY arity");
            for x in parts {
                lower_gate(&x, emit);
            }
        }
        GateKind::Rccx => {
            for x in decompose_rccx(q[0], q[1], q[2]) {
                lower_gate(&x, emit);
            }
        }
        GateKind::Rcccx => {
            for x in decompose_rcccx(q[0], q[1], q[2], q[3]) {
                lower_gate(&x, emit);
            }
        }
    }
}

fn rz(q: u32, angle: f64, emit: &mut dyn FnMut(Gate)) {
    let mut a = angle.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    if a.abs() > ZERO_ANGLE {
        emit(Gate::rz(q, a));
    }
}

fn u_gate(q: u32, theta: f64, phi: f64, lambda: f64, emit: &mut dyn FnMut(Gate)) {
    rz(q, lambda, emit);
    emit(Gate::sx(q));
    rz(q, theta + PI, emit);
    emit(Gate::sx(q));
    rz(q, phi + PI, emit);
}

fn cu_gate(c: u32, t: u32, a: &CuAngles, emit: &mut dyn FnMut(Gate)) {
    rz(c, a.gamma + (a.lambda + a.phi) / 2.0, emit);
    rz(t, (a.lambda - a.phi) / 2.0, emit);
    emit(Gate::cx(c, t));
    u_gate(t, -a.theta / 2.0, 0.0, -(a.phi + a.lambda) / 2.0, emit);
    emit(Gate::cx(c, t));
    u_gate(t, a.theta / 2.0, a.phi, 0.0, emit);
}

/// Multi-controlled Ry as a Gray-code walk of controlled rotations.
///
/// Each step rotates by `±γ / 2^{k−1}` controlled on the parity of a subset
/// of the controls; the parity is accumulated in the subset's highest qubit
/// with CX gates, and every control is restored at the end. `2^k − 1`
/// controlled rotations and `2^k − 2` CX in all.
pub fn mcry_gates(gamma: f64, controls: &[u32], target: u32) -> Vec<Gate> {
    let k = controls.len();
    let step = gamma / (1u64 << (k - 1)) as f64;
    let mut out = Vec::new();
    let mut prev = 0usize;
    for j in 1..1usize << k {
        let code = j ^ (j >> 1);
        let lead = usize::BITS - 1 - code.leading_zeros();
        if j > 1 {
            let changed = (code ^ prev).trailing_zeros();
            // a fresh lead bit picks up the parity of the bit just below it
            let source = if changed == lead { lead - 1 } else { changed };
            out.push(Gate::cx(controls[source as usize], controls[lead as usize]));
        }
        let sign = if code.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        out.push(Gate::cu(controls[lead as usize], target, CuAngles::ry(sign * step)));
        prev = code;
    }
    out
}
