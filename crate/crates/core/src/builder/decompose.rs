//! Composite-gate decompositions into `{Ry, Rz, H, CX, RCCX, RCCCX}`.
//!
//! Every sequence here is only magnitude-equivalent to the gate it replaces:
//! it may differ from it by per-basis-state phases, which computational-basis
//! measurement cannot see.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::circuit::{CircuitError, Gate, GateKind, MARY_ARITIES};

/// Toffoli up to relative phases, 3 CX.
pub fn decompose_rccx(a: u32, b: u32, target: u32) -> Vec<Gate> {
    let t = target;
    vec![
        Gate::h(t),
        Gate::rz(t, FRAC_PI_4),
        Gate::cx(b, t),
        Gate::rz(t, -FRAC_PI_4),
        Gate::cx(a, t),
        Gate::rz(t, FRAC_PI_4),
        Gate::cx(b, t),
        Gate::rz(t, -FRAC_PI_4),
        Gate::h(t),
    ]
}

/// Three-control Toffoli up to relative phases, 6 CX. Not self-inverse.
pub fn decompose_rcccx(a: u32, b: u32, c: u32, target: u32) -> Vec<Gate> {
    let t = target;
    vec![
        Gate::h(t),
        Gate::rz(t, FRAC_PI_4),
        Gate::cx(c, t),
        Gate::rz(t, -FRAC_PI_4),
        Gate::h(t),
        Gate::cx(a, t),
        Gate::rz(t, FRAC_PI_4),
        Gate::cx(b, t),
        Gate::rz(t, -FRAC_PI_4),
        Gate::cx(a, t),
        Gate::rz(t, FRAC_PI_4),
        Gate::cx(b, t),
        Gate::rz(t, -FRAC_PI_4),
        Gate::h(t),
        Gate::rz(t, FRAC_PI_4),
        Gate::cx(c, t),
        Gate::rz(t, -FRAC_PI_4),
        Gate::h(t),
    ]
}

/// How the controls of a MARY gate are split.
///
/// `frame` controls are folded in by a Gray-code Rz walk conjugated by H on
/// the target; the remaining controls drive the two X-type slots of the core,
/// each slot being a CX, RCCX or RCCCX depending on its size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaryPlan {
    pub frame: usize,
    pub slot_a: usize,
    pub slot_b: usize,
}

impl MaryPlan {
    /// Cheapest split for `arity` qubits (target included), ties towards a
    /// smaller frame.
    pub fn for_arity(arity: u8) -> Result<Self, CircuitError> {
        if !MARY_ARITIES.contains(&arity) {
            return Err(CircuitError::UnsupportedArity(arity));
        }
        let m = usize::from(arity) - 1;
        if m == 2 {
            return Ok(Self {
                frame: 0,
                slot_a: 1,
                slot_b: 1,
            });
        }
        let mut best: Option<(usize, Self)> = None;
        for frame in 1..=3 {
            for slot_a in 1..=3 {
                let Some(slot_b) = m.checked_sub(frame + slot_a) else {
                    continue;
                };
                if !(1..=3).contains(&slot_b) {
                    continue;
                }
                let plan = Self { frame, slot_a, slot_b };
                let cost = plan.cx_count();
                if best.is_none_or(|(c, _)| cost < c) {
                    best = Some((cost, plan));
                }
            }
        }
        Ok(best.expect("every supported arity has a plan").1)
    }

    pub fn cx_count(&self) -> usize {
        let frame = if self.frame == 0 {
            0
        } else {
            2 * ((1 << self.frame) - 1)
        };
        frame + 2 * (slot_cx(self.slot_a) + slot_cx(self.slot_b))
    }
}

fn slot_cx(size: usize) -> usize {
    match size {
        1 => 1,
        2 => 3,
        _ => 6,
    }
}

fn slot(group: &[u32], target: u32, out: &mut Vec<Gate>) {
    match *group {
        [c] => out.push(Gate::cx(c, target)),
        [a, b] => out.push(Gate::rccx(a, b, target)),
        [a, b, c] => out.push(Gate::rcccx(a, b, c, target)),
        _ => unreachable!("slots hold one to three controls"),
    }
}

/// `H · (Gray-code multiplexed Rz) · H` on the target, controlled by `frame`.
fn frame_gates(frame: &[u32], target: u32) -> Vec<Gate> {
    let f = frame.len();
    let step = FRAC_PI_2 / f64::from(1u32 << f);
    let mut out = vec![Gate::h(target)];
    let mut prev = 0usize;
    for j in 0..1usize << f {
        let code = j ^ (j >> 1);
        if j > 0 {
            let bit = (code ^ prev).trailing_zeros() as usize;
            out.push(Gate::cx(frame[bit], target));
        }
        let sign = if code.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out.push(Gate::rz(target, sign * step));
        prev = code;
    }
    out.push(Gate::h(target));
    out
}

fn inverse(gates: &[Gate]) -> Vec<Gate> {
    gates
        .iter()
        .rev()
        .map(|g| match g.kind {
            GateKind::Rz(t) => Gate::rz(g.target(), -t),
            GateKind::Ry(t) => Gate::ry(g.target(), -t),
            _ => g.clone(),
        })
        .collect()
}

/// Expands `MARY(γ)` over `controls → target` into CX/Ry/Rz/H and RCCX/RCCCX.
///
/// The resulting unitary has the magnitudes of the multi-controlled `Ry(γ)`.
pub fn decompose_mary(gamma: f64, controls: &[u32], target: u32) -> Result<Vec<Gate>, CircuitError> {
    let arity = u8::try_from(controls.len() + 1).unwrap_or(u8::MAX);
    let plan = MaryPlan::for_arity(arity)?;
    let (frame, rest) = controls.split_at(plan.frame);
    let (a, b) = rest.split_at(plan.slot_a);
    let q = gamma / 4.0;
    let rot = |angle: f64| {
        if plan.frame == 0 {
            Gate::ry(target, angle)
        } else {
            Gate::rz(target, angle)
        }
    };
    let mut core = Vec::with_capacity(8);
    for sign in [1.0, -1.0, 1.0, -1.0] {
        core.push(rot(sign * q));
        slot(if sign > 0.0 { a } else { b }, target, &mut core);
    }
    if plan.frame == 0 {
        return Ok(core);
    }
    let fr = frame_gates(frame, target);
    let mut out = fr.clone();
    out.extend(core);
    out.extend(inverse(&fr));
    Ok(out)
}

/// CX count of the MARY gate once RCCX/RCCCX are expanded.
pub fn mary_cx_count(arity: u8) -> Result<usize, CircuitError> {
    MaryPlan::for_arity(arity).map(|p| p.cx_count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_costs_are_frozen() {
        let counts: Vec<usize> = MARY_ARITIES.iter().map(|&a| mary_cx_count(a).unwrap()).collect();
        assert_eq!(counts, [4, 10, 18, 24, 30, 38]);
        assert_eq!(MaryPlan::for_arity(4), Err(CircuitError::UnsupportedArity(4)));
    }

    #[test]
    fn mary3_is_four_ry_four_cx() {
        let gates = decompose_mary(0.5, &[0, 1], 2).unwrap();
        assert_eq!(gates.len(), 8);
        assert_eq!(gates.iter().filter(|g| matches!(g.kind, GateKind::CX)).count(), 4);
        assert_eq!(gates.iter().filter(|g| matches!(g.kind, GateKind::Ry(_))).count(), 4);
    }
}
