//! FRQI preparation circuits.
//!
//! Both builders superpose the position register with H gates and then visit
//! the pixels in index order. Before the rotation for pixel `i` the position
//! register is X-masked so that `|i⟩` reads as all ones; the rotation
//! `Ry(2θ_i)` then fires on the gray qubit only for that pixel.

mod decompose;
mod layout;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decompose::{decompose_mary, decompose_rcccx, decompose_rccx, mary_cx_count, MaryPlan};
pub use layout::{and_into, LayoutPlan, MAX_LAYOUT_N};

use crate::circuit::{Circuit, CircuitError, Gate, QubitRoles};
use crate::image::AngleVector;
use crate::transpile::lowered_len;

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("image exponent {n} exceeds the builder limit {limit}")]
    TooLarge { n: u32, limit: u32 },
    #[error("{what} estimate {estimate} exceeds the budget of {budget}")]
    OverBudget {
        what: &'static str,
        estimate: u64,
        budget: u64,
    },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuilderVariant {
    Mcry,
    Mary,
}

impl BuilderVariant {
    pub const ALL: [BuilderVariant; 2] = [Self::Mcry, Self::Mary];
}

impl fmt::Display for BuilderVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mcry => "mcry",
            Self::Mary => "mary",
        })
    }
}

impl FromStr for BuilderVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mcry" => Ok(Self::Mcry),
            "mary" => Ok(Self::Mary),
            other => Err(format!("unknown builder '{other}'")),
        }
    }
}

/// How the X masks around each rotation are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AddressingStyle {
    /// Toggle only the bits where consecutive pixel indices differ.
    #[default]
    TransitionMask,
    /// Apply the full complement mask before and after every rotation.
    FullMask,
}

/// Resource ceilings checked before a circuit is materialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildLimits {
    pub max_n_mcry: u32,
    pub max_n_mary: u32,
    /// Bytes the composite-level gate list may occupy.
    pub memory_bytes: u64,
    /// Basis gates the lowered circuit may contain.
    pub lowered_gate_budget: u64,
}

impl Default for BuildLimits {
    fn default() -> Self {
        Self {
            max_n_mcry: 8,
            max_n_mary: 9,
            memory_bytes: 4 << 30,
            lowered_gate_budget: 1_000_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub addressing: AddressingStyle,
    pub limits: BuildLimits,
}

/// Size of a circuit before it is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BuildEstimate {
    pub qubits: u32,
    pub ir_gates: u64,
    pub lowered_gates: u64,
}

impl BuildEstimate {
    pub fn ir_bytes(&self) -> u64 {
        self.ir_gates * std::mem::size_of::<Gate>() as u64
    }
}

/// Gate counts of a circuit without building it.
pub fn estimate(variant: BuilderVariant, n: u32, addressing: AddressingStyle) -> Result<BuildEstimate, BuildError> {
    let pixels = 1u64 << (2 * n);
    let positions: Vec<u32> = (0..2 * n).collect();
    let (qubits, per_pixel_ir, per_pixel_lowered) = match variant {
        BuilderVariant::Mcry => {
            let gray = 2 * n;
            let g = Gate::mcry(1.0, &positions, gray);
            (2 * n + 1, 1, lowered_len(&g))
        }
        BuilderVariant::Mary => {
            let plan = LayoutPlan::for_n(n)?;
            let g = Gate::mary(1.0, &plan.mary_controls, plan.gray());
            let scaffold: u64 = plan.scaffold.iter().map(lowered_len).sum();
            let ir = 1 + 2 * plan.scaffold.len() as u64;
            (plan.num_qubits(), ir, lowered_len(&g) + 2 * scaffold)
        }
    };
    let xs = match addressing {
        AddressingStyle::TransitionMask => 2 * pixels - 2,
        AddressingStyle::FullMask => 2 * u64::from(n) * pixels,
    };
    let hs = u64::from(2 * n);
    Ok(BuildEstimate {
        qubits,
        ir_gates: hs + xs + pixels * per_pixel_ir,
        lowered_gates: 3 * hs + xs + pixels * per_pixel_lowered,
    })
}

/// Rejects builds whose estimate breaks `limits`.
pub fn check_limits(variant: BuilderVariant, n: u32, opts: &BuildOptions) -> Result<BuildEstimate, BuildError> {
    let limit = match variant {
        BuilderVariant::Mcry => opts.limits.max_n_mcry,
        BuilderVariant::Mary => opts.limits.max_n_mary,
    };
    if n > limit {
        return Err(BuildError::TooLarge { n, limit });
    }
    let est = estimate(variant, n, opts.addressing)?;
    if est.ir_bytes() > opts.limits.memory_bytes {
        return Err(BuildError::OverBudget {
            what: "circuit memory",
            estimate: est.ir_bytes(),
            budget: opts.limits.memory_bytes,
        });
    }
    if est.lowered_gates > opts.limits.lowered_gate_budget {
        return Err(BuildError::OverBudget {
            what: "lowered gate count",
            estimate: est.lowered_gates,
            budget: opts.limits.lowered_gate_budget,
        });
    }
    Ok(est)
}

pub fn build_mcry_circuit(angles: &AngleVector) -> Result<Circuit, BuildError> {
    build_circuit(BuilderVariant::Mcry, angles, &BuildOptions::default())
}

pub fn build_mary_circuit(angles: &AngleVector) -> Result<Circuit, BuildError> {
    build_circuit(BuilderVariant::Mary, angles, &BuildOptions::default())
}

pub fn build_circuit(
    variant: BuilderVariant,
    angles: &AngleVector,
    opts: &BuildOptions,
) -> Result<Circuit, BuildError> {
    let n = angles.n();
    let est = check_limits(variant, n, opts)?;
    let positions: Vec<u32> = (0..2 * n).collect();
    let mut gates = Vec::with_capacity(est.ir_gates as usize);
    gates.extend(positions.iter().map(|&q| Gate::h(q)));
    let (num_ancilla, style) = (est.qubits - 2 * n - 1, opts.addressing);
    match variant {
        BuilderVariant::Mcry => {
            let gray = 2 * n;
            addressed_rotations(&positions, angles.thetas(), style, &mut gates, |theta, out| {
                out.push(Gate::mcry(2.0 * theta, &positions, gray))
            });
        }
        BuilderVariant::Mary => {
            let plan = LayoutPlan::for_n(n)?;
            addressed_rotations(&positions, angles.thetas(), style, &mut gates, |theta, out| {
                mary_pixel(&plan, theta, out)
            });
        }
    }
    // validated in place: large circuits cannot afford a second gate list
    let roles = QubitRoles::frqi(n, num_ancilla);
    Circuit::with_roles(est.qubits, roles.clone())?;
    for g in &gates {
        g.validate(est.qubits)?;
    }
    Ok(Circuit::from_parts(est.qubits, gates, roles))
}

fn mary_pixel(plan: &LayoutPlan, theta: f64, out: &mut Vec<Gate>) {
    out.extend(plan.scaffold.iter().cloned());
    out.push(Gate::mary(2.0 * theta, &plan.mary_controls, plan.gray()));
    out.extend(plan.scaffold.iter().rev().cloned());
}

/// Emits the X masks and one rotation block per pixel.
fn addressed_rotations(
    positions: &[u32],
    thetas: &[f64],
    style: AddressingStyle,
    out: &mut Vec<Gate>,
    mut rotation: impl FnMut(f64, &mut Vec<Gate>),
) {
    let zeros = |mask: usize, out: &mut Vec<Gate>| {
        for (bit, &q) in positions.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                out.push(Gate::x(q));
            }
        }
    };
    let full = (1usize << positions.len()) - 1;
    for (i, &theta) in thetas.iter().enumerate() {
        match style {
            AddressingStyle::TransitionMask => {
                let toggle = if i == 0 { full } else { i ^ (i - 1) };
                zeros(toggle, out);
                rotation(theta, out);
            }
            AddressingStyle::FullMask => {
                zeros(!i & full, out);
                rotation(theta, out);
                zeros(!i & full, out);
            }
        }
    }
}

/// Circuit addressing a single pixel, for layouts too large to build in full.
pub fn mary_single_pixel_circuit(plan: &LayoutPlan, index: usize, theta: f64) -> Result<Circuit, BuildError> {
    let mut c = Circuit::with_roles(plan.num_qubits(), QubitRoles::frqi(plan.n, plan.num_ancilla))?;
    let positions: Vec<u32> = (0..plan.num_position).collect();
    let mask = !index & ((1usize << plan.num_position) - 1);
    let xs: Vec<Gate> = positions
        .iter()
        .filter(|&&q| mask >> q & 1 == 1)
        .map(|&q| Gate::x(q))
        .collect();
    let mut gates: Vec<Gate> = positions.iter().map(|&q| Gate::h(q)).collect();
    gates.extend(xs.iter().cloned());
    mary_pixel(plan, theta, &mut gates);
    gates.extend(xs);
    c.extend(gates)?;
    Ok(c)
}
