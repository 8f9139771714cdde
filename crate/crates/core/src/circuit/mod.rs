//! Gate-level circuit IR shared by the builders, the transpiler and the simulator.
//!
//! Qubit 0 is the least significant bit of a basis-state index. FRQI circuits
//! put the position register at the bottom, ancillas above it and the gray
//! qubit at the top, so a basis index reads `gray | ancillas | position`.

mod coupling;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

pub use coupling::{Backend, CouplingMap};
pub use text::{circuit_from_text, circuit_to_text};

use crate::sim::Statevector;

/// Largest register [`unitary_of`] will expand into a dense matrix.
pub const MAX_UNITARY_QUBITS: u32 = 12;

/// Arities the MARY gate family is defined for.
pub const MARY_ARITIES: [u8; 6] = [3, 5, 7, 8, 9, 10];

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: u32, num_qubits: u32 },
    #[error("gate {kind} repeats qubit {qubit}")]
    DuplicateQubit { kind: GateClass, qubit: u32 },
    #[error("gate {kind} expects {expected} qubits, got {found}")]
    Arity {
        kind: GateClass,
        expected: usize,
        found: usize,
    },
    #[error("non-finite rotation angle in {0}")]
    BadAngle(GateClass),
    #[error("MCRY needs at least one control")]
    NoControls,
    #[error("unsupported MARY arity {0}")]
    UnsupportedArity(u8),
    #[error("qubit roles overlap or do not cover the register")]
    BadRoles,
    #[error("{num_qubits} qubits exceed the dense-matrix limit of {limit}")]
    TooManyQubits { num_qubits: u32, limit: u32 },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Angles of a controlled-U gate: `e^{iγ} U(θ, φ, λ)` on the target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuAngles {
    pub theta: f64,
    pub phi: f64,
    pub lambda: f64,
    pub gamma: f64,
}

impl CuAngles {
    pub fn ry(theta: f64) -> Self {
        Self {
            theta,
            phi: 0.0,
            lambda: 0.0,
            gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    I,
    X,
    SX,
    H,
    Ry(f64),
    Rz(f64),
    CX,
    CU(Box<CuAngles>),
    Swap,
    /// Ry on the last qubit when every other qubit is `|1⟩`.
    Mcry {
        theta: f64,
        controls: u32,
    },
    /// Reduced-CX multi-controlled Ry over `arity` qubits (target last).
    Mary {
        theta: f64,
        arity: u8,
    },
    /// Toffoli up to relative phases.
    Rccx,
    /// Three-control Toffoli up to relative phases.
    Rcccx,
}

/// Angle-erased gate kind, used as the key of gate counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateClass {
    I,
    X,
    SX,
    H,
    Ry,
    Rz,
    CX,
    CU,
    Swap,
    Mcry,
    Mary,
    Rccx,
    Rcccx,
}

impl GateClass {
    pub const ALL: [GateClass; 13] = [
        Self::I,
        Self::X,
        Self::SX,
        Self::H,
        Self::Ry,
        Self::Rz,
        Self::CX,
        Self::CU,
        Self::Swap,
        Self::Mcry,
        Self::Mary,
        Self::Rccx,
        Self::Rcccx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::X => "X",
            Self::SX => "SX",
            Self::H => "H",
            Self::Ry => "RY",
            Self::Rz => "RZ",
            Self::CX => "CX",
            Self::CU => "CU",
            Self::Swap => "SWAP",
            Self::Mcry => "MCRY",
            Self::Mary => "MARY",
            Self::Rccx => "RCCX",
            Self::Rcccx => "RCCCX",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(name))
    }

    /// Member of the hardware basis `{I, X, SX, Rz, CX}`.
    pub fn is_basis(self) -> bool {
        matches!(self, Self::I | Self::X | Self::SX | Self::Rz | Self::CX)
    }
}

impl fmt::Display for GateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl GateKind {
    pub fn class(&self) -> GateClass {
        match self {
            Self::I => GateClass::I,
            Self::X => GateClass::X,
            Self::SX => GateClass::SX,
            Self::H => GateClass::H,
            Self::Ry(_) => GateClass::Ry,
            Self::Rz(_) => GateClass::Rz,
            Self::CX => GateClass::CX,
            Self::CU(_) => GateClass::CU,
            Self::Swap => GateClass::Swap,
            Self::Mcry { .. } => GateClass::Mcry,
            Self::Mary { .. } => GateClass::Mary,
            Self::Rccx => GateClass::Rccx,
            Self::Rcccx => GateClass::Rcccx,
        }
    }

    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            Self::I | Self::X | Self::SX | Self::H | Self::Ry(_) | Self::Rz(_) => 1,
            Self::CX | Self::CU(_) | Self::Swap => 2,
            Self::Rccx => 3,
            Self::Rcccx => 4,
            Self::Mcry { controls, .. } => *controls as usize + 1,
            Self::Mary { arity, .. } => usize::from(*arity),
        }
    }

    fn angles_finite(&self) -> bool {
        match self {
            Self::Ry(t) | Self::Rz(t) => t.is_finite(),
            Self::Mcry { theta, .. } | Self::Mary { theta, .. } => theta.is_finite(),
            Self::CU(a) => [a.theta, a.phi, a.lambda, a.gamma].iter().all(|x| x.is_finite()),
            _ => true,
        }
    }
}

pub type Qubits = SmallVec<[u32; 3]>;

/// A gate applied to an ordered list of qubits, target last.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Qubits,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[u32]) -> Self {
        Self {
            kind,
            qubits: Qubits::from_slice(qubits),
        }
    }

    pub fn i(q: u32) -> Self {
        Self::new(GateKind::I, &[q])
    }

    pub fn x(q: u32) -> Self {
        Self::new(GateKind::X, &[q])
    }

    pub fn sx(q: u32) -> Self {
        Self::new(GateKind::SX, &[q])
    }

    pub fn h(q: u32) -> Self {
        Self::new(GateKind::H, &[q])
    }

    pub fn ry(q: u32, theta: f64) -> Self {
        Self::new(GateKind::Ry(theta), &[q])
    }

    pub fn rz(q: u32, theta: f64) -> Self {
        Self::new(GateKind::Rz(theta), &[q])
    }

    pub fn cx(control: u32, target: u32) -> Self {
        Self::new(GateKind::CX, &[control, target])
    }

    pub fn cu(control: u32, target: u32, angles: CuAngles) -> Self {
        Self::new(GateKind::CU(Box::new(angles)), &[control, target])
    }

    pub fn swap(a: u32, b: u32) -> Self {
        Self::new(GateKind::Swap, &[a, b])
    }

    pub fn rccx(a: u32, b: u32, target: u32) -> Self {
        Self::new(GateKind::Rccx, &[a, b, target])
    }

    pub fn rcccx(a: u32, b: u32, c: u32, target: u32) -> Self {
        Self::new(GateKind::Rcccx, &[a, b, c, target])
    }

    pub fn mcry(theta: f64, controls: &[u32], target: u32) -> Self {
        let mut qubits = Qubits::from_slice(controls);
        qubits.push(target);
        Self {
            kind: GateKind::Mcry {
                theta,
                controls: controls.len() as u32,
            },
            qubits,
        }
    }

    pub fn mary(theta: f64, controls: &[u32], target: u32) -> Self {
        let mut qubits = Qubits::from_slice(controls);
        qubits.push(target);
        Self {
            kind: GateKind::Mary {
                theta,
                arity: qubits.len() as u8,
            },
            qubits,
        }
    }

    pub fn class(&self) -> GateClass {
        self.kind.class()
    }

    pub fn target(&self) -> u32 {
        *self.qubits.last().expect("gates act on at least one qubit")
    }

    pub fn controls(&self) -> &[u32] {
        &self.qubits[..self.qubits.len() - 1]
    }

    pub fn validate(&self, num_qubits: u32) -> Result<(), CircuitError> {
        let class = self.class();
        match &self.kind {
            GateKind::Mcry { controls: 0, .. } => return Err(CircuitError::NoControls),
            GateKind::Mary { arity, .. } if !MARY_ARITIES.contains(arity) => {
                return Err(CircuitError::UnsupportedArity(*arity))
            }
            _ => {}
        }
        if self.qubits.len() != self.kind.arity() {
            return Err(CircuitError::Arity {
                kind: class,
                expected: self.kind.arity(),
                found: self.qubits.len(),
            });
        }
        if !self.kind.angles_finite() {
            return Err(CircuitError::BadAngle(class));
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange { qubit: q, num_qubits });
            }
            if self.qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateQubit { kind: class, qubit: q });
            }
        }
        Ok(())
    }
}

/// Which qubits hold the gray value, the pixel address and scratch space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitRoles {
    pub gray: Option<u32>,
    pub position: Vec<u32>,
    pub ancilla: Vec<u32>,
}

impl QubitRoles {
    /// Standard FRQI layout: positions `0..2n`, ancillas next, gray on top.
    pub fn frqi(n: u32, num_ancilla: u32) -> Self {
        let num_position = 2 * n;
        Self {
            position: (0..num_position).collect(),
            ancilla: (num_position..num_position + num_ancilla).collect(),
            gray: Some(num_position + num_ancilla),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.gray.is_none() && self.position.is_empty() && self.ancilla.is_empty()
    }

    /// Data qubits in decode order: position bits then the gray qubit.
    pub fn data_qubits(&self) -> Vec<u32> {
        let mut out = self.position.clone();
        out.extend(self.gray);
        out
    }

    fn check(&self, num_qubits: u32) -> Result<(), CircuitError> {
        if self.is_empty() {
            return Ok(());
        }
        let mut seen = vec![false; num_qubits as usize];
        for &q in self.position.iter().chain(&self.ancilla).chain(&self.gray) {
            match seen.get_mut(q as usize) {
                Some(slot) if !*slot => *slot = true,
                _ => return Err(CircuitError::BadRoles),
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(CircuitError::BadRoles)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: u32,
    gates: Vec<Gate>,
    roles: QubitRoles,
}

impl Circuit {
    pub fn new(num_qubits: u32) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            roles: QubitRoles::default(),
        }
    }

    pub fn with_roles(num_qubits: u32, roles: QubitRoles) -> Result<Self, CircuitError> {
        roles.check(num_qubits)?;
        Ok(Self {
            num_qubits,
            gates: Vec::new(),
            roles,
        })
    }

    pub fn from_gates(num_qubits: u32, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Self::new(num_qubits);
        c.extend(gates)?;
        Ok(c)
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn roles(&self) -> &QubitRoles {
        &self.roles
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<(), CircuitError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn reserve(&mut self, additional: usize) {
        self.gates.reserve(additional);
    }

    /// Same gates and roles on a different register, used by routing.
    pub(crate) fn from_parts(num_qubits: u32, gates: Vec<Gate>, roles: QubitRoles) -> Self {
        Self {
            num_qubits,
            gates,
            roles,
        }
    }

    pub fn is_basis(&self) -> bool {
        self.gates.iter().all(|g| g.class().is_basis())
    }

    pub fn stats(&self) -> CircuitStats {
        let mut s = CircuitStats::new(self.num_qubits);
        for g in &self.gates {
            s.record(g);
        }
        s
    }
}

/// Longest chain of gates sharing qubits, under as-soon-as-possible layering.
pub fn depth(c: &Circuit) -> usize {
    c.stats().depth()
}

pub fn gate_counts(c: &Circuit) -> BTreeMap<GateClass, usize> {
    c.stats().counts().clone()
}

/// Depth and gate counts accumulated one gate at a time.
///
/// Lets very large lowered circuits be measured without materializing them.
#[derive(Debug, Clone)]
pub struct CircuitStats {
    frontier: Vec<usize>,
    depth: usize,
    counts: BTreeMap<GateClass, usize>,
    total: usize,
}

impl CircuitStats {
    pub fn new(num_qubits: u32) -> Self {
        Self {
            frontier: vec![0; num_qubits as usize],
            depth: 0,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn record(&mut self, gate: &Gate) {
        let level = gate
            .qubits
            .iter()
            .map(|&q| self.frontier[q as usize])
            .max()
            .unwrap_or(0)
            + 1;
        for &q in &gate.qubits {
            self.frontier[q as usize] = level;
        }
        self.depth = self.depth.max(level);
        *self.counts.entry(gate.class()).or_default() += 1;
        self.total += 1;
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn counts(&self) -> &BTreeMap<GateClass, usize> {
        &self.counts
    }

    pub fn count(&self, class: GateClass) -> usize {
        self.counts.get(&class).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

/// Dense unitary of `c`, column `j` being the image of basis state `|j⟩`.
pub fn unitary_of(c: &Circuit) -> Result<DMatrix<Complex64>, CircuitError> {
    if c.num_qubits > MAX_UNITARY_QUBITS {
        return Err(CircuitError::TooManyQubits {
            num_qubits: c.num_qubits,
            limit: MAX_UNITARY_QUBITS,
        });
    }
    let dim = 1usize << c.num_qubits;
    let mut u = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut sv = Statevector::basis(c.num_qubits, j);
        for g in c.gates() {
            sv.apply(g);
        }
        u.column_mut(j)
            .iter_mut()
            .zip(sv.amplitudes())
            .for_each(|(dst, a)| *dst = *a);
    }
    Ok(u)
}
