use num_complex::Complex64;
use rayon::prelude::*;

use crate::builder::{decompose_rcccx, decompose_rccx};
use crate::circuit::{CuAngles, Gate, GateKind};

type C64 = Complex64;
type Mat2 = [[C64; 2]; 2];

/// States at least this large are updated in parallel.
const PARALLEL_QUBITS: u32 = 14;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense state of `num_qubits` qubits, amplitude `k` belonging to basis state `|k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: u32,
    amps: Vec<C64>,
}

impl Statevector {
    pub fn zero(num_qubits: u32) -> Self {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: u32, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << num_qubits];
        amps[index] = ONE;
        Self { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(C64::norm_sqr).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(C64::norm_sqr).collect()
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) {
        for g in gates {
            self.apply(g);
        }
    }

    pub fn apply(&mut self, gate: &Gate) {
        let q = &gate.qubits;
        match &gate.kind {
            GateKind::I => {}
            GateKind::X => self.apply_x(q[0], 0),
            GateKind::CX => self.apply_x(q[1], 1 << q[0]),
            GateKind::Swap => self.apply_swap(q[0], q[1]),
            GateKind::SX | GateKind::H | GateKind::Ry(_) | GateKind::Rz(_) => {
                let m = single_qubit_matrix(&gate.kind).expect("single-qubit kind");
                self.apply_matrix(q[0], 0, &m);
            }
            GateKind::CU(angles) => self.apply_matrix(q[1], 1 << q[0], &cu_matrix(angles)),
            GateKind::Mcry { theta, .. } | GateKind::Mary { theta, .. } => {
                let mask = gate.controls().iter().fold(0usize, |m, &c| m | (1 << c));
                self.apply_matrix(gate.target(), mask, &ry_matrix(*theta));
            }
            GateKind::Rccx => {
                for g in decompose_rccx(q[0], q[1], q[2]) {
                    self.apply(&g);
                }
            }
            GateKind::Rcccx => {
                for g in decompose_rcccx(q[0], q[1], q[2], q[3]) {
                    self.apply(&g);
                }
            }
        }
    }

    /// Pauli injection used by the noise model: 0 = X, 1 = Y, 2 = Z.
    pub fn apply_pauli(&mut self, qubit: u32, pauli: u8) {
        match pauli {
            0 => self.apply_x(qubit, 0),
            1 => self.apply_matrix(qubit, 0, &[[ZERO, -C64::i()], [C64::i(), ZERO]]),
            _ => self.apply_matrix(qubit, 0, &[[ONE, ZERO], [ZERO, -ONE]]),
        }
    }

    fn parallel(&self) -> bool {
        self.num_qubits >= PARALLEL_QUBITS
    }

    /// Applies `m` to `target` on the subspace where every bit of `control_mask` is set.
    fn apply_matrix(&mut self, target: u32, control_mask: usize, m: &Mat2) {
        let stride = 1usize << target;
        let diagonal = m[0][1] == ZERO && m[1][0] == ZERO;
        let kernel = |base: usize, chunk: &mut [C64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            match (control_mask == 0, diagonal) {
                (true, true) => {
                    lo.iter_mut().for_each(|a| *a *= m[0][0]);
                    hi.iter_mut().for_each(|a| *a *= m[1][1]);
                }
                (true, false) => {
                    for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (x, y) = (*a0, *a1);
                        *a0 = m[0][0] * x + m[0][1] * y;
                        *a1 = m[1][0] * x + m[1][1] * y;
                    }
                }
                _ => {
                    for (k, (a0, a1)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                        if (base + k) & control_mask != control_mask {
                            continue;
                        }
                        let (x, y) = (*a0, *a1);
                        *a0 = m[0][0] * x + m[0][1] * y;
                        *a1 = m[1][0] * x + m[1][1] * y;
                    }
                }
            }
        };
        if self.parallel() {
            self.amps
                .par_chunks_mut(2 * stride)
                .enumerate()
                .for_each(|(i, chunk)| kernel(i * 2 * stride, chunk));
        } else if stride == 1 && control_mask == 0 {
            // pairs are adjacent; skip the per-chunk split
            for pair in self.amps.chunks_exact_mut(2) {
                let (x, y) = (pair[0], pair[1]);
                pair[0] = m[0][0] * x + m[0][1] * y;
                pair[1] = m[1][0] * x + m[1][1] * y;
            }
        } else {
            self.amps
                .chunks_mut(2 * stride)
                .enumerate()
                .for_each(|(i, chunk)| kernel(i * 2 * stride, chunk));
        }
    }

    fn apply_x(&mut self, target: u32, control_mask: usize) {
        let stride = 1usize << target;
        let kernel = |base: usize, chunk: &mut [C64]| {
            let (lo, hi) = chunk.split_at_mut(stride);
            if control_mask == 0 {
                lo.swap_with_slice(hi);
                return;
            }
            for (k, (a0, a1)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                if (base + k) & control_mask == control_mask {
                    std::mem::swap(a0, a1);
                }
            }
        };
        if self.parallel() {
            self.amps
                .par_chunks_mut(2 * stride)
                .enumerate()
                .for_each(|(i, chunk)| kernel(i * 2 * stride, chunk));
        } else {
            self.amps
                .chunks_mut(2 * stride)
                .enumerate()
                .for_each(|(i, chunk)| kernel(i * 2 * stride, chunk));
        }
    }

    fn apply_swap(&mut self, a: u32, b: u32) {
        let (ma, mb) = (1usize << a, 1usize << b);
        for k in 0..self.amps.len() {
            // visit each differing pair once, from the side with bit a set
            if k & ma != 0 && k & mb == 0 {
                self.amps.swap(k, k ^ ma ^ mb);
            }
        }
    }
}

pub(crate) fn ry_matrix(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C64::from(c), C64::from(-s)], [C64::from(s), C64::from(c)]]
}

fn cu_matrix(a: &CuAngles) -> Mat2 {
    let (s, c) = (a.theta / 2.0).sin_cos();
    let g = C64::from_polar(1.0, a.gamma);
    [
        [g * c, -g * C64::from_polar(s, a.lambda)],
        [g * C64::from_polar(s, a.phi), g * C64::from_polar(c, a.phi + a.lambda)],
    ]
}

/// 2×2 matrix of an uncontrolled single-qubit kind.
pub fn single_qubit_matrix(kind: &GateKind) -> Option<Mat2> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Some(match kind {
        GateKind::I => [[ONE, ZERO], [ZERO, ONE]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::SX => {
            let p = C64::new(0.5, 0.5);
            let m = C64::new(0.5, -0.5);
            [[p, m], [m, p]]
        }
        GateKind::H => [[C64::from(h), C64::from(h)], [C64::from(h), C64::from(-h)]],
        GateKind::Ry(t) => ry_matrix(*t),
        GateKind::Rz(t) => [
            [C64::from_polar(1.0, -t / 2.0), ZERO],
            [ZERO, C64::from_polar(1.0, t / 2.0)],
        ],
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_is_preserved() {
        let mut sv = Statevector::zero(3);
        let gates = [
            Gate::h(0),
            Gate::h(1),
            Gate::ry(2, 0.7),
            Gate::cx(0, 2),
            Gate::cu(
                1,
                2,
                CuAngles {
                    theta: 0.3,
                    phi: 0.2,
                    lambda: -0.4,
                    gamma: 0.1,
                },
            ),
            Gate::rccx(0, 1, 2),
            Gate::rz(1, 1.1),
            Gate::sx(0),
            Gate::swap(0, 2),
            Gate::mary(0.4, &[0, 1], 2),
        ];
        sv.apply_all(&gates);
        assert!((sv.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cx_and_swap_permute_basis_states() {
        let mut sv = Statevector::basis(3, 0b001);
        sv.apply(&Gate::cx(0, 2));
        assert_eq!(sv.probabilities()[0b101], 1.0);
        sv.apply(&Gate::swap(0, 1));
        assert_eq!(sv.probabilities()[0b110], 1.0);
    }

    #[test]
    fn parallel_path_matches_serial() {
        let gates: Vec<Gate> = (0..PARALLEL_QUBITS)
            .map(|q| Gate::ry(q, 0.1 * f64::from(q + 1)))
            .chain([Gate::cx(0, 13), Gate::mcry(0.9, &[1, 2, 3], 12), Gate::h(5)])
            .collect();
        let mut big = Statevector::zero(PARALLEL_QUBITS);
        big.apply_all(&gates);
        // same gates on a 15-qubit register restricted to |0⟩ on the top qubit
        let mut bigger = Statevector::zero(PARALLEL_QUBITS + 1);
        bigger.apply_all(&gates);
        for (a, b) in big.amplitudes().iter().zip(bigger.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
