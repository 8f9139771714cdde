//! Reference matrices built from first principles, independent of the
//! crate's simulator, plus small comparison helpers.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;

use frqi::circuit::{CuAngles, Gate, GateKind};

pub type Mat = DMatrix<C>;
pub type M2 = [[C; 2]; 2];

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn ry(theta: f64) -> M2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co), c(-s)], [c(s), c(co)]]
}

pub fn rz(theta: f64) -> M2 {
    [
        [C::from_polar(1.0, -theta / 2.0), c(0.0)],
        [c(0.0), C::from_polar(1.0, theta / 2.0)],
    ]
}

pub fn hadamard() -> M2 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [[c(h), c(h)], [c(h), c(-h)]]
}

pub fn pauli_x() -> M2 {
    [[c(0.0), c(1.0)], [c(1.0), c(0.0)]]
}

pub fn sqrt_x() -> M2 {
    let (p, m) = (C::new(0.5, 0.5), C::new(0.5, -0.5));
    [[p, m], [m, p]]
}

/// `U(θ, φ, λ)` in the usual three-angle parameterization.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> M2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [
        [c(co), -C::from_polar(s, lambda)],
        [C::from_polar(s, phi), C::from_polar(co, phi + lambda)],
    ]
}

/// `m` on `target` wherever every `controls` bit is 1; identity elsewhere.
pub fn controlled(nq: u32, controls: &[u32], target: u32, m: M2) -> Mat {
    let dim = 1usize << nq;
    let mask = controls.iter().fold(0usize, |acc, &q| acc | 1 << q);
    let mut out = Mat::zeros(dim, dim);
    for col in 0..dim {
        if col & mask != mask {
            out[(col, col)] = c(1.0);
            continue;
        }
        let bit = (col >> target) & 1;
        for (nb, m_row) in m.iter().enumerate() {
            let row = (col & !(1 << target)) | (nb << target);
            out[(row, col)] += m_row[bit];
        }
    }
    out
}

pub fn single(nq: u32, q: u32, m: M2) -> Mat {
    controlled(nq, &[], q, m)
}

/// Permutation matrix sending basis state `j` to `f(j)`.
pub fn permutation(nq: u32, f: impl Fn(usize) -> usize) -> Mat {
    let dim = 1usize << nq;
    let mut out = Mat::zeros(dim, dim);
    for j in 0..dim {
        out[(f(j), j)] = c(1.0);
    }
    out
}

/// Multi-controlled X as a permutation.
pub fn mcx(nq: u32, controls: &[u32], target: u32) -> Mat {
    let mask = controls.iter().fold(0usize, |acc, &q| acc | 1 << q);
    permutation(nq, |j| if j & mask == mask { j ^ (1 << target) } else { j })
}

/// Reference multi-controlled `Ry(γ)`.
pub fn mcry(nq: u32, controls: &[u32], target: u32, gamma: f64) -> Mat {
    controlled(nq, controls, target, ry(gamma))
}

/// Dense unitary of a gate list, by multiplying full-register matrices.
/// Supports the primitive kinds only; composites are deliberately absent.
pub fn dense(nq: u32, gates: &[Gate]) -> Mat {
    let dim = 1usize << nq;
    let mut u = Mat::identity(dim, dim);
    for g in gates {
        let q = &g.qubits;
        let m = match &g.kind {
            GateKind::I => Mat::identity(dim, dim),
            GateKind::X => single(nq, q[0], pauli_x()),
            GateKind::SX => single(nq, q[0], sqrt_x()),
            GateKind::H => single(nq, q[0], hadamard()),
            GateKind::Ry(t) => single(nq, q[0], ry(*t)),
            GateKind::Rz(t) => single(nq, q[0], rz(*t)),
            GateKind::CX => controlled(nq, &[q[0]], q[1], pauli_x()),
            GateKind::CU(a) => {
                let CuAngles {
                    theta,
                    phi,
                    lambda,
                    gamma,
                } = **a;
                let mut m = u3(theta, phi, lambda);
                for row in &mut m {
                    for x in row.iter_mut() {
                        *x *= C::from_polar(1.0, gamma);
                    }
                }
                controlled(nq, &[q[0]], q[1], m)
            }
            GateKind::Swap => permutation(nq, |j| {
                let (a, b) = ((j >> q[0]) & 1, (j >> q[1]) & 1);
                if a == b {
                    j
                } else {
                    j ^ (1 << q[0]) ^ (1 << q[1])
                }
            }),
            GateKind::Mcry { theta, .. } => mcry(nq, g.controls(), g.target(), *theta),
            other => panic!("reference simulator has no {other:?}"),
        };
        u = m * u;
    }
    u
}

/// Largest entrywise difference of magnitudes.
pub fn magnitude_gap(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x.norm() - y.norm()).abs())
        .fold(0.0, f64::max)
}

/// Largest entrywise difference after aligning global phase.
pub fn phase_gap(a: &Mat, b: &Mat) -> f64 {
    let (k, pivot) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty");
    let phase = a.iter().nth(k).unwrap() / pivot;
    let phase = phase / phase.norm();
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

pub fn unitarity_gap(u: &Mat) -> f64 {
    let dim = u.nrows();
    max_diff(&(u * u.adjoint()), &Mat::identity(dim, dim))
}

/// Largest entrywise modulus of `a − b`.
pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Textbook Toffoli with 6 CX, exact up to global phase.
pub fn naive_toffoli(a: u32, b: u32, t: u32) -> Vec<Gate> {
    use std::f64::consts::FRAC_PI_4 as T;
    vec![
        Gate::h(t),
        Gate::cx(b, t),
        Gate::rz(t, -T),
        Gate::cx(a, t),
        Gate::rz(t, T),
        Gate::cx(b, t),
        Gate::rz(t, -T),
        Gate::cx(a, t),
        Gate::rz(b, T),
        Gate::rz(t, T),
        Gate::h(t),
        Gate::cx(a, b),
        Gate::rz(a, T),
        Gate::rz(b, -T),
        Gate::cx(a, b),
    ]
}

/// Phase-polynomial C³X with 14 CX, exact up to global phase.
pub fn naive_c3x(a: u32, b: u32, cc: u32, t: u32) -> Vec<Gate> {
    let p = std::f64::consts::PI / 8.0;
    let mut g = vec![Gate::h(t)];
    g.extend([a, b, cc, t].map(|q| Gate::rz(q, p)));
    g.extend([
        Gate::cx(a, b),
        Gate::rz(b, -p),
        Gate::cx(a, b),
        Gate::cx(b, cc),
        Gate::rz(cc, -p),
        Gate::cx(a, cc),
        Gate::rz(cc, p),
        Gate::cx(b, cc),
        Gate::rz(cc, -p),
        Gate::cx(a, cc),
        Gate::cx(cc, t),
        Gate::rz(t, -p),
        Gate::cx(b, t),
        Gate::rz(t, p),
        Gate::cx(cc, t),
        Gate::rz(t, -p),
        Gate::cx(a, t),
        Gate::rz(t, p),
        Gate::cx(cc, t),
        Gate::rz(t, -p),
        Gate::cx(b, t),
        Gate::rz(t, p),
        Gate::cx(cc, t),
        Gate::rz(t, -p),
        Gate::cx(a, t),
        Gate::h(t),
    ]);
    g
}

pub fn cx_count(gates: &[Gate]) -> usize {
    gates.iter().filter(|g| matches!(g.kind, GateKind::CX)).count()
}

/// Exact FRQI probabilities from the state definition:
/// `(1/2^n)(cos θ_i |0⟩ + sin θ_i |1⟩) ⊗ |i⟩`, index `i + c · 2^{2n}`.
pub fn frqi_reference(n: u32, thetas: &[f64]) -> Vec<f64> {
    let pixels = 1usize << (2 * n);
    let w = 1.0 / pixels as f64;
    let mut out = vec![0.0; 2 * pixels];
    for (i, t) in thetas.iter().enumerate() {
        out[i] = w * t.cos().powi(2);
        out[i + pixels] = w * t.sin().powi(2);
    }
    out
}
