//! Line-oriented circuit format.
//!
//! ```text
//! QUBITS 3
//! ROLE position 0 1
//! ROLE gray 2
//! H 0
//! RY 2 0.7853981633974483
//! MARY 0 1 2 1.5707963267948966
//! ```
//!
//! One gate per line as `KIND q0 q1 … [angles]`, target last. `CU` carries
//! four angles (θ φ λ γ). Blank lines and `#` comments are ignored.

use std::fmt::Write as _;

use super::{Circuit, CircuitError, CuAngles, Gate, GateClass, GateKind, QubitRoles};

pub fn circuit_to_text(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "QUBITS {}", c.num_qubits()).unwrap();
    let roles = c.roles();
    if !roles.is_empty() {
        write_role(&mut out, "position", &roles.position);
        write_role(&mut out, "ancilla", &roles.ancilla);
        write_role(&mut out, "gray", roles.gray.as_slice());
    }
    for g in c.gates() {
        out.push_str(g.class().name());
        for q in &g.qubits {
            write!(out, " {q}").unwrap();
        }
        match &g.kind {
            GateKind::Ry(t) | GateKind::Rz(t) | GateKind::Mcry { theta: t, .. } | GateKind::Mary { theta: t, .. } => {
                write!(out, " {t}").unwrap()
            }
            GateKind::CU(a) => write!(out, " {} {} {} {}", a.theta, a.phi, a.lambda, a.gamma).unwrap(),
            _ => {}
        }
        out.push('\n');
    }
    out
}

fn write_role(out: &mut String, name: &str, qubits: &[u32]) {
    out.push_str("ROLE ");
    out.push_str(name);
    for q in qubits {
        write!(out, " {q}").unwrap();
    }
    out.push('\n');
}

pub fn circuit_from_text(text: &str) -> Result<Circuit, CircuitError> {
    let mut num_qubits = None;
    let mut roles = QubitRoles::default();
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| CircuitError::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().expect("non-empty line");
        let rest: Vec<&str> = tokens.collect();
        if head.eq_ignore_ascii_case("QUBITS") {
            let [n] = rest.as_slice() else {
                return Err(err("QUBITS takes one value".into()));
            };
            num_qubits = Some(n.parse::<u32>().map_err(|e| err(e.to_string()))?);
            continue;
        }
        if head.eq_ignore_ascii_case("ROLE") {
            let Some((name, qs)) = rest.split_first() else {
                return Err(err("ROLE needs a name".into()));
            };
            let qs = parse_qubits(qs).map_err(err)?;
            match name.to_ascii_lowercase().as_str() {
                "position" => roles.position = qs,
                "ancilla" => roles.ancilla = qs,
                "gray" => roles.gray = qs.first().copied(),
                other => return Err(err(format!("unknown role '{other}'"))),
            }
            continue;
        }
        let class = GateClass::from_name(head).ok_or_else(|| err(format!("unknown gate '{head}'")))?;
        let num_angles = match class {
            GateClass::Ry | GateClass::Rz | GateClass::Mcry | GateClass::Mary => 1,
            GateClass::CU => 4,
            _ => 0,
        };
        if rest.len() < num_angles {
            return Err(err(format!("{class} needs {num_angles} angle(s)")));
        }
        let (qs, angle_tokens) = rest.split_at(rest.len() - num_angles);
        let qubits = parse_qubits(qs).map_err(err)?;
        let angles = angle_tokens
            .iter()
            .map(|t| t.parse::<f64>().map_err(|e| err(format!("angle '{t}': {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let kind = match class {
            GateClass::I => GateKind::I,
            GateClass::X => GateKind::X,
            GateClass::SX => GateKind::SX,
            GateClass::H => GateKind::H,
            GateClass::Ry => GateKind::Ry(angles[0]),
            GateClass::Rz => GateKind::Rz(angles[0]),
            GateClass::CX => GateKind::CX,
            GateClass::CU => GateKind::CU(Box::new(CuAngles {
                theta: angles[0],
                phi: angles[1],
                lambda: angles[2],
                gamma: angles[3],
            })),
            GateClass::Swap => GateKind::Swap,
            GateClass::Mcry => GateKind::Mcry {
                theta: angles[0],
                controls: qubits.len().saturating_sub(1) as u32,
            },
            GateClass::Mary => GateKind::Mary {
                theta: angles[0],
                arity: qubits.len() as u8,
            },
            GateClass::Rccx => GateKind::Rccx,
            GateClass::Rcccx => GateKind::Rcccx,
        };
        gates.push((line_no, Gate::new(kind, &qubits)));
    }
    let num_qubits = num_qubits.ok_or(CircuitError::Parse {
        line: 0,
        message: "missing QUBITS header".into(),
    })?;
    let mut c = Circuit::with_roles(num_qubits, roles)?;
    c.reserve(gates.len());
    for (line, g) in gates {
        c.push(g).map_err(|e| CircuitError::Parse {
            line,
            message: e.to_string(),
        })?;
    }
    Ok(c)
}

fn parse_qubits(tokens: &[&str]) -> Result<Vec<u32>, String> {
    tokens
        .iter()
        .map(|t| t.parse::<u32>().map_err(|e| format!("qubit '{t}': {e}")))
        .collect()
}
