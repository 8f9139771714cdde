//! Greedy SWAP routing onto a coupling map.

use std::collections::BTreeSet;

use super::TranspileError;
use crate::circuit::{Circuit, CouplingMap, Gate, GateKind, QubitRoles};

/// Where logical qubits start on the device.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Placement {
    /// Gray qubit on the best-connected node, the rest in BFS order around it.
    #[default]
    Auto,
    /// `layout[logical] = physical`.
    Fixed(Vec<u32>),
}

/// A circuit over the device's physical qubits.
#[derive(Debug, Clone)]
pub struct Routed {
    pub circuit: Circuit,
    /// `initial_layout[logical]` is the physical home of each logical qubit.
    pub initial_layout: Vec<u32>,
    /// Physical position of each logical qubit after the last gate.
    pub final_layout: Vec<u32>,
    pub swaps: usize,
}

impl Routed {
    /// Drops physical qubits no gate or logical qubit touches.
    ///
    /// Returns the compacted circuit and `physical → compact` index map.
    pub fn compact(&self) -> (Circuit, Vec<Option<u32>>) {
        let mut used: BTreeSet<u32> = self.initial_layout.iter().copied().collect();
        for g in self.circuit.gates() {
            used.extend(g.qubits.iter().copied());
        }
        let mut index = vec![None; self.circuit.num_qubits() as usize];
        for (i, &p) in used.iter().enumerate() {
            index[p as usize] = Some(i as u32);
        }
        let gates = self
            .circuit
            .gates()
            .iter()
            .map(|g| {
                let qs: Vec<u32> = g.qubits.iter().map(|&p| index[p as usize].unwrap()).collect();
                Gate::new(g.kind.clone(), &qs)
            })
            .collect();
        let c = Circuit::from_parts(used.len() as u32, gates, QubitRoles::default());
        (c, index)
    }

    /// Reorders a distribution of the compacted circuit into logical order,
    /// summing out qubits that carry no logical qubit.
    pub fn logical_distribution(&self, compact_probs: &[f64], index: &[Option<u32>]) -> Vec<f64> {
        let positions: Vec<u32> = self
            .final_layout
            .iter()
            .map(|&p| index[p as usize].expect("logical qubits are kept"))
            .collect();
        let mut out = vec![0.0; 1 << positions.len()];
        for (k, &p) in compact_probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let logical = positions
                .iter()
                .enumerate()
                .fold(0usize, |acc, (l, &c)| acc | ((k >> c) & 1) << l);
            out[logical] += p;
        }
        out
    }
}

/// Inserts SWAPs (as 3 CX each) so that every CX acts on an edge of `map`.
///
/// Each non-adjacent CX walks its control along a shortest path towards the
/// target. Input must already be lowered to one- and two-qubit gates.
pub fn route(c: &Circuit, map: &CouplingMap, placement: &Placement) -> Result<Routed, TranspileError> {
    let needed = c.num_qubits();
    if map.num_qubits() < needed {
        return Err(TranspileError::MapTooSmall {
            needed,
            available: map.num_qubits(),
        });
    }
    if !map.is_connected() {
        return Err(TranspileError::DisconnectedMap);
    }
    let initial = match placement {
        Placement::Auto => auto_layout(c, map),
        Placement::Fixed(layout) => {
            check_layout(layout, needed, map.num_qubits())?;
            layout.clone()
        }
    };
    let mut l2p = initial.clone();
    let mut p2l: Vec<Option<u32>> = vec![None; map.num_qubits() as usize];
    for (l, &p) in l2p.iter().enumerate() {
        p2l[p as usize] = Some(l as u32);
    }
    let mut gates = Vec::with_capacity(c.len());
    let mut swaps = 0;
    for g in c.gates() {
        match g.qubits.len() {
            1 => gates.push(Gate::new(g.kind.clone(), &[l2p[g.qubits[0] as usize]])),
            2 if matches!(g.kind, GateKind::CX) => {
                let (a, b) = (g.qubits[0] as usize, g.qubits[1] as usize);
                if !map.is_edge(l2p[a], l2p[b]) {
                    let path = map
                        .shortest_path(l2p[a], l2p[b])
                        .ok_or(TranspileError::DisconnectedMap)?;
                    for w in path.windows(2).take(path.len() - 2) {
                        let (p, q) = (w[0], w[1]);
                        gates.extend([Gate::cx(p, q), Gate::cx(q, p), Gate::cx(p, q)]);
                        swaps += 1;
                        let (lp, lq) = (p2l[p as usize], p2l[q as usize]);
                        p2l.swap(p as usize, q as usize);
                        if let Some(l) = lp {
                            l2p[l as usize] = q;
                        }
                        if let Some(l) = lq {
                            l2p[l as usize] = p;
                        }
                    }
                }
                gates.push(Gate::cx(l2p[a], l2p[b]));
            }
            _ => return Err(TranspileError::NotLowered(g.class())),
        }
    }
    Ok(Routed {
        circuit: Circuit::from_parts(map.num_qubits(), gates, QubitRoles::default()),
        initial_layout: initial,
        final_layout: l2p,
        swaps,
    })
}

fn check_layout(layout: &[u32], needed: u32, available: u32) -> Result<(), TranspileError> {
    let mut seen = vec![false; available as usize];
    if layout.len() != needed as usize {
        return Err(TranspileError::BadPlacement);
    }
    for &p in layout {
        match seen.get_mut(p as usize) {
            Some(s) if !*s => *s = true,
            _ => return Err(TranspileError::BadPlacement),
        }
    }
    Ok(())
}

fn auto_layout(c: &Circuit, map: &CouplingMap) -> Vec<u32> {
    let n = c.num_qubits();
    let hub = (0..map.num_qubits())
        .max_by_key(|&q| (map.degree(q), std::cmp::Reverse(q)))
        .unwrap_or(0);
    let gray = c.roles().gray.unwrap_or(n.saturating_sub(1));
    let mut order = map.bfs_order(hub).into_iter();
    let mut layout = vec![0; n as usize];
    if n == 0 {
        return layout;
    }
    layout[gray as usize] = order.next().expect("hub");
    for l in (0..n).filter(|&l| l != gray) {
        layout[l as usize] = order.next().expect("map has room");
    }
    layout
}
