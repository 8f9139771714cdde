//! Register layouts for the MARY builder.
//!
//! Up to `n = 4` every position qubit controls the MARY gate directly. Beyond
//! that the gate would need more than ten qubits, so groups of position qubits
//! are ANDed into clean ancillas first and the ancillas stand in for them as
//! controls. The AND of a group is written by the scaffold before each MARY
//! gate and removed by the same gates in reverse order after it.

use serde::Serialize;

use super::BuildError;
use crate::circuit::Gate;

/// Largest image exponent with a known layout.
pub const MAX_LAYOUT_N: u32 = 13;

/// Qubit budget and scaffold of a MARY circuit for one image size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutPlan {
    pub n: u32,
    pub num_position: u32,
    pub num_ancilla: u32,
    pub mary_arity: u8,
    /// Position qubits ANDed into each ancilla, ancilla `2n + k` for group `k`.
    pub groups: Vec<Vec<u32>>,
    /// Controls of the per-pixel MARY gate: ungrouped positions, then ancillas.
    pub mary_controls: Vec<u32>,
    /// Gates writing every group AND into its ancilla.
    #[serde(skip)]
    pub scaffold: Vec<Gate>,
}

impl LayoutPlan {
    pub fn for_n(n: u32) -> Result<Self, BuildError> {
        let sizes: &[u32] = match n {
            1..=4 => &[],
            5 => &[4],
            6 => &[6],
            7 => &[7],
            8 => &[8],
            9 => &[10],
            10 => &[7, 6],
            11 => &[8, 7],
            12 => &[9, 8],
            13 => &[7, 7, 6],
            _ => return Err(BuildError::TooLarge { n, limit: MAX_LAYOUT_N }),
        };
        let num_position = 2 * n;
        let num_ancilla = sizes.len() as u32;
        let mut groups = Vec::new();
        let mut next = 0;
        for &size in sizes {
            groups.push((next..next + size).collect::<Vec<u32>>());
            next += size;
        }
        let mut mary_controls: Vec<u32> = (next..num_position).collect();
        mary_controls.extend(num_position..num_position + num_ancilla);
        let mut scaffold = Vec::new();
        for (k, group) in groups.iter().enumerate() {
            let ancilla = num_position + k as u32;
            let helpers: Vec<u32> = (0..num_position).filter(|q| !group.contains(q)).collect();
            scaffold.extend(and_into(group, ancilla, &helpers));
        }
        Ok(Self {
            n,
            num_position,
            num_ancilla,
            mary_arity: mary_controls.len() as u8 + 1,
            groups,
            mary_controls,
            scaffold,
        })
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_position + self.num_ancilla + 1
    }

    pub fn gray(&self) -> u32 {
        self.num_position + self.num_ancilla
    }
}

/// Flips `target` iff every qubit of `controls` is `|1⟩`, up to relative
/// phases, leaving `helpers` (whose state is arbitrary) unchanged.
///
/// Groups of four or more use the linear Toffoli chain over `k − 2` dirty
/// helpers, `4(k − 2)` RCCX gates in all.
pub fn and_into(controls: &[u32], target: u32, helpers: &[u32]) -> Vec<Gate> {
    let k = controls.len();
    match *controls {
        [] => return Vec::new(),
        [c] => return vec![Gate::cx(c, target)],
        [a, b] => return vec![Gate::rccx(a, b, target)],
        [a, b, c] => return vec![Gate::rcccx(a, b, c, target)],
        _ => {}
    }
    assert!(helpers.len() >= k - 2, "AND over {k} controls needs {} helpers", k - 2);
    let x = controls;
    let h = &helpers[..k - 2];
    let ladder = |top: usize| -> Vec<Gate> {
        (2..=top)
            .rev()
            .map(|i| {
                let tgt = if i == k - 1 { target } else { h[i - 1] };
                Gate::rccx(x[i], h[i - 2], tgt)
            })
            .collect()
    };
    let middle = Gate::rccx(x[0], x[1], h[0]);
    let mut out = Vec::with_capacity(4 * (k - 2));
    for top in [k - 1, k - 2] {
        let down = ladder(top);
        out.extend(down.iter().cloned());
        out.push(middle.clone());
        out.extend(down.into_iter().rev());
    }
    out
}
