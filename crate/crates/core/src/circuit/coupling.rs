use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use super::CircuitError;

/// Undirected connectivity graph of a device: a CX is executable on `(a, b)`
/// only if the pair is an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMap {
    num_qubits: u32,
    edges: BTreeSet<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
}

impl CouplingMap {
    pub fn new(num_qubits: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, CircuitError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for q in [a, b] {
                if q >= num_qubits {
                    return Err(CircuitError::QubitOutOfRange { qubit: q, num_qubits });
                }
            }
            if a == b {
                return Err(CircuitError::DuplicateQubit {
                    kind: super::GateClass::CX,
                    qubit: a,
                });
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adjacency = vec![Vec::new(); num_qubits as usize];
        for &(a, b) in &set {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        Ok(Self {
            num_qubits,
            edges: set,
            adjacency,
        })
    }

    pub fn line(num_qubits: u32) -> Self {
        Self::new(num_qubits, (1..num_qubits).map(|q| (q - 1, q))).expect("valid line")
    }

    pub fn complete(num_qubits: u32) -> Self {
        let edges = (0..num_qubits).flat_map(|a| (a + 1..num_qubits).map(move |b| (a, b)));
        Self::new(num_qubits, edges).expect("valid complete graph")
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, q: u32) -> &[u32] {
        &self.adjacency[q as usize]
    }

    pub fn degree(&self, q: u32) -> usize {
        self.adjacency[q as usize].len()
    }

    pub fn is_edge(&self, a: u32, b: u32) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn is_connected(&self) -> bool {
        if self.num_qubits == 0 {
            return true;
        }
        self.bfs_order(0).len() == self.num_qubits as usize
    }

    /// Nodes in breadth-first order from `start`, neighbors by ascending index.
    pub fn bfs_order(&self, start: u32) -> Vec<u32> {
        let mut seen = vec![false; self.num_qubits as usize];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start as usize] = true;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            let mut next: Vec<u32> = self.neighbors(q).to_vec();
            next.sort_unstable();
            for nb in next {
                if !seen[nb as usize] {
                    seen[nb as usize] = true;
                    queue.push_back(nb);
                }
            }
        }
        order
    }

    /// Shortest path `from → to` inclusive, ties broken towards lower indices.
    pub fn shortest_path(&self, from: u32, to: u32) -> Option<Vec<u32>> {
        let mut parent = vec![u32::MAX; self.num_qubits as usize];
        let mut queue = VecDeque::from([to]);
        parent[to as usize] = to;
        while let Some(q) = queue.pop_front() {
            if q == from {
                break;
            }
            let mut next: Vec<u32> = self.neighbors(q).to_vec();
            next.sort_unstable();
            for nb in next {
                if parent[nb as usize] == u32::MAX {
                    parent[nb as usize] = q;
                    queue.push_back(nb);
                }
            }
        }
        if parent[from as usize] == u32::MAX {
            return None;
        }
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            cur = parent[cur as usize];
            path.push(cur);
        }
        Some(path)
    }

    /// Text form: qubit count on the first line, then one `a b` edge per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.num_qubits);
        for (a, b) in self.edges() {
            out.push_str(&format!("{a} {b}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, message: String| CircuitError::Parse { line, message };
        let (line, head) = lines.next().ok_or_else(|| parse_err(0, "empty coupling map".into()))?;
        let num_qubits: u32 = head.parse().map_err(|e| parse_err(line, format!("qubit count: {e}")))?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let nums: Vec<&str> = l.split_whitespace().collect();
            let [a, b] = nums.as_slice() else {
                return Err(parse_err(line, "expected 'a b'".into()));
            };
            let a = a.parse().map_err(|e| parse_err(line, format!("{e}")))?;
            let b = b.parse().map_err(|e| parse_err(line, format!("{e}")))?;
            edges.push((a, b));
        }
        Self::new(num_qubits, edges)
    }
}

/// Device topologies shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Ibmqx2,
    Melbourne,
    Santiago,
    Manila,
    Toronto,
    Ehningen,
}

impl Backend {
    pub const ALL: [Backend; 6] = [
        Self::Ibmqx2,
        Self::Melbourne,
        Self::Santiago,
        Self::Manila,
        Self::Toronto,
        Self::Ehningen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ibmqx2 => "ibmqx2",
            Self::Melbourne => "ibmq_16_melbourne",
            Self::Santiago => "ibmq_santiago",
            Self::Manila => "ibmq_manila",
            Self::Toronto => "ibmq_toronto",
            Self::Ehningen => "ibmq_ehningen",
        }
    }

    fn data(self) -> &'static str {
        match self {
            Self::Ibmqx2 => include_str!("../../maps/ibmqx2.txt"),
            Self::Melbourne => include_str!("../../maps/ibmq_16_melbourne.txt"),
            Self::Santiago => include_str!("../../maps/ibmq_santiago.txt"),
            Self::Manila => include_str!("../../maps/ibmq_manila.txt"),
            Self::Toronto => include_str!("../../maps/ibmq_toronto.txt"),
            Self::Ehningen => include_str!("../../maps/ibmq_ehningen.txt"),
        }
    }

    pub fn coupling_map(self) -> CouplingMap {
        CouplingMap::from_text(self.data()).expect("bundled coupling maps are valid")
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown backend '{s}'"))
    }
}
