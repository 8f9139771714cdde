//! Lowering to hardware basis gates and routing onto device topologies.

mod lower;
mod route;

use thiserror::Error;

pub use lower::{lower, lower_gate, lower_stats, lowered_len, mcry_gates};
pub use route::{route, Placement, Routed};

use crate::circuit::GateClass;

#[derive(Debug, Error, PartialEq)]
pub enum TranspileError {
    #[error("coupling map has {available} qubits, circuit needs {needed}")]
    MapTooSmall { needed: u32, available: u32 },
    #[error("coupling map is not connected")]
    DisconnectedMap,
    #[error("placement is not an injective map onto the device")]
    BadPlacement,
    #[error("{0} gates must be lowered before routing")]
    NotLowered(GateClass),
}
