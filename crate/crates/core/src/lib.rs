//! FRQI image encoding circuits: construction (MCRY and MARY), lowering to
//! hardware basis gates, routing, statevector simulation with noise, readout
//! mitigation and decoding back to images.
//!
//! ```
//! use frqi::{builder, image, sim};
//!
//! let img = image::Image::new(2, vec![10, 85, 170, 255]).unwrap();
//! let angles = image::gray_to_angles(&img, image::EncodingMode::Linear);
//! let circuit = builder::build_mary_circuit(&angles).unwrap();
//! let dist = sim::exact_probabilities(&circuit, &sim::SimConfig::default()).unwrap();
//! let out = image::probs_to_image(dist.probs(), 1, Default::default(), Default::default()).unwrap();
//! assert_eq!(out.image, img);
//! ```

pub mod builder;
pub mod circuit;
pub mod experiment;
pub mod image;
pub mod sim;
pub mod transpile;

use thiserror::Error;

pub use builder::{BuildError, BuilderVariant};
pub use circuit::{Circuit, CircuitError, Gate, GateClass, GateKind};
pub use image::{DecodeVariant, EncodingMode, Image, ImageError};
pub use sim::{Counts, Distribution, NoiseModel, SimError};
pub use transpile::TranspileError;

/// Any pipeline failure, with the process exit code it maps to.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Transpile(#[from] TranspileError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Data(String),
}

impl Error {
    /// 1 usage, 2 resource cap, 3 data error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Build(BuildError::TooLarge { .. } | BuildError::OverBudget { .. })
            | Self::Sim(SimError::TooManyQubits { .. })
            | Self::Circuit(CircuitError::TooManyQubits { .. }) => 2,
            _ => 3,
        }
    }
}
