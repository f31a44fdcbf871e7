//! Exact simulation and ancilla-profile optimization for teleportation-based
//! linear-optical logic that accepts every measurement outcome.
//!
//! - [`fock`]: sparse Fock-space states, lifted mode unitaries, measurement.
//! - [`ancilla`]: coefficient profiles and the entangled ancilla states.
//! - [`protocol`]: teleportation, controlled sign flip and the direct-CNOT
//!   construction, by exhaustive branch enumeration.
//! - [`fidelity`]: closed-form success and error probabilities.
//! - [`optimize`]: profiles minimizing the average error.
//! - [`cli`]: the batch runner behind the `hifi` binary.

pub mod ancilla;
pub mod cli;
pub mod error;
pub mod fidelity;
pub mod fock;
pub mod optimize;
pub mod protocol;

pub use error::{Error, Result};
