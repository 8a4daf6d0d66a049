//! Simulation toolkit for deterministic energy harvesting from a sinusoidal
//! source with a random phase.
//!
//! Quantum modules work in units with ħ = 1; only [`harvest`] uses SI units.

pub mod bloch;
pub mod classical;
pub mod error;
pub mod harvest;
pub mod protocol;
pub mod qdyn;
pub mod smallmat;

pub use error::{Error, Result};
