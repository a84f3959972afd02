//! Exact simulation of entanglement monogamy bounds for small qubit registers
//! and of a squeezing-based protocol that estimates the bipartite entanglement
//! between two subsystems from measurements on one of them.

pub mod analytic;
pub mod error;
pub mod hamiltonians;
pub mod measures;
pub mod optimize;
pub mod protocol;
pub mod qcore;
pub mod sampling;
pub mod spin;

pub use error::{Error, Result};
