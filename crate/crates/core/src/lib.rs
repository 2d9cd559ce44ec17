//! Pauli webs over layered ZX diagrams of rotated surface-code circuits,
//! cross-checked against a stabilizer-tableau simulator.

pub mod cli;
pub mod error;
pub mod export;
pub mod gf2;
pub mod oracle;
pub mod pauli;
pub mod sample;
pub mod surface;
pub mod verify;
pub mod web;
pub mod zx;

pub use error::{Error, Result};
pub use pauli::{Pauli, PauliOperator};
