//! Hybrid stabilizer / tensor-network simulation of Clifford-dominated
//! circuits.

pub mod clifford;
pub mod dense;
pub mod error;
pub mod harness;
pub mod mps;
pub mod pauli;
pub mod stab_mpo;
pub mod temporal;

pub use error::{Error, Result};
