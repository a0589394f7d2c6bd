//! Quantum Fisher information of Dicke-superposition probes under collective-spin
//! generators, with optional local and global noise.

pub mod capacity;
pub mod error;
pub mod noise;
pub mod numerics;
pub mod operators;
pub mod optimize;
pub mod qfi;
pub mod states;

pub use error::{QfiError, Result};
