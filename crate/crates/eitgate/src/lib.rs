//! Simulation of EIT-based Rydberg CNOT and CNOTᵏ gates.
//!
//! Frequencies are stored internally as angular frequencies (rad/s), times
//! in seconds and lengths in µm. Configs and reports use MHz and µs.

pub mod analysis;
pub mod atom;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod pulse;
pub mod runner;
pub mod units;

pub use error::{Error, Result};
