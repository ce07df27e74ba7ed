//! Variational and exact simulation of real-space quantum dynamics on a
//! discrete-variable-representation grid, encoded onto qubits.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ansatz;
pub mod config;
pub mod dvr;
pub mod error;
pub mod exact;
pub mod models;
pub mod pauli;
pub mod resources;
pub mod sim;
pub mod spectral;
pub mod spectrum;
pub mod subspace;
pub mod units;
pub mod variational;
pub mod workflow;

pub use error::{Error, Result};
