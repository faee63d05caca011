//! Steady-state photon transport through a driven-dissipative Bose-Hubbard
//! chain: truncated Fock space, Lindblad steady states, input-output
//! transmission, closed-form limits, level statistics and disorder
//! ensembles.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod cli;
pub mod config;
pub mod disorder;
pub mod eigen;
pub mod error;
pub mod lattice;
pub mod liouvillian;
pub mod solver;
pub mod spectroscopy;

pub use error::{Error, Result};
