//! Distance of a central-spin/environment state to spectrum broadcast
//! structures: dense density-matrix numerics, the spin-bath model in closed
//! form, SBS bounds, discrimination statistics, Monte Carlo ensembles, a
//! brute-force oracle and a reproducible experiment runner.

// `!(x >= 0.0)` style guards are deliberate: they reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod densmat;
pub mod discrimination;
pub mod ensemble;
pub mod error;
pub mod oracle;
pub mod runner;
pub mod sbs;
pub mod spin_model;

pub use error::{Error, Result};
