// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod abc;
pub mod analysis;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod physics;
pub mod propagator;
pub mod tridiag;

pub use error::{Error, Result};
