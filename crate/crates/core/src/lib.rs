//! Metaorder reconstruction and nonlinear price-impact measurement.
//!
//! The crate turns exchange order-event logs into per-trader metaorders,
//! measures the peak impact `I(Q) = c Q^delta` by relative least squares,
//! fits the tail exponents of metaorder volume and length, and calibrates
//! the whole estimator against a null model whose exponent is exactly 1/2.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod impact;
pub mod io;
pub mod metaorder;
pub mod nullmodel;
pub mod orderflow;
pub mod powerlaw;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
