//! Desk-scale laboratory for multi-prover rational interactive proofs.
//!
//! The crate executes the protocols exactly, computes expected payments as
//! exact rationals, enumerates structured families of prover strategies and
//! checks that payment-maximizing provers report the correct membership bit.

pub mod analysis;
pub mod circuits;
pub mod cli;
pub mod engine;
pub mod error;
pub mod gen;
mod jsonpos;
pub mod oracle3sat;
pub mod protocols;
pub mod scalar;
pub mod scoring;

pub use error::{MripError, Result};
pub use scalar::Scalar;

/// Exact arbitrary-precision rational used on every payment path.
pub type Rational = num_rational::BigRational;
/// Exact rational with machine-word parts.
pub type Rational64 = num_rational::Ratio<i64>;
pub type Real = f64;
pub type Real32 = f32;
