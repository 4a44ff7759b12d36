//! Numerical verification lab for the covariant two-particle harmonic
//! oscillator of quantum constraint mechanics.
//!
//! The crate builds exact boosted eigenstates, applies covariant ladder and
//! constraint operators to them through an analytic engine and a
//! finite-difference engine, and checks the resulting identities against
//! pinned tolerances.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod hermite;
pub mod kinematics;
pub mod operators;
pub mod oscillator;
pub mod scan;
pub mod verifier;

pub use error::{Error, Result};
