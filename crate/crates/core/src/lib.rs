//! Simulation of the exit time and exit position of δ-dimensional Brownian
//! motion from a ball.
//!
//! The walk on moving spheres draws each step from a Bessel hitting time with
//! an explicit law, so exit times come for free. The classical walk on
//! spheres is provided as a baseline, with exit times either omitted, drawn by
//! inverting the spectral distribution function, or picked from a precomputed
//! table. A naive Euler scheme, a one-dimensional hitting-time toolkit and an
//! experiment harness complete the crate.


// NaN must fail range checks, hence `!(x > 0.0)` style guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod bessel_hitting;
pub mod brownian1d;
pub mod error;
pub mod harness;
pub mod samplers;
pub mod specfun;
pub mod walkers;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
