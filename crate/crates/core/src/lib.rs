//! Exact finite models of four unbounded linear operators and witness engines
//! for their hypermixing behaviour.
//!
//! The crate works on dense classes where every power of the operator is
//! defined: truncated Taylor series in the Hardy space `H²`, polynomials on the
//! unit square in the normalized basis `Xₙ Y_l = xⁿ yˡ / (n! l!)`, and compactly
//! supported piecewise exponential-polynomials on the half line.
//!
//! * [`spaces`] holds the element types, norms and linear arithmetic.
//! * [`operators`] applies `T`, its right inverse `S`, and their powers.
//! * [`kernels`] projects onto `Ker Tⁿ` and tabulates generalized-kernel density.
//! * [`dynamics`] turns the right-inverse/kernel split into explicit witness
//!   certificates (hypermixing, strong transitivity, zero inclusion, transitivity),
//!   plus the leading-coefficient polynomial family and periodic vectors of `D`.
//!
//! Everything is `no_std` with `alloc`; IO and file formats live in the
//! `hypermix` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod kernels;
mod math;
pub mod operators;
pub mod spaces;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use num_rational::Rational64;

/// Default number of powers scanned by the witness engines.
pub const DEFAULT_N_MAX: usize = 64;

/// Default residual tolerance for certificates and decay verdicts.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Absolute coefficient tolerance for "is the zero element".
pub const ZERO_TOLERANCE: f64 = 1e-12;
