//! Exact analysis of linear and affine `while` loops.
//!
//! Given `while (F x > b) { x := A x + c }`, computes the set of asymptotically
//! non-terminating inputs as a finite union of cells of rational linear
//! equalities and strict inequalities, decides termination over the reals,
//! rationals and integers, and reports the complement as inputs on which the
//! loop is guaranteed to stop.
//!
//! - [`arith`]: exact rationals, matrices, polynomials, Hermite normal form.
//! - [`spectra`]: real-spectrum restriction, Jordan bases, degenerate reduction.
//! - [`semilinear`]: sets of cells, elimination, complement, integer search.
//! - [`loopfront`]: loop syntax, JSON form, homogenization.
//! - [`ant`]: the analysis pipeline and its point oracles.
//! - [`simulate`]: exact execution.
//! - [`corpus`]: seeded random programs and the curated worked examples.
//! - [`check`]: the property suite run over a corpus.

pub mod ant;
pub mod arith;
pub mod check;
pub mod corpus;
pub mod error;
pub mod loopfront;
pub mod semilinear;
pub mod simulate;
pub mod spectra;

pub use error::{Error, Result};
