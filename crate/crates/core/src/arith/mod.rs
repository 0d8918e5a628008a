//! Exact arithmetic substrate: rationals, matrices, polynomials, lattices.

pub mod hnf;
pub mod matrix;
pub mod poly;
pub mod rational;

pub use hnf::{hermite_normal_form, integer_solutions};
pub use matrix::QMatrix;
pub use poly::{binomial, binomial_poly, char_poly, has_irrational_real_root, rational_roots, QPoly};
pub use rational::Rational;
