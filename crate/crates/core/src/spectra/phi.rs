//! Guard coefficients and the linear forms `φ_{λ,t}` with
//! `f(A^k x) = Σ_λ λ^k Σ_t φ_{λ,t}(x) k^t`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::SpectralData;
use crate::arith::poly::{binomial, binomial_poly};
use crate::arith::{QMatrix, Rational};

/// `a = f·P`.
pub fn f_coefficients(f: &[Rational], p: &QMatrix) -> Vec<Rational> {
    p.vec_mul(f)
}

/// All `φ` forms of a spectral decomposition, grouped by absolute value.
#[derive(Clone, Debug)]
pub struct PhiForms {
    dim: usize,
    phi: BTreeMap<(Rational, usize), Vec<Rational>>,
    /// Distinct absolute values `|λ|`, descending.
    pub levels: Vec<Rational>,
    degrees: BTreeMap<Rational, usize>,
}

impl PhiForms {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `φ_{λ,t}`; zero when `λ` is absent or `t ≥ d_λ`.
    pub fn phi(&self, lambda: &Rational, t: usize) -> Vec<Rational> {
        self.phi
            .get(&(lambda.clone(), t))
            .cloned()
            .unwrap_or_else(|| vec![Rational::zero(); self.dim])
    }

    /// `d_λ` (zero when absent).
    pub fn d(&self, lambda: &Rational) -> usize {
        self.degrees.get(lambda).copied().unwrap_or(0)
    }

    /// `e_ℓ = max(d_ℓ, d_{−ℓ})`.
    pub fn e(&self, level: &Rational) -> usize {
        self.d(level).max(self.d(&-level.clone()))
    }

    /// `φ⁺_{ℓ,t} = φ_{ℓ,t} + φ_{−ℓ,t}`, governing even iterates.
    pub fn plus(&self, level: &Rational, t: usize) -> Vec<Rational> {
        let (p, n) = (self.phi(level, t), self.phi(&-level.clone(), t));
        p.iter().zip(&n).map(|(a, b)| a + b).collect()
    }

    /// `φ⁻_{ℓ,t} = φ_{ℓ,t} − φ_{−ℓ,t}`, governing odd iterates.
    pub fn minus(&self, level: &Rational, t: usize) -> Vec<Rational> {
        let (p, n) = (self.phi(level, t), self.phi(&-level.clone(), t));
        p.iter().zip(&n).map(|(a, b)| a - b).collect()
    }

    pub fn has_positive(&self, level: &Rational) -> bool {
        self.d(level) > 0
    }
}

/// Expands `P_λ(x,k) = Σ_j x_j Σ_{i≤j} a_i C(k, j−i)` (per block) into powers of `k`.
pub fn phi_forms(spec: &SpectralData) -> PhiForms {
    let dim = spec.dim();
    let mut phi: BTreeMap<(Rational, usize), Vec<Rational>> = BTreeMap::new();
    let mut degrees = BTreeMap::new();
    for (l, d) in &spec.eigenvalues {
        degrees.insert(l.clone(), *d);
    }
    for b in &spec.blocks {
        let a = &spec.f_coeffs[b.start..b.start + b.size];
        for j in 1..=b.size {
            for i in 1..=j {
                if a[i - 1].is_zero() {
                    continue;
                }
                let poly = binomial_poly(j - i);
                for (t, c) in poly.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let row = phi
                        .entry((b.lambda.clone(), t))
                        .or_insert_with(|| vec![Rational::zero(); dim]);
                    row[b.start + j - 1] += &a[i - 1] * c;
                }
            }
        }
    }
    let mut levels: Vec<Rational> = spec.eigenvalues.iter().map(|(l, _)| l.abs()).collect();
    levels.sort();
    levels.dedup();
    levels.reverse();
    PhiForms { dim, phi, levels, degrees }
}

/// `Mat_B(f∘A^k)` from the closed form: in a block of `λ` the `j`-th entry is
/// `λ^k (a_1 C(k, j−1) + a_2 C(k, j−2) + … + a_j)`.
pub fn guard_power_row(spec: &SpectralData, k: u32) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); spec.dim()];
    for b in &spec.blocks {
        let a = &spec.f_coeffs[b.start..b.start + b.size];
        let lk = b.lambda.pow(k as i32);
        for j in 1..=b.size {
            let mut p = Rational::zero();
            for i in 1..=j {
                p += &a[i - 1] * binomial(k as i64, j - i);
            }
            out[b.start + j - 1] = &lk * p;
        }
    }
    out
}
