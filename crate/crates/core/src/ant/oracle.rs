//! Pointwise ANT test, independent of the cell formulas.
//!
//! For each eigenvalue `λ` the contribution `h_λ(k) = f_λ·J_λ^k·x_λ` is
//! computed by exact matrix powers for a few `k`; `λ^{−k} h_λ(k)` is a
//! polynomial `P_λ` recovered by finite differences. Even iterates are
//! governed by `P_ℓ + P_{−ℓ}` and odd ones by `P_ℓ − P_{−ℓ}`; the point is
//! ANT iff both have a positive dominant term.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::arith::matrix::dot;
use crate::arith::poly::binomial_poly;
use crate::arith::{QMatrix, QPoly, Rational};
use crate::error::{Error, Result};
use crate::spectra::jordan::rational_spectrum;
use crate::spectra::SpectralData;

/// `P_λ` for every eigenvalue of `spec`, evaluated at Jordan coordinates `x`.
pub fn growth_polynomials(spec: &SpectralData, x: &[Rational]) -> BTreeMap<Rational, QPoly> {
    let mut out = BTreeMap::new();
    for (lambda, _) in &spec.eigenvalues {
        let blocks: Vec<_> = spec.blocks.iter().filter(|b| &b.lambda == lambda).collect();
        let depth = blocks.iter().map(|b| b.size).max().unwrap_or(0);
        let mut values = vec![Rational::zero(); depth];
        for b in &blocks {
            let idx: Vec<usize> = (b.start..b.start + b.size).collect();
            let j = spec.jordan.select_rows(&idx).select_cols(&idx);
            let f = &spec.f_coeffs[b.start..b.start + b.size];
            let mut y: Vec<Rational> = x[b.start..b.start + b.size].to_vec();
            let mut scale = Rational::from_integer(1.into());
            for v in values.iter_mut() {
                *v += dot(f, &y) / &scale;
                y = j.mul_vec(&y);
                scale *= lambda;
            }
        }
        // Newton form: P(k) = Σ_j Δ^j P(0) · C(k, j).
        let mut poly = QPoly::zero();
        let mut diffs = values;
        for j in 0..depth {
            poly = poly.add(&binomial_poly(j).scale(&diffs[0]));
            diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        out.insert(lambda.clone(), poly);
    }
    out
}

/// Sign of the dominant term of `Σ_ℓ ℓ^k Q_ℓ(k)`, scanning levels downwards.
fn dominant_positive(levels: &[Rational], q: impl Fn(&Rational) -> QPoly) -> bool {
    for l in levels {
        let p = q(l);
        if p.degree().is_some() {
            return p.leading().is_positive();
        }
    }
    false
}

/// True iff `f(A^k x) > 0` for all large `k`, `x` in Jordan coordinates.
///
/// Requires a real spectrum without zero; any block structure is accepted.
pub fn point_ant(spec: &SpectralData, x: &[Rational]) -> bool {
    dominance(&growth_polynomials(spec, x))
}

fn dominance(polys: &BTreeMap<Rational, QPoly>) -> bool {
    let get = |l: &Rational| polys.get(l).cloned().unwrap_or_else(QPoly::zero);
    let mut levels: Vec<Rational> = polys.keys().map(|l| l.abs()).collect();
    levels.sort();
    levels.dedup();
    levels.reverse();
    let even = dominant_positive(&levels, |l| get(l).add(&get(&-l.clone())));
    let odd = dominant_positive(&levels, |l| get(l).sub(&get(&-l.clone())));
    even && odd
}

/// The same test without any Jordan basis: the exact values
/// `s_k = f·A^k·x` for `n ≤ k < n + N` are fitted to `Σ_λ λ^k P_λ(k)`, with
/// `N` the number of nonzero eigenvalues counted with multiplicity (the
/// nilpotent part has died out by step `n`).
///
/// Requires an entirely rational spectrum of `a`.
pub fn sequence_ant(a: &QMatrix, f: &[Rational], x: &[Rational]) -> Result<bool> {
    sequence_ant_with(a, &rational_spectrum(a)?, f, x)
}

/// [`sequence_ant`] with the spectrum of `a` supplied by the caller.
pub fn sequence_ant_with(a: &QMatrix, spectrum: &[(Rational, usize)], f: &[Rational], x: &[Rational]) -> Result<bool> {
    let n = a.rows();
    if f.len() != n || x.len() != n {
        return Err(Error::DimensionMismatch("oracle input length".into()));
    }
    let spectrum: Vec<&(Rational, usize)> = spectrum.iter().filter(|(l, _)| !l.is_zero()).collect();
    let unknowns: Vec<(Rational, usize)> =
        spectrum.iter().flat_map(|(l, d)| (0..*d).map(move |j| (l.clone(), j))).collect();
    let big_n = unknowns.len();
    if big_n == 0 {
        return Ok(false);
    }
    let mut v = a.pow(n as u64)?.mul_vec(x);
    let mut rows = Vec::with_capacity(big_n);
    let mut rhs = Vec::with_capacity(big_n);
    for k in n..n + big_n {
        rhs.push(dot(f, &v));
        let kq = Rational::from_integer((k as i64).into());
        rows.push(unknowns.iter().map(|(l, j)| l.pow(k as i32) * kq.pow(*j as i32)).collect());
        v = a.mul_vec(&v);
    }
    let coeffs = QMatrix::from_rows(rows)?
        .solve(&rhs)
        .ok_or_else(|| Error::Precondition("singular interpolation system".into()))?;
    let mut polys: BTreeMap<Rational, QPoly> = BTreeMap::new();
    for ((l, j), c) in unknowns.iter().zip(coeffs) {
        let e = polys.entry(l.clone()).or_insert_with(QPoly::zero);
        let mut mono = vec![Rational::zero(); j + 1];
        mono[*j] = c;
        *e = e.add(&QPoly::new(mono));
    }
    Ok(dominance(&polys))
}
