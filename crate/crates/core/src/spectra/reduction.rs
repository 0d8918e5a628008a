//! Removal of the guard-invisible subspace `K(A,f)` and of the nilpotent part,
//! leaving a regular pair with one Jordan block per nonzero eigenvalue.

use num_traits::{One, Zero};
use serde::Serialize;

use super::jordan::{assemble, eigen_order, jordan_chains};
use super::{JordanBlock, SpectralData};
use crate::arith::poly::{char_poly, rational_roots};
use crate::arith::{QMatrix, Rational};
use crate::error::{Error, Result};

/// Basis of `K(A,f) = ⋂_k ker(f·A^k)`, `0 ≤ k < n`.
pub fn k_subspace(a: &QMatrix, f: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if f.len() != n {
        return Err(Error::DimensionMismatch("guard row length".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut rows = Vec::with_capacity(n);
    let mut cur = f.to_vec();
    for _ in 0..n {
        rows.push(cur.clone());
        cur = a.vec_mul(&cur);
    }
    Ok(QMatrix::from_rows(rows)?.kernel_vectors())
}

/// Bookkeeping of one reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    /// Columns: basis of `K`, then the nilpotent chain, then the regular blocks.
    #[serde(serialize_with = "ser_matrix")]
    pub r: QMatrix,
    #[serde(skip)]
    pub r_inv: QMatrix,
    pub dim_k: usize,
    pub dim_e0: usize,
    /// Dimension of the discarded non-real part (filled in by the caller).
    pub dim_enr: usize,
    pub n_a: usize,
}

fn ser_matrix<S: serde::Serializer>(m: &QMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    crate::arith::rational::serde_q::mat::serialize(&m.to_rows(), s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub t_a: QMatrix,
    pub w_a: Vec<Rational>,
    /// `w = f·R` over all coordinates.
    pub w: Vec<Rational>,
    pub trace: ReductionTrace,
    /// The regular pair in its own coordinates (basis = identity).
    pub spectral: SpectralData,
}

impl Reduction {
    /// `n_a x n`: maps a point to its coordinates in the regular part.
    pub fn regular_projection(&self) -> QMatrix {
        let n = self.trace.r_inv.rows();
        let idx: Vec<usize> = (n - self.trace.n_a..n).collect();
        self.trace.r_inv.select_rows(&idx)
    }
}

/// Reduces `(A, f)` (rational spectrum) to a regular pair `(T_a, w_a)`.
///
/// The invisible subspace is completed by unit vectors to a basis, the
/// quotient map is put in modified Jordan form with the nilpotent chain first
/// and the other eigenvalues ordered by absolute value (positive first), and
/// each chain is rescaled inside its centralizer so that every guard
/// coefficient equals one.
pub fn degenerate_reduction(a: &QMatrix, f: &[Rational]) -> Result<Reduction> {
    let n = a.rows();
    let k = k_subspace(a, f)?;
    let dim_k = k.len();
    let mut basis = k.clone();
    let mut rank = dim_k;
    for j in 0..n {
        if rank == n {
            break;
        }
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        basis.push(e);
        let r = QMatrix::from_columns(n, &basis)?.rank();
        if r > rank {
            rank = r;
        } else {
            basis.pop();
        }
    }
    let p = QMatrix::from_columns(n, &basis)?;
    let p_inv = p.inverse()?;
    let conj = &(&p_inv * a) * &p;
    let m = n - dim_k;
    let tail: Vec<usize> = (dim_k..n).collect();
    let a1 = conj.select_rows(&tail).select_cols(&tail);
    let f1: Vec<Rational> = p.vec_mul(f)[dim_k..].to_vec();

    let chi = char_poly(&a1)?;
    let mut eig = rational_roots(&chi);
    let total: usize = eig.iter().map(|(_, d)| d).sum();
    if total != m {
        return Err(Error::Precondition("spectrum is not rational; restrict to E^r first".into()));
    }
    eig.sort_by(|x, y| eigen_order(&x.0, &y.0));

    let mut cols: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut blocks = Vec::new();
    for (l, _) in &eig {
        let chains = jordan_chains(&a1, l)?;
        if chains.len() != 1 {
            return Err(Error::MultipleBlocks { lambda: l.to_string(), blocks: chains.len() });
        }
        let chain = &chains[0];
        // Modified scaling for nonzero eigenvalues.
        let mut scaled = Vec::with_capacity(chain.len());
        let mut s = Rational::one();
        for u in chain {
            scaled.push(u.iter().map(|x| x * &s).collect::<Vec<_>>());
            if !l.is_zero() {
                s *= l;
            }
        }
        let normalized = normalize_chain(&scaled, &f1)?;
        blocks.push(JordanBlock { lambda: l.clone(), size: chain.len(), start: cols.len() });
        cols.extend(normalized);
    }
    let dim_e0 = blocks.iter().filter(|b| b.lambda.is_zero()).map(|b| b.size).sum();
    let p1 = QMatrix::from_columns(m, &cols)?;
    // R = P · diag(I, P1).
    let mut d = QMatrix::identity(n);
    for i in 0..m {
        for j in 0..m {
            d.set(dim_k + i, dim_k + j, p1.get(i, j).clone());
        }
    }
    let r = &p * &d;
    let r_inv = r.inverse()?;
    let b = &(&r_inv * a) * &r;
    let w = r.vec_mul(f);
    let n_a = m - dim_e0;
    let reg: Vec<usize> = (n - n_a..n).collect();
    let t_a = b.select_rows(&reg).select_cols(&reg);
    let w_a = w[n - n_a..].to_vec();

    let reg_blocks: Vec<JordanBlock> = blocks
        .into_iter()
        .filter(|b| !b.lambda.is_zero())
        .map(|b| JordanBlock { start: b.start - dim_e0, ..b })
        .collect();
    let reg_eig: Vec<(Rational, usize)> = eig.into_iter().filter(|(l, _)| !l.is_zero()).collect();
    let spectral = assemble(&t_a, &w_a, reg_eig, identity_columns(n_a), reg_blocks)?;

    // Re-verify regularity directly.
    if !k_subspace(&t_a, &w_a)?.is_empty() {
        return Err(Error::Precondition("reduced pair still has an invisible subspace".into()));
    }
    if n_a > 0 && t_a.det()?.is_zero() {
        return Err(Error::Precondition("reduced map still has a zero eigenvalue".into()));
    }
    let trace = ReductionTrace { r, r_inv, dim_k, dim_e0, dim_enr: 0, n_a };
    Ok(Reduction { t_a, w_a, w, trace, spectral })
}

fn identity_columns(n: usize) -> Vec<Vec<Rational>> {
    QMatrix::identity(n).columns()
}

/// Replaces the chain `(e_1..e_s)` by `(e·C)` with `C` upper-triangular
/// Toeplitz (so the block is unchanged) such that `f` takes the value one on
/// each new vector.
fn normalize_chain(chain: &[Vec<Rational>], f: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    let s = chain.len();
    let a: Vec<Rational> = chain.iter().map(|e| crate::arith::matrix::dot(f, e)).collect();
    if a[0].is_zero() {
        return Err(Error::Precondition("eigenvector invisible to the guard".into()));
    }
    // (a·C)_j = Σ_{i ≤ j} a_i c_{j−i} = 1.
    let mut c = vec![Rational::zero(); s];
    for j in 0..s {
        let mut acc = Rational::one();
        for i in 1..=j {
            acc -= &a[i] * &c[j - i];
        }
        c[j] = acc / &a[0];
    }
    let n = chain[0].len();
    Ok((0..s)
        .map(|j| {
            let mut v = vec![Rational::zero(); n];
            for i in 0..=j {
                let coef = &c[j - i];
                if coef.is_zero() {
                    continue;
                }
                for (t, x) in v.iter_mut().zip(&chain[i]) {
                    *t += coef * x;
                }
            }
            v
        })
        .collect())
}
