//! Restriction to the subspace on which the update has only real eigenvalues.

use num_traits::Zero;

use crate::arith::poly::{char_poly, split_rational_part};
use crate::arith::{QMatrix, QPoly, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealRestriction {
    /// `A` acting on `E^r`, in the basis given by the columns of `embed`.
    pub a_r: QMatrix,
    /// Rows of `F` restricted to `E^r`.
    pub f_r: QMatrix,
    /// `n x r`, columns a basis of `E^r`.
    pub embed: QMatrix,
    /// `r x n`, coordinates along `E^r` in the splitting `E^r ⊕ E^nr`.
    pub proj_r: QMatrix,
    /// `(n−r) x n`, coordinates along `E^nr`.
    pub proj_nr: QMatrix,
    /// `n x (n−r)`, columns a basis of `E^nr`.
    pub nr_basis: QMatrix,
    pub eigenvalues: Vec<(Rational, usize)>,
    /// Monic product of the factors of the characteristic polynomial without
    /// real roots.
    pub nonreal_factor: QPoly,
}

impl RealRestriction {
    pub fn dim_r(&self) -> usize {
        self.embed.cols()
    }

    pub fn dim_nr(&self) -> usize {
        self.nr_basis.cols()
    }
}

/// Computes `E^r`, the kernel of the rational-root part of `χ_A` evaluated at
/// `A`, and restricts `A` and the rows of `F` to it.
pub fn real_spectrum_restriction(a: &QMatrix, f: &QMatrix) -> Result<RealRestriction> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if f.cols() != a.cols() {
        return Err(Error::DimensionMismatch("guard matrix width".into()));
    }
    let n = a.rows();
    let chi = char_poly(a)?;
    let (roots, rest) = split_rational_part(&chi);
    if rest.count_real_roots() > 0 {
        return Err(Error::IrrationalSpectrum { factor: irrational_factors(&rest) });
    }
    let mut real_part = QPoly::one();
    for (r, m) in &roots {
        real_part = real_part.mul(&QPoly::linear_root(r).pow(*m));
    }
    let (embed, nr_basis) = if rest.degree().unwrap_or(0) == 0 {
        (QMatrix::identity(n), QMatrix::zeros(n, 0))
    } else {
        (real_part.eval_matrix(a).kernel_matrix(), rest.eval_matrix(a).kernel_matrix())
    };
    let r = embed.cols();
    let q = embed.hstack(&nr_basis)?;
    let q_inv = q.inverse()?;
    let proj_r = q_inv.select_rows(&(0..r).collect::<Vec<_>>());
    let proj_nr = q_inv.select_rows(&(r..n).collect::<Vec<_>>());
    let a_r = &(&proj_r * a) * &embed;
    let f_r = if f.rows() == 0 { QMatrix::zeros(0, r) } else { f * &embed };
    debug_assert!((a * &embed) == (&embed * &a_r));
    Ok(RealRestriction {
        a_r,
        f_r,
        embed,
        proj_r,
        proj_nr,
        nr_basis,
        eigenvalues: roots,
        nonreal_factor: rest,
    })
}

/// Square-free factors of `rest` that carry real roots, for the diagnostic.
fn irrational_factors(rest: &QPoly) -> String {
    let parts: Vec<String> = rest
        .square_free_decomposition()
        .into_iter()
        .filter(|(g, _)| g.count_real_roots() > 0)
        .map(|(g, m)| if m > 1 { format!("({g})^{m}") } else { g.to_string() })
        .collect();
    if parts.is_empty() {
        rest.to_string()
    } else {
        parts.join(" * ")
    }
}

/// True when every entry of `v` is zero.
pub fn is_zero_row(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_zero())
}
