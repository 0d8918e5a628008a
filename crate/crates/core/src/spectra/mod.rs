//! Spectral decomposition of the update map.
//!
//! Restriction to the real-spectrum subspace, modified Jordan bases (each block
//! equal to `λ·(I + N)` with `N` the unit superdiagonal), removal of the
//! guard-invisible and nilpotent parts, and the linear forms that give the
//! polynomial coefficients of `f(A^k x)`.

pub mod jordan;
pub mod phi;
pub mod reduction;
pub mod restriction;

use serde::Serialize;

use crate::arith::rational::fmt_rational;
use crate::arith::{QMatrix, Rational};

pub use jordan::{jordan_chains, modified_jordan_basis, spectral_data};
pub use phi::{f_coefficients, guard_power_row, phi_forms, PhiForms};
pub use reduction::{degenerate_reduction, k_subspace, Reduction, ReductionTrace};
pub use restriction::{real_spectrum_restriction, RealRestriction};

/// One Jordan block of the basis: coordinates `start .. start + size`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JordanBlock {
    #[serde(with = "crate::arith::rational::serde_q")]
    pub lambda: Rational,
    pub size: usize,
    pub start: usize,
}

/// Modified Jordan basis of a matrix together with the guard coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralData {
    /// Distinct eigenvalues with algebraic multiplicity, in basis order.
    pub eigenvalues: Vec<(Rational, usize)>,
    /// Columns are the basis vectors, block by block.
    pub p: QMatrix,
    pub p_inv: QMatrix,
    /// `P⁻¹·A·P`.
    pub jordan: QMatrix,
    pub blocks: Vec<JordanBlock>,
    /// `f·P`.
    pub f_coeffs: Vec<Rational>,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.p.cols()
    }

    pub fn multiplicity(&self, lambda: &Rational) -> usize {
        self.eigenvalues
            .iter()
            .find(|(l, _)| l == lambda)
            .map_or(0, |(_, d)| *d)
    }

    pub fn has_eigenvalue(&self, lambda: &Rational) -> bool {
        self.multiplicity(lambda) > 0
    }

    pub fn block_sizes(&self, lambda: &Rational) -> Vec<usize> {
        self.blocks.iter().filter(|b| &b.lambda == lambda).map(|b| b.size).collect()
    }

    /// Coordinate indices belonging to `lambda`, in basis order.
    pub fn coords_of(&self, lambda: &Rational) -> Vec<usize> {
        self.blocks
            .iter()
            .filter(|b| &b.lambda == lambda)
            .flat_map(|b| b.start..b.start + b.size)
            .collect()
    }

    /// The block containing coordinate `idx`.
    pub fn block_of(&self, idx: usize) -> &JordanBlock {
        self.blocks
            .iter()
            .find(|b| idx >= b.start && idx < b.start + b.size)
            .expect("coordinate inside some block")
    }

    /// One Jordan block per eigenvalue.
    pub fn is_single_block(&self) -> bool {
        self.eigenvalues.iter().all(|(l, _)| self.block_sizes(l).len() == 1)
    }

    /// `(λ, j)` with `j` counting 1-based through all blocks of `λ`.
    pub fn coordinate_label(&self, idx: usize) -> (Rational, usize) {
        let lambda = self.block_of(idx).lambda.clone();
        let pos = self.coords_of(&lambda).iter().position(|&c| c == idx).unwrap();
        (lambda, pos + 1)
    }

    /// Names like `x_{2,1}` for every coordinate.
    pub fn coordinate_names(&self) -> Vec<String> {
        (0..self.dim())
            .map(|i| {
                let (l, j) = self.coordinate_label(i);
                format!("x_{{{},{j}}}", fmt_rational(&l))
            })
            .collect()
    }

    /// Index of coordinate `(λ, j)`.
    pub fn coord_index(&self, lambda: &Rational, j: usize) -> Option<usize> {
        self.coords_of(lambda).get(j.checked_sub(1)?).copied()
    }

    /// Reads the blocks off a matrix already in modified Jordan form; the
    /// basis is the identity.
    pub fn from_modified_jordan(t: &QMatrix, f: &[Rational]) -> crate::error::Result<Self> {
        use crate::error::Error;
        use num_traits::Zero;
        let n = t.rows();
        if !t.is_square() || f.len() != n {
            return Err(Error::DimensionMismatch("matrix and guard sizes".into()));
        }
        let mut blocks: Vec<JordanBlock> = Vec::new();
        let mut i = 0;
        while i < n {
            let lambda = t.get(i, i).clone();
            if lambda.is_zero() {
                return Err(Error::Precondition("zero eigenvalue".into()));
            }
            let mut size = 1;
            while i + size < n && t.get(i + size - 1, i + size) == &lambda {
                size += 1;
            }
            blocks.push(JordanBlock { lambda, size, start: i });
            i += size;
        }
        if &jordan::expected_jordan_form(&blocks, n) != t {
            return Err(Error::Precondition("matrix is not in modified Jordan form".into()));
        }
        let mut eigenvalues: Vec<(Rational, usize)> = Vec::new();
        for b in &blocks {
            match eigenvalues.iter_mut().find(|(l, _)| l == &b.lambda) {
                Some(e) => e.1 += b.size,
                None => eigenvalues.push((b.lambda.clone(), b.size)),
            }
        }
        Ok(SpectralData {
            eigenvalues,
            p: QMatrix::identity(n),
            p_inv: QMatrix::identity(n),
            jordan: t.clone(),
            blocks,
            f_coeffs: f.to_vec(),
        })
    }

    /// `x_λ = (P⁻¹ u)` restricted to `λ`.
    pub fn jordan_coordinates(&self, u: &[Rational]) -> Vec<Rational> {
        self.p_inv.mul_vec(u)
    }
}
