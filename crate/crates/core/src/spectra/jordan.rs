//! Jordan chains and modified Jordan bases.

use num_traits::{One, Signed, Zero};

use super::{JordanBlock, SpectralData};
use crate::arith::poly::{char_poly, split_rational_part};
use crate::arith::{QMatrix, Rational};
use crate::error::{Error, Result};

/// Classical Jordan chains `[u_1, …, u_s]` of `λ` with `(A − λ)u_i = u_{i−1}`,
/// longest first. Chain heads are taken from the echelonized kernel bases in
/// order, so the lowest admissible index wins.
pub fn jordan_chains(a: &QMatrix, lambda: &Rational) -> Result<Vec<Vec<Vec<Rational>>>> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let nmat = a - &QMatrix::identity(n).scale(lambda);
    // ker N^j for j = 0, 1, … until the dimension stops growing.
    let mut kernels: Vec<Vec<Vec<Rational>>> = vec![Vec::new()];
    let mut power = QMatrix::identity(n);
    loop {
        power = &power * &nmat;
        let k = power.kernel_vectors();
        if k.len() == kernels.last().unwrap().len() {
            break;
        }
        kernels.push(k);
    }
    let q = kernels.len() - 1;
    let mut heads: Vec<(Vec<Rational>, usize)> = Vec::new();
    for j in (1..=q).rev() {
        let mut span: Vec<Vec<Rational>> = kernels[j - 1].clone();
        for (h, len) in &heads {
            span.push(apply_power(&nmat, h, len - j));
        }
        let mut rank = rank_of(&span, n);
        for v in &kernels[j] {
            span.push(v.clone());
            let r = rank_of(&span, n);
            if r > rank {
                rank = r;
                heads.push((v.clone(), j));
            } else {
                span.pop();
            }
        }
    }
    Ok(heads
        .into_iter()
        .map(|(h, len)| (1..=len).map(|i| apply_power(&nmat, &h, len - i)).collect())
        .collect())
}

fn apply_power(m: &QMatrix, v: &[Rational], k: usize) -> Vec<Rational> {
    let mut out = v.to_vec();
    for _ in 0..k {
        out = m.mul_vec(&out);
    }
    out
}

fn rank_of(vs: &[Vec<Rational>], n: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    QMatrix::from_columns(n, vs).expect("vector lengths").rank()
}

/// Basis of the generalized eigenspace of `λ ≠ 0` in which `A` acts as
/// `λ·(I + N)` on each block; blocks sorted by size ascending. Returns the
/// columns and the block sizes.
pub fn modified_jordan_basis(a: &QMatrix, lambda: &Rational) -> Result<(Vec<Vec<Rational>>, Vec<usize>)> {
    if lambda.is_zero() {
        return Err(Error::Precondition("modified Jordan basis needs a nonzero eigenvalue".into()));
    }
    let mut chains = jordan_chains(a, lambda)?;
    chains.sort_by_key(|c| c.len());
    let mut cols = Vec::new();
    let mut sizes = Vec::new();
    for chain in chains {
        sizes.push(chain.len());
        let mut scale = Rational::one();
        for u in chain {
            cols.push(u.iter().map(|x| x * &scale).collect());
            scale *= lambda;
        }
    }
    Ok((cols, sizes))
}

/// Eigenvalue order used throughout: zero first, then by absolute value,
/// positive before negative.
pub fn eigen_order(a: &Rational, b: &Rational) -> std::cmp::Ordering {
    a.abs().cmp(&b.abs()).then_with(|| b.cmp(a))
}

/// Rational eigenvalues with multiplicity; errors when the spectrum is not
/// entirely rational.
pub fn rational_spectrum(a: &QMatrix) -> Result<Vec<(Rational, usize)>> {
    let chi = char_poly(a)?;
    let (mut roots, rest) = split_rational_part(&chi);
    if rest.degree().unwrap_or(0) > 0 {
        return Err(if rest.count_real_roots() > 0 {
            Error::IrrationalSpectrum { factor: rest.to_string() }
        } else {
            Error::Precondition(format!("non-real eigenvalues remain (factor {rest})"))
        });
    }
    roots.sort_by(|x, y| eigen_order(&x.0, &y.0));
    Ok(roots)
}

/// Modified Jordan basis of a whole matrix with a rational, zero-free
/// spectrum, and the coefficients of `f` in it.
pub fn spectral_data(a: &QMatrix, f: &[Rational]) -> Result<SpectralData> {
    if f.len() != a.cols() {
        return Err(Error::DimensionMismatch("guard row length".into()));
    }
    let eigenvalues = rational_spectrum(a)?;
    if eigenvalues.iter().any(|(l, _)| l.is_zero()) {
        return Err(Error::Precondition("zero eigenvalue; reduce first".into()));
    }
    let mut cols = Vec::new();
    let mut blocks = Vec::new();
    for (l, _) in &eigenvalues {
        let (c, sizes) = modified_jordan_basis(a, l)?;
        let mut start = cols.len();
        for s in sizes {
            blocks.push(JordanBlock { lambda: l.clone(), size: s, start });
            start += s;
        }
        cols.extend(c);
    }
    assemble(a, f, eigenvalues, cols, blocks)
}

pub(crate) fn assemble(
    a: &QMatrix,
    f: &[Rational],
    eigenvalues: Vec<(Rational, usize)>,
    cols: Vec<Vec<Rational>>,
    blocks: Vec<JordanBlock>,
) -> Result<SpectralData> {
    let n = a.rows();
    let p = QMatrix::from_columns(n, &cols)?;
    let p_inv = p.inverse()?;
    let jordan = &(&p_inv * a) * &p;
    let f_coeffs = p.vec_mul(f);
    Ok(SpectralData { eigenvalues, p, p_inv, jordan, blocks, f_coeffs })
}

/// The declared form: `λ` on the diagonal of each block and on its superdiagonal.
pub fn expected_jordan_form(blocks: &[JordanBlock], n: usize) -> QMatrix {
    let mut m = QMatrix::zeros(n, n);
    for b in blocks {
        for i in 0..b.size {
            m.set(b.start + i, b.start + i, b.lambda.clone());
            if i + 1 < b.size {
                m.set(b.start + i, b.start + i + 1, b.lambda.clone());
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    #[test]
    fn diagonalizable_eigenspace_gives_unit_blocks() {
        let a = QMatrix::diag(&[int(3), int(3), int(5)]);
        let (cols, sizes) = modified_jordan_basis(&a, &int(3)).unwrap();
        assert_eq!(sizes, vec![1, 1]);
        assert_eq!(cols.len(), 2);
    }

    #[test]
    fn single_chain_is_scaled_jordan_block() {
        // Conjugate of a 3x3 Jordan block for 2.
        let j = QMatrix::from_i64(&[[2, 1, 0], [0, 2, 1], [0, 0, 2]]);
        let p = QMatrix::from_i64(&[[1, 2, 0], [0, 1, 3], [1, 0, 1]]);
        let a = &(&p * &j) * &p.inverse().unwrap();
        let sd = spectral_data(&a, &[int(1), int(0), int(0)]).unwrap();
        assert_eq!(sd.block_sizes(&int(2)), vec![3]);
        assert_eq!(sd.jordan, expected_jordan_form(&sd.blocks, 3));
        assert!((&sd.p * &sd.p_inv).is_identity());
    }

    #[test]
    fn mixed_blocks_sorted_ascending() {
        let j = QMatrix::from_i64(&[
            [-3, 1, 0, 0],
            [0, -3, 0, 0],
            [0, 0, -3, 0],
            [0, 0, 0, 4],
        ]);
        let p = QMatrix::from_i64(&[[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [1, 0, 0, 2]]);
        let a = &(&p * &j) * &p.inverse().unwrap();
        let sd = spectral_data(&a, &[int(1), int(2), int(3), int(4)]).unwrap();
        assert_eq!(sd.block_sizes(&int(-3)), vec![1, 2]);
        assert_eq!(sd.eigenvalues, vec![(int(-3), 3), (int(4), 1)]);
        assert_eq!(sd.jordan, expected_jordan_form(&sd.blocks, 4));
        assert_eq!(sd.f_coeffs, sd.p.vec_mul(&[int(1), int(2), int(3), int(4)]));
    }

    #[test]
    fn zero_eigenvalue_rejected() {
        assert!(modified_jordan_basis(&QMatrix::zeros(2, 2), &int(0)).is_err());
    }

    #[test]
    fn irrational_spectrum_is_named() {
        let a = QMatrix::from_i64(&[[0, 2], [1, 0]]);
        match rational_spectrum(&a) {
            Err(Error::IrrationalSpectrum { factor }) => assert_eq!(factor, "T^2 - 2"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
