//! Closed-form ANT cells when no eigenvalue has its opposite in the spectrum.
//!
//! Then `f(A^k x)` has one dominant term `λ^k k^t c` and the sign of `c`
//! decides. The cell `S_{λ,k}` says that every coordinate of larger absolute
//! value vanishes, so do the `λ`-coordinates after `k`, and the `(λ,k)`
//! coordinate is positive once multiplied by the leading guard coefficient of
//! its block.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::rational::fmt_rational;
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::semilinear::{Atom, Cell, Normalized, SemiLinearSet};
use crate::spectra::SpectralData;

/// True iff no `λ` in the spectrum has `−λ` in the spectrum too.
pub fn is_normal_spectrum(eigenvalues: &[Rational]) -> bool {
    eigenvalues.iter().all(|l| l.is_zero() || !eigenvalues.contains(&-l.clone()))
}

/// `is_normal_spectrum` of the rational spectrum of `a`.
pub fn is_normal(a: &crate::arith::QMatrix) -> Result<bool> {
    let eig = crate::spectra::jordan::rational_spectrum(a)?;
    let ls: Vec<Rational> = eig.into_iter().map(|(l, _)| l).collect();
    Ok(is_normal_spectrum(&ls))
}

/// One `S_{λ,k}` cell with its label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalCell {
    #[serde(with = "crate::arith::rational::serde_q")]
    pub lambda: Rational,
    /// 1-based index through all coordinates of `λ`.
    pub k: usize,
    #[serde(skip)]
    pub cell: Cell,
}

impl NormalCell {
    pub fn label(&self) -> String {
        format!("S_{{{},{}}}", fmt_rational(&self.lambda), self.k)
    }
}

/// `a·x_i` as a linear form: the guard coefficient at the start of the block
/// holding coordinate `i` times that coordinate.
fn lead_form(spec: &SpectralData, i: usize) -> Vec<Rational> {
    let block = spec.block_of(i);
    let mut v = vec![Rational::zero(); spec.dim()];
    v[i] = spec.f_coeffs[block.start].clone();
    v
}

/// All cells `S_{λ,k}` for `λ > 0`, dropping those whose positivity atom is
/// unsatisfiable.
///
/// With several Jordan blocks for one eigenvalue these cells treat each
/// coordinate as its own term, while `f(A^k x)` only sees their weighted sum;
/// the union then neither contains nor is contained in the ANT set. Use
/// [`ant_normal`] for the checked version.
pub fn normal_cells(spec: &SpectralData) -> Result<Vec<NormalCell>> {
    let ls: Vec<Rational> = spec.eigenvalues.iter().map(|(l, _)| l.clone()).collect();
    if !is_normal_spectrum(&ls) {
        return Err(Error::Precondition("spectrum contains an eigenvalue and its opposite".into()));
    }
    let n = spec.dim();
    let mut out = Vec::new();
    let mut order = ls.clone();
    order.sort_by_key(|a| std::cmp::Reverse(a.abs()));
    for lambda in order.iter().filter(|l| l.is_positive()) {
        let coords = spec.coords_of(lambda);
        let dominating: Vec<usize> = spec
            .eigenvalues
            .iter()
            .filter(|(m, _)| m.abs() > *lambda)
            .flat_map(|(m, _)| spec.coords_of(m))
            .collect();
        for (pos, &idx) in coords.iter().enumerate() {
            let mut items: Vec<Normalized> = Vec::new();
            for &j in &dominating {
                items.push(Atom::eq(lead_form(spec, j), Rational::zero()));
            }
            for &j in &coords[pos + 1..] {
                items.push(Atom::eq(lead_form(spec, j), Rational::zero()));
            }
            items.push(Atom::gt(lead_form(spec, idx), Rational::zero()));
            if let Some(cell) = Cell::from_normalized(items) {
                out.push(NormalCell { lambda: lambda.clone(), k: pos + 1, cell });
            }
        }
    }
    debug_assert!(out.iter().all(|c| c.cell.atoms().iter().all(|a| a.dim() == n)));
    Ok(out)
}

/// The union of the `S_{λ,k}` cells, in Jordan coordinates.
///
/// Requires one Jordan block per eigenvalue, which always holds after
/// degenerate reduction.
pub fn ant_normal(spec: &SpectralData) -> Result<SemiLinearSet> {
    if !spec.is_single_block() {
        return Err(Error::Precondition("several Jordan blocks for one eigenvalue; reduce first".into()));
    }
    let cells = normal_cells(spec)?.into_iter().map(|c| c.cell).collect();
    Ok(SemiLinearSet::from_cells(spec.dim(), cells)?.with_names(spec.coordinate_names()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::arith::QMatrix;
    use crate::spectra::spectral_data;

    #[test]
    fn normality() {
        assert!(is_normal_spectrum(&[int(9), int(5), int(2), int(6)]));
        assert!(!is_normal_spectrum(&[int(1), int(-1), int(2), int(-2)]));
        assert!(is_normal_spectrum(&[int(-3)]));
        assert!(!is_normal(&QMatrix::diag(&[int(2), int(-2)])).unwrap());
    }

    #[test]
    fn single_eigenvalue() {
        let sd = spectral_data(&QMatrix::diag(&[int(2)]), &[int(1)]).unwrap();
        let s = ant_normal(&sd).unwrap();
        assert_eq!(s.cells().len(), 1);
        assert!(s.member(&[int(1)]));
        assert!(!s.member(&[int(0)]));
        assert!(!s.member(&[int(-1)]));
    }

    #[test]
    fn negative_dominant_eigenvalue_must_vanish() {
        // f(A^k x) = (−3)^k x1 + 2^k x2.
        let sd = spectral_data(&QMatrix::diag(&[int(-3), int(2)]), &[int(1), int(1)]).unwrap();
        let s = ant_normal(&sd).unwrap();
        let i3 = sd.coord_index(&int(-3), 1).unwrap();
        let mut x = vec![int(0); 2];
        x[1 - i3] = int(1);
        assert!(s.member(&x));
        x[i3] = int(1);
        assert!(!s.member(&x));
    }

    #[test]
    fn repeated_blocks_are_rejected() {
        let sd = spectral_data(&QMatrix::diag(&[int(2), int(2)]), &[int(1), int(1)]).unwrap();
        assert!(ant_normal(&sd).is_err());
        // x1 = -10, x2 = 1 lies in S_{2,2} although f(A^k x) = -9·2^k.
        let cells = normal_cells(&sd).unwrap();
        let x = [int(-10), int(1)];
        assert!(cells.iter().any(|c| c.cell.contains(&x)));
    }

    #[test]
    fn jordan_block_uses_leading_coefficient() {
        // Block for 2 with f-coefficients (−1, 5): the top coordinate dominates
        // with coefficient −1.
        let j = QMatrix::from_i64(&[[2, 2], [0, 2]]);
        let sd = spectral_data(&j, &[int(-1), int(5)]).unwrap();
        let s = ant_normal(&sd).unwrap();
        let x = sd.p_inv.mul_vec(&[int(0), int(1)]);
        let a_top = sd.f_coeffs[0].clone();
        assert_eq!(s.member(&x), (a_top * &x[1]).is_positive());
    }
}
