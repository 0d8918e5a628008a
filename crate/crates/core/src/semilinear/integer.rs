//! Integer feasibility of semi-linear sets.
//!
//! Equalities are solved over ℤ with the Hermite normal form; the remaining
//! strict inequalities are tightened to `h·t ≥ r` over the solution lattice
//! and decided by depth-first branch-and-bound on the real relaxation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::fm::{feasible_point, Ineq, System};
use super::{Cell, Rel, SemiLinearSet};
use crate::arith::hnf::integer_solutions;
use crate::arith::matrix::dot;
use crate::arith::rational::{ceil, floor, from_bigint, lcm_of_denominators, Rational};
use crate::arith::QMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntFeasibility {
    Empty,
    NonEmpty(Vec<Rational>),
    /// The node budget ran out before a decision.
    Unknown,
}

impl IntFeasibility {
    pub fn is_empty(&self) -> bool {
        matches!(self, IntFeasibility::Empty)
    }
}

pub fn set_integer_feasibility(set: &SemiLinearSet, budget: usize) -> IntFeasibility {
    let mut unknown = false;
    for c in set.cells() {
        match cell_integer_feasibility(c, set.dim(), budget) {
            IntFeasibility::NonEmpty(w) => return IntFeasibility::NonEmpty(w),
            IntFeasibility::Unknown => unknown = true,
            IntFeasibility::Empty => {}
        }
    }
    if unknown {
        IntFeasibility::Unknown
    } else {
        IntFeasibility::Empty
    }
}

pub fn cell_integer_feasibility(cell: &Cell, n: usize, budget: usize) -> IntFeasibility {
    let Some(real) = cell.witness(n) else {
        return IntFeasibility::Empty;
    };
    // Homogeneous cells are cones: clearing denominators keeps membership.
    if cell.is_homogeneous() {
        let l = from_bigint(lcm_of_denominators(real.iter()));
        let x: Vec<Rational> = real.iter().map(|v| v * &l).collect();
        debug_assert!(cell.contains(&x));
        return IntFeasibility::NonEmpty(x);
    }
    let eqs: Vec<_> = cell.atoms().iter().filter(|a| a.rel == Rel::EqZero).collect();
    let (x0, lattice) = if eqs.is_empty() {
        (vec![Rational::zero(); n], QMatrix::identity(n))
    } else {
        let c = QMatrix::from_rows(eqs.iter().map(|a| a.coeffs.clone()).collect()).expect("rows");
        let d: Vec<Rational> = eqs.iter().map(|a| -a.offset.clone()).collect();
        match integer_solutions(&c, &d).expect("normalized atoms are integral") {
            Some(sol) => sol,
            None => return IntFeasibility::Empty,
        }
    };
    let p = lattice.cols();
    let mut base = Vec::new();
    for a in cell.atoms().iter().filter(|a| a.rel == Rel::GtZero) {
        let h = lattice.vec_mul(&a.coeffs);
        let h0 = dot(&a.coeffs, &x0) + &a.offset;
        match tighten(&h, &h0) {
            Tightened::Always => {}
            Tightened::Never => return IntFeasibility::Empty,
            Tightened::Row(q) => base.push(q),
        }
    }
    let to_x = |t: &[Rational]| -> Vec<Rational> {
        let lt = lattice.mul_vec(t);
        x0.iter().zip(&lt).map(|(a, b)| a + b).collect()
    };
    if p == 0 {
        return if cell.contains(&x0) { IntFeasibility::NonEmpty(x0) } else { IntFeasibility::Empty };
    }
    let mut stack: Vec<Vec<Ineq>> = vec![Vec::new()];
    let mut nodes = 0usize;
    while let Some(extra) = stack.pop() {
        nodes += 1;
        if nodes > budget {
            return IntFeasibility::Unknown;
        }
        let sys = System { n: p, eqs: Vec::new(), ineqs: base.iter().chain(&extra).cloned().collect() };
        let Some(t) = feasible_point(&sys) else { continue };
        match t.iter().position(|v| !v.is_integer()) {
            None => {
                let x = to_x(&t);
                debug_assert!(cell.contains(&x));
                return IntFeasibility::NonEmpty(x);
            }
            Some(i) => {
                let mut unit = vec![Rational::zero(); p];
                unit[i] = Rational::one();
                let neg: Vec<Rational> = unit.iter().map(|v| -v).collect();
                let up = Ineq { c: unit, d: -from_bigint(ceil(&t[i])), strict: false };
                let down = Ineq { c: neg, d: from_bigint(floor(&t[i])), strict: false };
                let mut a = extra.clone();
                a.push(up);
                let mut b = extra;
                b.push(down);
                stack.push(a);
                stack.push(b);
            }
        }
    }
    IntFeasibility::Empty
}

enum Tightened {
    Always,
    Never,
    Row(Ineq),
}

/// `h·t + h0 > 0` over integer `t` with integer data becomes
/// `(h/g)·t ≥ ⌈(1 − h0)/g⌉`, `g = gcd(h)`.
fn tighten(h: &[Rational], h0: &Rational) -> Tightened {
    let g = h.iter().fold(BigInt::zero(), |acc, v| acc.gcd(&v.to_integer()));
    if g.is_zero() {
        return if h0 > &Rational::zero() { Tightened::Always } else { Tightened::Never };
    }
    let gq = from_bigint(g);
    let rhs = from_bigint(ceil(&((Rational::one() - h0) / &gq)));
    Tightened::Row(Ineq { c: h.iter().map(|v| v / &gq).collect(), d: -rhs, strict: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::semilinear::{Atom, Normalized};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn one_cell(dim: usize, items: Vec<Normalized>) -> SemiLinearSet {
        SemiLinearSet::from_atoms(dim, items).unwrap()
    }

    #[test]
    fn half_integer_equality_is_empty() {
        let s = one_cell(1, vec![Atom::eq(v(&[2]), int(-1))]);
        assert_eq!(s.is_empty_integer(100), IntFeasibility::Empty);
        assert!(!s.is_empty_rational());
    }

    #[test]
    fn open_unit_interval_has_no_integer() {
        let s = one_cell(1, vec![Atom::gt(v(&[1]), int(0)), Atom::gt(v(&[-1]), int(1))]);
        assert_eq!(s.is_empty_integer(100), IntFeasibility::Empty);
        assert!(!s.is_empty_rational());
    }

    #[test]
    fn homogeneous_witness_is_scaled() {
        let s = one_cell(2, vec![Atom::gt(v(&[3, -1]), int(0)), Atom::gt(v(&[-2, 1]), int(0))]);
        match s.is_empty_integer(100) {
            IntFeasibility::NonEmpty(x) => {
                assert!(x.iter().all(|c| c.is_integer()));
                assert!(s.member(&x));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn thin_strip_needs_branching() {
        // 3 < 2x + 4y < 5 and 0 < x < 2 force x = 1, 4y = 2.
        let s = one_cell(
            2,
            vec![
                Atom::gt(v(&[2, 4]), int(-3)),
                Atom::gt(v(&[-2, -4]), int(5)),
                Atom::gt(v(&[1, 0]), int(0)),
                Atom::gt(v(&[-1, 0]), int(2)),
            ],
        );
        assert!(!s.is_empty_real());
        assert_eq!(s.is_empty_integer(1000), IntFeasibility::Empty);
    }

    #[test]
    fn affine_cell_with_integer_point() {
        // 1 < x + y < 4, x − y > 1/2.
        let s = one_cell(
            2,
            vec![
                Atom::gt(v(&[1, 1]), int(-1)),
                Atom::gt(v(&[-1, -1]), int(4)),
                Atom::gt(vec![int(2), int(-2)], int(-1)),
            ],
        );
        match s.is_empty_integer(1000) {
            IntFeasibility::NonEmpty(x) => {
                assert!(x.iter().all(|c| c.is_integer()));
                assert!(s.member(&x));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lattice_equality_with_slack() {
        // x + 2y = 3 and x > 1 and y > 0: x = 3 − 2y, 3 − 2y > 1 ⇒ y < 1, y > 0: empty.
        let s = one_cell(
            2,
            vec![Atom::eq(v(&[1, 2]), int(-3)), Atom::gt(v(&[1, 0]), int(-1)), Atom::gt(v(&[0, 1]), int(0))],
        );
        assert_eq!(s.is_empty_integer(100), IntFeasibility::Empty);
        assert!(!s.is_empty_real());
    }
}
