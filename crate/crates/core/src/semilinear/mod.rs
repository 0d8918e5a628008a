//! Semi-linear sets: finite unions of cells, each a conjunction of rational
//! affine equalities `ℓ(x) = 0` and strict inequalities `ℓ(x) > 0`.

pub mod fm;
pub mod format;
pub mod integer;

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::matrix::dot;
use crate::arith::rational::primitive_positive_scale;
use crate::arith::{QMatrix, Rational};
use crate::error::{Error, Result};
use fm::{feasible_point, Ineq, System};

pub use integer::IntFeasibility;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rel {
    #[serde(rename = "eq")]
    EqZero,
    #[serde(rename = "gt")]
    GtZero,
}

/// `coeffs·x + offset REL 0`, scaled to coprime integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub coeffs: Vec<Rational>,
    pub offset: Rational,
    pub rel: Rel,
}

/// Result of normalizing a constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    True,
    False,
    Atom(Atom),
}

impl Atom {
    /// Normalizes; constant constraints collapse to truth values.
    pub fn make(coeffs: Vec<Rational>, offset: Rational, rel: Rel) -> Normalized {
        if coeffs.iter().all(|c| c.is_zero()) {
            let holds = match rel {
                Rel::EqZero => offset.is_zero(),
                Rel::GtZero => offset.is_positive(),
            };
            return if holds { Normalized::True } else { Normalized::False };
        }
        let mut all = coeffs;
        all.push(offset);
        let mut scaled = primitive_positive_scale(&all);
        if rel == Rel::EqZero && scaled.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            for c in scaled.iter_mut() {
                *c = -c.clone();
            }
        }
        let offset = scaled.pop().unwrap();
        Normalized::Atom(Atom { coeffs: scaled, offset, rel })
    }

    /// Builds an atom that is known not to be constant.
    pub fn new(coeffs: Vec<Rational>, offset: Rational, rel: Rel) -> Option<Atom> {
        match Self::make(coeffs, offset, rel) {
            Normalized::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn eq(coeffs: Vec<Rational>, offset: Rational) -> Normalized {
        Self::make(coeffs, offset, Rel::EqZero)
    }

    pub fn gt(coeffs: Vec<Rational>, offset: Rational) -> Normalized {
        Self::make(coeffs, offset, Rel::GtZero)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x) + &self.offset
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let v = self.value(x);
        match self.rel {
            Rel::EqZero => v.is_zero(),
            Rel::GtZero => v.is_positive(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.offset.is_zero()
    }

    /// The negated form `−ℓ`.
    fn negated_form(&self) -> (Vec<Rational>, Rational) {
        (self.coeffs.iter().map(|c| -c).collect(), -self.offset.clone())
    }

    /// Disjoint pieces of the negation.
    pub fn negation(&self) -> Vec<Normalized> {
        let (nc, no) = self.negated_form();
        match self.rel {
            Rel::EqZero => vec![
                Atom::gt(self.coeffs.clone(), self.offset.clone()),
                Atom::gt(nc, no),
            ],
            Rel::GtZero => vec![Atom::eq(self.coeffs.clone(), self.offset.clone()), Atom::gt(nc, no)],
        }
    }

    /// `ℓ ∘ (x ↦ L·x + t)`.
    pub fn preimage(&self, l: &QMatrix, t: &[Rational]) -> Normalized {
        let coeffs = l.vec_mul(&self.coeffs);
        let offset = dot(&self.coeffs, t) + &self.offset;
        Atom::make(coeffs, offset, self.rel)
    }
}

/// A conjunction of atoms (no atoms means the whole space).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    atoms: Vec<Atom>,
}

impl Cell {
    pub fn full() -> Cell {
        Cell { atoms: Vec::new() }
    }

    /// Deduplicates; `None` when some constraint is false or two atoms
    /// directly contradict each other.
    pub fn from_normalized(items: impl IntoIterator<Item = Normalized>) -> Option<Cell> {
        let mut atoms = Vec::new();
        for it in items {
            match it {
                Normalized::True => {}
                Normalized::False => return None,
                Normalized::Atom(a) => atoms.push(a),
            }
        }
        Cell::new(atoms)
    }

    pub fn new(mut atoms: Vec<Atom>) -> Option<Cell> {
        atoms.sort();
        atoms.dedup();
        let eqs: BTreeSet<(Vec<Rational>, Rational)> = atoms
            .iter()
            .filter(|a| a.rel == Rel::EqZero)
            .map(|a| (a.coeffs.clone(), a.offset.clone()))
            .collect();
        let gts: BTreeSet<(Vec<Rational>, Rational)> = atoms
            .iter()
            .filter(|a| a.rel == Rel::GtZero)
            .map(|a| (a.coeffs.clone(), a.offset.clone()))
            .collect();
        for (c, d) in &gts {
            let neg = (c.iter().map(|x| -x).collect::<Vec<_>>(), -d.clone());
            if gts.contains(&neg) || eqs.contains(&neg) || eqs.contains(&(c.clone(), d.clone())) {
                return None;
            }
        }
        Some(Cell { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_full(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.atoms.iter().all(|a| a.holds(x))
    }

    pub fn conjoin(&self, other: &Cell) -> Option<Cell> {
        Cell::new(self.atoms.iter().chain(&other.atoms).cloned().collect())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.atoms.iter().all(|a| a.is_homogeneous())
    }

    pub(crate) fn system(&self, n: usize) -> System {
        let mut sys = System { n, ..Default::default() };
        for a in &self.atoms {
            match a.rel {
                Rel::EqZero => sys.eqs.push((a.coeffs.clone(), a.offset.clone())),
                Rel::GtZero => sys.ineqs.push(Ineq { c: a.coeffs.clone(), d: a.offset.clone(), strict: true }),
            }
        }
        sys
    }

    /// A rational point of the cell, or `None` when it is empty over ℝ.
    pub fn witness(&self, n: usize) -> Option<Vec<Rational>> {
        feasible_point(&self.system(n))
    }

    pub fn is_empty_real(&self, n: usize) -> bool {
        self.witness(n).is_none()
    }

    pub fn preimage(&self, l: &QMatrix, t: &[Rational]) -> Option<Cell> {
        Cell::from_normalized(self.atoms.iter().map(|a| a.preimage(l, t)))
    }

    /// Same set with the equalities in reduced echelon form and their pivot
    /// variables eliminated from the inequalities; `None` when the
    /// equalities are inconsistent or an inequality becomes false.
    pub fn simplified(&self, n: usize) -> Option<Cell> {
        let eq_rows: Vec<Vec<Rational>> = self
            .atoms
            .iter()
            .filter(|a| a.rel == Rel::EqZero)
            .map(|a| a.coeffs.iter().cloned().chain(std::iter::once(a.offset.clone())).collect())
            .collect();
        if eq_rows.is_empty() {
            return Some(self.clone());
        }
        let (r, pivots) = QMatrix::from_rows(eq_rows).expect("rectangular").rref();
        if pivots.last() == Some(&n) {
            return None;
        }
        let mut items = Vec::new();
        for i in 0..pivots.len() {
            let row = r.row(i);
            items.push(Atom::eq(row[..n].to_vec(), row[n].clone()));
        }
        for a in self.atoms.iter().filter(|a| a.rel == Rel::GtZero) {
            let mut v: Vec<Rational> = a.coeffs.iter().cloned().chain(std::iter::once(a.offset.clone())).collect();
            for (i, &p) in pivots.iter().enumerate() {
                if v[p].is_zero() {
                    continue;
                }
                let m = v[p].clone();
                for (x, y) in v.iter_mut().zip(r.row(i)) {
                    *x -= &m * y;
                }
            }
            items.push(Atom::gt(v[..n].to_vec(), v[n].clone()));
        }
        Cell::from_normalized(items)
    }
}

/// Finite union of cells in a fixed ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiLinearSet {
    dim: usize,
    cells: Vec<Cell>,
    names: Vec<String>,
}

pub fn default_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl SemiLinearSet {
    pub fn empty(dim: usize) -> Self {
        SemiLinearSet { dim, cells: Vec::new(), names: default_names("u", dim) }
    }

    pub fn full(dim: usize) -> Self {
        SemiLinearSet { dim, cells: vec![Cell::full()], names: default_names("u", dim) }
    }

    pub fn from_cells(dim: usize, cells: Vec<Cell>) -> Result<Self> {
        if cells.iter().any(|c| c.atoms.iter().any(|a| a.dim() != dim)) {
            return Err(Error::DimensionMismatch("atom dimension differs from the set".into()));
        }
        let mut out = SemiLinearSet { dim, cells: Vec::new(), names: default_names("u", dim) };
        for c in cells {
            out.push_cell(c);
        }
        Ok(out)
    }

    /// Builds a one-cell set; a contradictory cell gives the empty set.
    pub fn from_atoms(dim: usize, items: Vec<Normalized>) -> Result<Self> {
        match Cell::from_normalized(items) {
            Some(c) => Self::from_cells(dim, vec![c]),
            None => Ok(Self::empty(dim)),
        }
    }

    fn push_cell(&mut self, c: Cell) {
        if !self.cells.contains(&c) {
            self.cells.push(c);
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.dim, "name count");
        self.names = names;
        self
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_trivially_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, x: &[Rational]) -> Result<bool> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "point of dimension {} for a set in dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.cells.iter().any(|c| c.contains(x)))
    }

    /// Membership, panicking on a dimension mismatch.
    pub fn member(&self, x: &[Rational]) -> bool {
        self.contains(x).expect("membership dimension")
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for c in &other.cells {
            out.push_cell(c.clone());
        }
        Ok(out)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("sets of dimension {} and {}", self.dim, other.dim)));
        }
        Ok(())
    }

    /// Pairwise conjunction, keeping only cells that are non-empty over ℝ.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = SemiLinearSet { dim: self.dim, cells: Vec::new(), names: self.names.clone() };
        for a in &self.cells {
            for b in &other.cells {
                if let Some(c) = a.conjoin(b) {
                    if !c.is_empty_real(self.dim) {
                        out.push_cell(c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `{x ∈ ℝ^m : L·x + t ∈ self}` for an `n x m` matrix `L`.
    pub fn preimage_affine(&self, l: &QMatrix, t: &[Rational]) -> Result<Self> {
        if l.rows() != self.dim || t.len() != self.dim {
            return Err(Error::DimensionMismatch("preimage map does not land in the set's space".into()));
        }
        let m = l.cols();
        let cells = self.cells.iter().filter_map(|c| c.preimage(l, t)).collect();
        Ok(SemiLinearSet { dim: m, cells: dedup(cells), names: default_names("u", m) })
    }

    /// `{x : L·x ∈ self}`.
    pub fn preimage(&self, l: &QMatrix) -> Result<Self> {
        self.preimage_affine(l, &vec![Rational::zero(); l.rows()])
    }

    /// The image `{M·x : x ∈ self}` for invertible `M`.
    pub fn transform(&self, m: &QMatrix) -> Result<Self> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::DimensionMismatch("transform size".into()));
        }
        let inv = m.inverse()?;
        Ok(self.preimage(&inv)?.with_names(self.names.clone()))
    }

    /// Fixes the last coordinate to one.
    pub fn slice_last_coordinate(&self) -> Result<Self> {
        if self.dim == 0 {
            return Err(Error::DimensionMismatch("cannot slice a zero-dimensional set".into()));
        }
        let n = self.dim - 1;
        let mut l = QMatrix::zeros(self.dim, n);
        for i in 0..n {
            l.set(i, i, Rational::from_integer(1.into()));
        }
        let mut t = vec![Rational::zero(); self.dim];
        t[n] = Rational::from_integer(1.into());
        let names = self.names[..n].to_vec();
        Ok(self.preimage_affine(&l, &t)?.with_names(names))
    }

    /// Complement, as a union of pairwise disjoint non-empty cells.
    pub fn complement(&self) -> Self {
        let cells = subtract_all(vec![Cell::full()], &self.cells, self.dim);
        SemiLinearSet { dim: self.dim, cells, names: self.names.clone() }
    }

    /// `self ∖ other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let start = self.cells.iter().filter_map(|c| c.simplified(self.dim)).collect();
        let cells = subtract_all(start, &other.cells, self.dim);
        Ok(SemiLinearSet { dim: self.dim, cells, names: self.names.clone() })
    }

    pub fn is_empty_real(&self) -> bool {
        self.cells.iter().all(|c| c.is_empty_real(self.dim))
    }

    /// Over the rationals this coincides with real emptiness: each cell is a
    /// relatively open polyhedron in a rational affine subspace, where rational
    /// points are dense. The witness below is rational.
    pub fn is_empty_rational(&self) -> bool {
        self.is_empty_real()
    }

    /// A rational member, or `None` when the set is empty.
    pub fn witness(&self) -> Option<Vec<Rational>> {
        self.cells.iter().find_map(|c| c.witness(self.dim))
    }

    /// Simplifies every cell and drops those that are empty over ℝ.
    pub fn pruned(&self) -> Self {
        let cells = self
            .cells
            .iter()
            .filter_map(|c| c.simplified(self.dim))
            .filter(|c| !c.is_empty_real(self.dim))
            .collect();
        SemiLinearSet { dim: self.dim, cells: dedup(cells), names: self.names.clone() }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.cells.iter().all(|c| c.is_homogeneous())
    }

    pub fn is_empty_integer(&self, budget: usize) -> IntFeasibility {
        integer::set_integer_feasibility(self, budget)
    }
}

fn dedup(cells: Vec<Cell>) -> Vec<Cell> {
    let mut out: Vec<Cell> = Vec::with_capacity(cells.len());
    for c in cells {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Removes every cell of `cuts` from the union of `pieces`, keeping the
/// pieces pairwise disjoint when they start out so.
///
/// A piece is only split by a cut it meets, and inside a cut the atoms the
/// piece already implies are skipped, which keeps the output small.
fn subtract_all(mut pieces: Vec<Cell>, cuts: &[Cell], n: usize) -> Vec<Cell> {
    for cut in cuts {
        let mut next = Vec::with_capacity(pieces.len());
        for piece in &pieces {
            match piece.conjoin(cut).and_then(|c| c.simplified(n)) {
                Some(c) if !c.is_empty_real(n) => {}
                _ => {
                    next.push(piece.clone());
                    continue;
                }
            }
            // piece ∖ (t_1 ∧ … ∧ t_k) = ⋁_i (piece ∧ t_1 ∧ … ∧ t_{i−1} ∧ ¬t_i).
            let mut cur = piece.clone();
            for atom in cut.atoms() {
                let mut implied = true;
                for neg in atom.negation() {
                    let Some(c) = Cell::from_normalized([neg]).and_then(|p| cur.conjoin(&p)).and_then(|c| c.simplified(n))
                    else {
                        continue;
                    };
                    if !c.is_empty_real(n) {
                        implied = false;
                        next.push(c);
                    }
                }
                if !implied {
                    match cur.conjoin(&Cell { atoms: vec![atom.clone()] }).and_then(|c| c.simplified(n)) {
                        Some(c) => cur = c,
                        None => break,
                    }
                }
            }
        }
        pieces = dedup(next);
        if pieces.is_empty() {
            break;
        }
    }
    pieces
}

/// True iff `a ∖ b` and `b ∖ a` are both empty over ℝ.
pub fn set_equivalent(a: &SemiLinearSet, b: &SemiLinearSet) -> Result<bool> {
    a.check_dim(b)?;
    Ok(a.difference(b)?.is_empty_real() && b.difference(a)?.is_empty_real())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn gt(c: &[i64], d: i64) -> Normalized {
        Atom::gt(v(c), int(d))
    }

    fn eq(c: &[i64], d: i64) -> Normalized {
        Atom::eq(v(c), int(d))
    }

    fn set(dim: usize, cells: Vec<Vec<Normalized>>) -> SemiLinearSet {
        let cells = cells.into_iter().filter_map(Cell::from_normalized).collect();
        SemiLinearSet::from_cells(dim, cells).unwrap()
    }

    /// The locus printed for the three-variable example loop.
    fn motivating_locus() -> SemiLinearSet {
        set(
            3,
            vec![
                vec![gt(&[-1, -1, 3], 0)],
                vec![eq(&[1, 1, -3], 0), gt(&[0, 1, 1], 0)],
                vec![eq(&[1, 0, -4], 0), eq(&[0, 1, 1], 0), gt(&[0, 0, 1], 0)],
            ],
        )
    }

    #[test]
    fn normalization_is_canonical() {
        let a = Atom::gt(vec![rat(-1, 2), rat(3, 2)], int(1));
        assert_eq!(a, Atom::gt(v(&[-1, 3]), int(2)));
        assert_eq!(Atom::eq(v(&[-2, 4]), int(6)), Atom::eq(v(&[1, -2]), int(-3)));
        assert_eq!(Atom::gt(v(&[0, 0]), int(1)), Normalized::True);
        assert_eq!(Atom::gt(v(&[0, 0]), int(0)), Normalized::False);
    }

    #[test]
    fn direct_contradictions_are_detected() {
        assert!(Cell::from_normalized(vec![gt(&[1], 0), gt(&[-1], 0)]).is_none());
        assert!(Cell::from_normalized(vec![eq(&[1, 1], 0), gt(&[-1, -1], 0)]).is_none());
        assert_eq!(Cell::from_normalized(vec![gt(&[1], 0), gt(&[2], 0)]).unwrap().atoms().len(), 1);
    }

    #[test]
    fn membership_of_the_motivating_point() {
        let s = motivating_locus();
        assert!(s.member(&v(&[-9, 3, -2])));
        assert!(!SemiLinearSet::empty(3).member(&v(&[-9, 3, -2])));
        assert!(s.contains(&v(&[1])).is_err());
    }

    #[test]
    fn emptiness() {
        assert!(set(1, vec![vec![gt(&[1], 0), gt(&[-1], 0)]]).is_empty_real());
        assert!(!motivating_locus().is_empty_real());
        let half = set(1, vec![vec![eq(&[2], -1)]]);
        assert!(!half.is_empty_rational());
        assert_eq!(half.witness(), Some(vec![rat(1, 2)]));
        assert!(SemiLinearSet::empty(2).is_empty_rational());
    }

    #[test]
    fn complement_of_half_line() {
        let s = set(1, vec![vec![gt(&[1], 0)]]);
        let c = s.complement();
        let expect = set(1, vec![vec![eq(&[1], 0)], vec![gt(&[-1], 0)]]);
        assert!(set_equivalent(&c, &expect).unwrap());
        assert!(SemiLinearSet::full(2).complement().is_trivially_empty());
    }

    #[test]
    fn complement_of_motivating_locus_is_disjoint_and_pointwise() {
        let s = motivating_locus();
        let c = s.complement();
        for (i, a) in c.cells().iter().enumerate() {
            for b in &c.cells()[i + 1..] {
                assert!(a.conjoin(b).is_none_or(|x| x.is_empty_real(3)));
            }
        }
        for code in 0..5usize.pow(3) {
            let x: Vec<Rational> = (0..3).map(|k| int((code / 5usize.pow(k)) as i64 % 5 - 2)).collect();
            assert_ne!(s.member(&x), c.member(&x), "{x:?}");
        }
        let d = s.difference(&set(3, vec![vec![gt(&[0, 0, 1], 0)]])).unwrap();
        assert!(d.member(&v(&[-1, 0, 0])));
        assert!(!d.member(&v(&[-1, 0, 1])));
    }

    #[test]
    fn closed_half_line_is_not_open() {
        let open = set(1, vec![vec![gt(&[1], 0)]]);
        let closed = set(1, vec![vec![gt(&[1], 0)], vec![eq(&[1], 0)]]);
        assert!(!set_equivalent(&open, &closed).unwrap());
        assert!(set_equivalent(&open, &open).unwrap());
    }

    #[test]
    fn permuted_rewriting_is_equivalent() {
        let s = motivating_locus();
        let rewritten = set(
            3,
            vec![
                vec![eq(&[0, 1, 1], 0), eq(&[1, 0, -4], 0), gt(&[0, 0, 2], 0)],
                vec![gt(&[1, 1, -3], 0), gt(&[-1, -1, 3], 0)],
                vec![gt(&[-2, -2, 6], 0)],
                vec![eq(&[-1, -1, 3], 0), gt(&[0, 1, 1], 0)],
            ],
        );
        assert!(set_equivalent(&s, &rewritten).unwrap());
    }

    #[test]
    fn intersection_with_full_space() {
        let s = motivating_locus();
        let i = s.intersect(&SemiLinearSet::full(3)).unwrap();
        assert!(set_equivalent(&s, &i).unwrap());
        let a = set(1, vec![vec![gt(&[1], 0)]]);
        let b = set(1, vec![vec![gt(&[-1], 0)]]);
        assert!(a.intersect(&b).unwrap().is_trivially_empty());
    }

    #[test]
    fn slicing_substitutes_one() {
        let s = set(3, vec![vec![gt(&[0, 0, 1], 0), gt(&[1, 0, -2], 0)]]);
        let sl = s.slice_last_coordinate().unwrap();
        assert_eq!(sl.dim(), 2);
        assert_eq!(sl.cells()[0].atoms().len(), 1);
        assert!(sl.member(&v(&[3, 0])) && !sl.member(&v(&[2, 0])));
        let dead = set(2, vec![vec![gt(&[0, -1], 0)]]);
        assert!(dead.slice_last_coordinate().unwrap().is_trivially_empty());
    }

    #[test]
    fn transform_is_the_image() {
        let s = set(2, vec![vec![gt(&[1, 0], 0)]]);
        let m = QMatrix::from_i64(&[[2, 1], [0, 1]]);
        let img = s.transform(&m).unwrap();
        for x in [v(&[1, 5]), v(&[-1, 2]), v(&[0, 0])] {
            assert_eq!(img.member(&m.mul_vec(&x)), s.member(&x));
        }
    }
}
