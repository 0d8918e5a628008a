//! ANT cells for a regular pair with an arbitrary real spectrum.
//!
//! Even iterates see `φ⁺_{ℓ,t} = φ_{ℓ,t} + φ_{−ℓ,t}`, odd iterates see
//! `φ⁻_{ℓ,t} = φ_{ℓ,t} − φ_{−ℓ,t}`. A point is ANT iff the first nonzero
//! `φ⁺` form and the first nonzero `φ⁻` form, scanning levels `ℓ = |λ|`
//! downwards and degrees `t` downwards within a level, are both positive.
//! The cells split on where the two dominant forms sit:
//!
//! * `S^ℓ_{k,k′}`: both at level `ℓ`, degrees `k` and `k′`;
//! * `U^{ℓ,ℓ′}_{k,k′}`: even part at `ℓ`, odd part at a lower level `ℓ′`;
//! * `V^{ℓ,ℓ′}_{k,k′}`: odd part at `ℓ`, even part at a lower level `ℓ′`.
//!
//! Degree indices are 0-based.

use num_traits::Zero;
use serde::Serialize;

use crate::arith::rational::fmt_rational;
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::semilinear::{Atom, Cell, Normalized, SemiLinearSet};
use crate::spectra::{phi_forms, PhiForms, SpectralData};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CellKind {
    S,
    U,
    V,
}

/// A labelled cell. `level2` is absent for `S` cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularCell {
    pub kind: CellKind,
    #[serde(with = "crate::arith::rational::serde_q")]
    pub level: Rational,
    #[serde(with = "crate::arith::rational::serde_q::opt_one")]
    pub level2: Option<Rational>,
    pub k: usize,
    pub k2: usize,
    #[serde(skip)]
    pub cell: Cell,
}

impl RegularCell {
    pub fn label(&self) -> String {
        let kind = match self.kind {
            CellKind::S => "S",
            CellKind::U => "U",
            CellKind::V => "V",
        };
        match &self.level2 {
            None => format!("{kind}^{}_{{{},{}}}", fmt_rational(&self.level), self.k, self.k2),
            Some(l2) => format!(
                "{kind}^{{{},{}}}_{{{},{}}}",
                fmt_rational(&self.level),
                fmt_rational(l2),
                self.k,
                self.k2
            ),
        }
    }
}

/// The three families of cells.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegularCells {
    pub s: Vec<RegularCell>,
    pub u: Vec<RegularCell>,
    pub v: Vec<RegularCell>,
}

impl RegularCells {
    pub fn all(&self) -> impl Iterator<Item = &RegularCell> {
        self.s.iter().chain(&self.u).chain(&self.v)
    }
}

#[derive(Clone, Copy)]
enum Sign {
    Plus,
    Minus,
}

fn form(ph: &PhiForms, sign: Sign, level: &Rational, t: usize) -> Vec<Rational> {
    match sign {
        Sign::Plus => ph.plus(level, t),
        Sign::Minus => ph.minus(level, t),
    }
}

/// `form = 0` for every degree of `level`.
fn vanish_level(out: &mut Vec<Normalized>, ph: &PhiForms, sign: Sign, level: &Rational) {
    for t in 0..ph.e(level) {
        out.push(Atom::eq(form(ph, sign, level, t), Rational::zero()));
    }
}

/// Dominance at `(level, k)`: higher degrees vanish, degree `k` is positive.
fn dominant_at(out: &mut Vec<Normalized>, ph: &PhiForms, sign: Sign, level: &Rational, k: usize) {
    for t in k + 1..ph.e(level) {
        out.push(Atom::eq(form(ph, sign, level, t), Rational::zero()));
    }
    out.push(Atom::gt(form(ph, sign, level, k), Rational::zero()));
}

fn check_regular(spec: &SpectralData) -> Result<()> {
    if !spec.is_single_block() {
        return Err(Error::Precondition("regular pair needs one Jordan block per eigenvalue".into()));
    }
    if spec.eigenvalues.iter().any(|(l, _)| l.is_zero()) {
        return Err(Error::Precondition("regular pair has no zero eigenvalue".into()));
    }
    Ok(())
}

/// All labelled `S`, `U` and `V` cells. Cells with a syntactic contradiction
/// are dropped; the rest are kept even when empty for a deeper reason, so
/// labels stay stable.
pub fn regular_cells(spec: &SpectralData) -> Result<RegularCells> {
    check_regular(spec)?;
    let ph = phi_forms(spec);
    let levels = ph.levels.clone();
    let mut out = RegularCells::default();
    for (i, top) in levels.iter().enumerate() {
        // Both dominant forms at a level without a positive eigenvalue would
        // need φ⁺ = −φ⁻ positive at once.
        if !ph.has_positive(top) {
            continue;
        }
        let mut above = Vec::new();
        for l in &levels[..i] {
            vanish_level(&mut above, &ph, Sign::Plus, l);
            vanish_level(&mut above, &ph, Sign::Minus, l);
        }
        let e = ph.e(top);
        for k in 0..e {
            for k2 in 0..e {
                let mut items = above.clone();
                dominant_at(&mut items, &ph, Sign::Plus, top, k);
                dominant_at(&mut items, &ph, Sign::Minus, top, k2);
                push(&mut out.s, CellKind::S, top, None, k, k2, items);
            }
        }
        let d = ph.d(top);
        for (kind, first, second) in [(CellKind::U, Sign::Plus, Sign::Minus), (CellKind::V, Sign::Minus, Sign::Plus)] {
            for k in 0..d {
                let mut head = above.clone();
                dominant_at(&mut head, &ph, first, top, k);
                vanish_level(&mut head, &ph, second, top);
                for (j, lower) in levels.iter().enumerate().skip(i + 1) {
                    let mut between = head.clone();
                    for l in &levels[i + 1..j] {
                        vanish_level(&mut between, &ph, second, l);
                    }
                    for k2 in 0..ph.e(lower) {
                        let mut items = between.clone();
                        dominant_at(&mut items, &ph, second, lower, k2);
                        let bucket = if kind == CellKind::U { &mut out.u } else { &mut out.v };
                        push(bucket, kind, top, Some(lower.clone()), k, k2, items);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn push(
    bucket: &mut Vec<RegularCell>,
    kind: CellKind,
    level: &Rational,
    level2: Option<Rational>,
    k: usize,
    k2: usize,
    items: Vec<Normalized>,
) {
    if let Some(cell) = Cell::from_normalized(items) {
        bucket.push(RegularCell { kind, level: level.clone(), level2, k, k2, cell });
    }
}

/// `S ∪ U ∪ V` in Jordan coordinates.
pub fn ant_regular(spec: &SpectralData) -> Result<SemiLinearSet> {
    let cells = regular_cells(spec)?.all().map(|c| c.cell.clone()).collect();
    Ok(SemiLinearSet::from_cells(spec.dim(), cells)?.with_names(spec.coordinate_names()))
}
