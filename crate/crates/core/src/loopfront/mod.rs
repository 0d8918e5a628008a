//! Loop programs `while (F x > b) { x := A x + c }`: parsing, classification,
//! homogenization and printing.

pub mod json;
pub mod parse;
pub mod print;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{QMatrix, Rational};
use crate::error::{Error, Result};

pub use parse::{compose_sequential, parse, parse_locus, LinExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassTag {
    /// One guard, `x := A x`.
    Homogeneous,
    /// Several guards, `x := A x`.
    GeneralizedHomogeneous,
    /// Guards `F x > b` and `x := A x + c` with `b` or `c` nonzero.
    Affine,
}

impl ClassTag {
    pub fn short(&self) -> &'static str {
        match self {
            ClassTag::Homogeneous => "H",
            ClassTag::GeneralizedHomogeneous => "G",
            ClassTag::Affine => "A",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopProgram {
    pub var_names: Vec<String>,
    pub a: QMatrix,
    pub c: Vec<Rational>,
    pub f: QMatrix,
    pub b: Vec<Rational>,
    pub class_tag: ClassTag,
}

impl LoopProgram {
    pub fn new(var_names: Vec<String>, a: QMatrix, c: Vec<Rational>, f: QMatrix, b: Vec<Rational>) -> Result<Self> {
        let n = var_names.len();
        if a.rows() != n || a.cols() != n {
            return Err(Error::InvalidProgram(format!("update matrix must be {n}x{n}")));
        }
        if c.len() != n {
            return Err(Error::InvalidProgram(format!("update offset must have length {n}")));
        }
        if f.rows() == 0 {
            return Err(Error::InvalidProgram("the guard needs at least one condition".into()));
        }
        if f.cols() != n || b.len() != f.rows() {
            return Err(Error::InvalidProgram("guard matrix and bound do not match".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = var_names.iter().find(|v| !seen.insert(v.as_str())) {
            return Err(Error::InvalidProgram(format!("duplicate variable {dup}")));
        }
        let class_tag = if b.iter().any(|x| !x.is_zero()) || c.iter().any(|x| !x.is_zero()) {
            ClassTag::Affine
        } else if f.rows() > 1 {
            ClassTag::GeneralizedHomogeneous
        } else {
            ClassTag::Homogeneous
        };
        Ok(LoopProgram { var_names, a, c, f, b, class_tag })
    }

    pub fn n(&self) -> usize {
        self.var_names.len()
    }

    pub fn m(&self) -> usize {
        self.f.rows()
    }

    pub fn is_affine(&self) -> bool {
        self.class_tag == ClassTag::Affine
    }

    /// `F x − b`, one entry per guard row.
    pub fn guard_values(&self, x: &[Rational]) -> Vec<Rational> {
        self.f.mul_vec(x).into_iter().zip(&self.b).map(|(v, b)| v - b).collect()
    }

    /// `A x + c`.
    pub fn step(&self, x: &[Rational]) -> Vec<Rational> {
        self.a.mul_vec(x).into_iter().zip(&self.c).map(|(v, c)| v + c).collect()
    }

    /// The same program with variables listed in `order`.
    pub fn reordered(&self, order: &[String]) -> Result<Self> {
        let idx: Vec<usize> = order
            .iter()
            .map(|v| {
                self.var_names
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::InvalidProgram(format!("unknown variable {v}")))
            })
            .collect::<Result<_>>()?;
        if idx.len() != self.n() {
            return Err(Error::InvalidProgram("reordering must list every variable".into()));
        }
        let a = self.a.select_rows(&idx).select_cols(&idx);
        let f = self.f.select_cols(&idx);
        let c = idx.iter().map(|&i| self.c[i].clone()).collect();
        LoopProgram::new(order.to_vec(), a, c, f, self.b.clone())
    }
}

/// How a homogenized program relates to its source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    /// True when a trailing constant coordinate was appended; results must be
    /// restricted to that coordinate being one.
    pub appended_one: bool,
}

/// Name of the appended constant coordinate.
pub const HOMOGENIZING_VAR: &str = "_one";

/// `A′ = [A c; 0 1]`, `F′ = [F −b; 0 1]` for affine programs; identity otherwise.
pub fn homogenize(p: &LoopProgram) -> (LoopProgram, Embedding) {
    if !p.is_affine() {
        return (p.clone(), Embedding { appended_one: false });
    }
    let n = p.n();
    let m = p.m();
    let mut a = QMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            a.set(i, j, p.a.get(i, j).clone());
        }
        a.set(i, n, p.c[i].clone());
    }
    a.set(n, n, Rational::one());
    let mut f = QMatrix::zeros(m + 1, n + 1);
    for i in 0..m {
        for j in 0..n {
            f.set(i, j, p.f.get(i, j).clone());
        }
        f.set(i, n, -p.b[i].clone());
    }
    f.set(m, n, Rational::one());
    let mut names = p.var_names.clone();
    names.push(HOMOGENIZING_VAR.to_string());
    let hom = LoopProgram::new(names, a, vec![Rational::zero(); n + 1], f, vec![Rational::zero(); m + 1])
        .expect("homogenized shapes are consistent");
    (hom, Embedding { appended_one: true })
}
