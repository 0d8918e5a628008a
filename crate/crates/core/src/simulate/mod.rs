//! Exact execution of loops.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::arith::rational::serde_q;
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::loopfront::LoopProgram;

/// Default number of steps for horizon checks.
pub const DEFAULT_HORIZON: usize = 500;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub step: usize,
    pub row: usize,
}

/// Iterates `x_0 … x_K` with their guard values `F·x_k − b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    #[serde(with = "serde_q::mat")]
    pub points: Vec<Vec<Rational>>,
    #[serde(with = "serde_q::mat")]
    pub guard_values: Vec<Vec<Rational>>,
    pub first_violation: Option<Violation>,
}

impl Trace {
    pub fn last_point(&self) -> &[Rational] {
        self.points.last().expect("a trace has at least the initial point")
    }

    pub fn terminated(&self) -> bool {
        self.first_violation.is_some()
    }
}

fn check_dim(p: &LoopProgram, x0: &[Rational]) -> Result<()> {
    if x0.len() != p.n() {
        return Err(Error::DimensionMismatch(format!(
            "initial point has {} entries, the loop has {} variables",
            x0.len(),
            p.n()
        )));
    }
    Ok(())
}

/// Fraction-free iteration: `x_k = y_k / s_k` with `y_k` integral and
/// `s_k = D·L^k`, where `L` clears the denominators of `A` and `c` and `D`
/// those of `x_0`. Each step is integer arithmetic only, which avoids a gcd
/// per operation when denominators grow like `L^k`.
struct ScaledIter {
    la: Vec<Vec<BigInt>>,
    lc: Vec<BigInt>,
    l: BigInt,
    /// Guard rows scaled by a positive integer so that `f_i` and `b_i` are integral.
    f: Vec<Vec<BigInt>>,
    b: Vec<BigInt>,
    y: Vec<BigInt>,
    s: BigInt,
}

fn denominators_lcm<'a>(vals: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    vals.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn scaled(vals: &[Rational], by: &BigInt) -> Vec<BigInt> {
    vals.iter().map(|v| (v * Rational::from_integer(by.clone())).to_integer()).collect()
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ScaledIter {
    fn new(p: &LoopProgram, x0: &[Rational]) -> Self {
        let l = denominators_lcm(p.a.entries().iter().chain(&p.c));
        let d = denominators_lcm(x0);
        let la = p.a.to_rows().iter().map(|r| scaled(r, &l)).collect();
        let (f, b) = (0..p.m())
            .map(|i| {
                let mi = denominators_lcm(p.f.row(i).iter().chain(std::iter::once(&p.b[i])));
                (scaled(p.f.row(i), &mi), (&p.b[i] * Rational::from_integer(mi)).to_integer())
            })
            .unzip();
        ScaledIter { la, lc: scaled(&p.c, &l), l, f, b, y: scaled(x0, &d), s: d }
    }

    /// Signs of `F·x_k − b`, scaled by positive factors.
    fn scaled_guards(&self) -> Vec<BigInt> {
        self.f.iter().zip(&self.b).map(|(fi, bi)| int_dot(fi, &self.y) - bi * &self.s).collect()
    }

    fn guards_ok(&self) -> Option<usize> {
        self.scaled_guards().iter().position(|g| !g.is_positive())
    }

    fn point(&self) -> Vec<Rational> {
        self.y.iter().map(|v| Rational::new(v.clone(), self.s.clone())).collect()
    }

    fn advance(&mut self) {
        let y: Vec<BigInt> =
            self.la.iter().zip(&self.lc).map(|(row, ci)| int_dot(row, &self.y) + ci * &self.s).collect();
        self.y = y;
        self.s *= &self.l;
    }
}

/// Runs the loop from `x0`, stopping at the first guard violation or after
/// `max_steps` updates.
pub fn run(p: &LoopProgram, x0: &[Rational], max_steps: usize) -> Result<Trace> {
    check_dim(p, x0)?;
    let mut it = ScaledIter::new(p, x0);
    let mut points = Vec::new();
    let mut guard_values = Vec::new();
    for step in 0..=max_steps {
        let x = it.point();
        let bad = it.guards_ok();
        guard_values.push(p.guard_values(&x));
        points.push(x);
        if let Some(row) = bad {
            return Ok(Trace { points, guard_values, first_violation: Some(Violation { step, row }) });
        }
        if step < max_steps {
            it.advance();
        }
    }
    Ok(Trace { points, guard_values, first_violation: None })
}

/// The first guard violation within `max_steps` updates, without recording
/// the trace.
pub fn first_violation(p: &LoopProgram, x0: &[Rational], max_steps: usize) -> Result<Option<Violation>> {
    check_dim(p, x0)?;
    let mut it = ScaledIter::new(p, x0);
    for step in 0..=max_steps {
        if let Some(row) = it.guards_ok() {
            return Ok(Some(Violation { step, row }));
        }
        if step < max_steps {
            it.advance();
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HorizonStatus {
    /// Every guard row is positive on `[k0, K]`, `k0` least.
    PositiveTail { k0: usize },
    /// Some row is non-positive at step `K`; `k` is the first violation.
    Terminated { k: usize },
}

/// Iterates the update `K` times regardless of the guard and reports where
/// the guard is positive for good.
pub fn check_ant_at_horizon(p: &LoopProgram, x0: &[Rational], horizon: usize) -> Result<HorizonStatus> {
    check_dim(p, x0)?;
    let mut it = ScaledIter::new(p, x0);
    let mut first_violation = None;
    let mut tail_start = 0;
    for k in 0..=horizon {
        if it.guards_ok().is_some() {
            first_violation.get_or_insert(k);
            tail_start = k + 1;
        }
        if k < horizon {
            it.advance();
        }
    }
    if tail_start <= horizon {
        Ok(HorizonStatus::PositiveTail { k0: tail_start })
    } else {
        Ok(HorizonStatus::Terminated { k: first_violation.expect("a violation was seen") })
    }
}
