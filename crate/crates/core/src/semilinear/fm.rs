//! Fourier–Motzkin elimination with exact strictness and witness extraction.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::arith::matrix::dot;
use crate::arith::rational::{ceil, floor, from_bigint, primitive_positive_scale, Rational};

/// `c·x + d > 0` (strict) or `c·x + d ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ineq {
    pub c: Vec<Rational>,
    pub d: Rational,
    pub strict: bool,
}

impl Ineq {
    fn holds_const(&self) -> bool {
        if self.strict {
            self.d.is_positive()
        } else {
            !self.d.is_negative()
        }
    }

    fn is_const(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// Positive rescaling making the coefficients primitive integers.
    fn normalized(mut self) -> Ineq {
        if self.c.iter().all(|x| x.is_zero()) {
            return self;
        }
        let scaled = primitive_positive_scale(&self.c);
        let factor = (0..self.c.len())
            .find(|&i| !self.c[i].is_zero())
            .map(|i| &scaled[i] / &self.c[i])
            .unwrap();
        self.d *= &factor;
        self.c = scaled;
        self
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let v = dot(&self.c, x) + &self.d;
        if self.strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    }
}

/// A conjunction of affine equalities `c·x + d = 0` and inequalities.
#[derive(Clone, Debug, Default)]
pub struct System {
    pub n: usize,
    pub eqs: Vec<(Vec<Rational>, Rational)>,
    pub ineqs: Vec<Ineq>,
}

struct Substitution {
    var: usize,
    /// `x_var = coeffs·x + constant` (coefficient of `var` is zero).
    coeffs: Vec<Rational>,
    constant: Rational,
}

/// A point satisfying the system, or `None` when it is empty over the reals.
pub fn feasible_point(sys: &System) -> Option<Vec<Rational>> {
    let n = sys.n;
    let mut eqs = sys.eqs.clone();
    let mut ineqs = sys.ineqs.clone();
    let mut subs: Vec<Substitution> = Vec::new();

    // Gaussian substitution of the equalities.
    while let Some((c, d)) = eqs.pop() {
        let Some(v) = (0..n).find(|&i| !c[i].is_zero()) else {
            if d.is_zero() {
                continue;
            }
            return None;
        };
        let lead = c[v].clone();
        let mut coeffs: Vec<Rational> = c.iter().map(|x| -x / &lead).collect();
        coeffs[v] = Rational::zero();
        let constant = -&d / &lead;
        for (ec, ed) in eqs.iter_mut() {
            substitute(ec, ed, v, &coeffs, &constant);
        }
        for q in ineqs.iter_mut() {
            substitute(&mut q.c, &mut q.d, v, &coeffs, &constant);
        }
        subs.push(Substitution { var: v, coeffs, constant });
    }

    let mut current: Vec<Ineq> = prune(ineqs.into_iter().map(Ineq::normalized).collect())?;
    let mut stages: Vec<(usize, Vec<Ineq>)> = Vec::new();
    loop {
        let vars: Vec<usize> = (0..n).filter(|&v| current.iter().any(|q| !q.c[v].is_zero())).collect();
        if vars.is_empty() {
            break;
        }
        // Cheapest elimination first.
        let v = *vars
            .iter()
            .min_by_key(|&&v| {
                let pos = current.iter().filter(|q| q.c[v].is_positive()).count();
                let neg = current.iter().filter(|q| q.c[v].is_negative()).count();
                (pos * neg) as i64 - (pos + neg) as i64
            })
            .unwrap();
        let (with, without): (Vec<Ineq>, Vec<Ineq>) = current.into_iter().partition(|q| !q.c[v].is_zero());
        let pos: Vec<&Ineq> = with.iter().filter(|q| q.c[v].is_positive()).collect();
        let neg: Vec<&Ineq> = with.iter().filter(|q| q.c[v].is_negative()).collect();
        let mut next = without;
        for p in &pos {
            for q in &neg {
                let a = p.c[v].clone();
                let b = -q.c[v].clone();
                let c: Vec<Rational> = p.c.iter().zip(&q.c).map(|(x, y)| &b * x + &a * y).collect();
                let d = &b * &p.d + &a * &q.d;
                next.push(Ineq { c, d, strict: p.strict || q.strict }.normalized());
            }
        }
        stages.push((v, with));
        current = prune(next)?;
    }

    // Back-substitution.
    let mut x = vec![Rational::zero(); n];
    for (v, cons) in stages.iter().rev() {
        x[*v] = Rational::zero();
        let mut lo: Option<(Rational, bool)> = None;
        let mut hi: Option<(Rational, bool)> = None;
        for q in cons {
            let a = q.c[*v].clone();
            let rest = dot(&q.c, &x) + &q.d;
            let bound = -rest / &a;
            if a.is_positive() {
                tighten_lo(&mut lo, bound, q.strict);
            } else {
                tighten_hi(&mut hi, bound, q.strict);
            }
        }
        x[*v] = choose_value(lo, hi);
    }
    for s in subs.iter().rev() {
        x[s.var] = dot(&s.coeffs, &x) + &s.constant;
    }
    debug_assert!(sys.ineqs.iter().all(|q| q.holds(&x)));
    Some(x)
}

fn substitute(c: &mut [Rational], d: &mut Rational, v: usize, coeffs: &[Rational], constant: &Rational) {
    let a = std::mem::take(&mut c[v]);
    if a.is_zero() {
        return;
    }
    for (ci, ei) in c.iter_mut().zip(coeffs) {
        if !ei.is_zero() {
            *ci += &a * ei;
        }
    }
    *d += &a * constant;
}

/// Drops constant-true rows and dominated parallel rows; `None` if a
/// constant row fails.
fn prune(rows: Vec<Ineq>) -> Option<Vec<Ineq>> {
    let mut best: BTreeMap<Vec<Rational>, (Rational, bool)> = BTreeMap::new();
    for q in rows {
        if q.is_const() {
            if !q.holds_const() {
                return None;
            }
            continue;
        }
        match best.get_mut(&q.c) {
            // Smaller offset is tighter; strict wins ties.
            Some(slot) => {
                if q.d < slot.0 || (q.d == slot.0 && q.strict) {
                    *slot = (q.d, q.strict);
                }
            }
            None => {
                best.insert(q.c, (q.d, q.strict));
            }
        }
    }
    // A row and its exact negation leave only a point or nothing.
    for (c, (d, strict)) in &best {
        let neg: Vec<Rational> = c.iter().map(|x| -x).collect();
        if let Some((d2, strict2)) = best.get(&neg) {
            // c·x + d ≥ 0 and −c·x + d2 ≥ 0 need d + d2 ≥ 0.
            let sum = d + d2;
            if sum.is_negative() || (sum.is_zero() && (*strict || *strict2)) {
                return None;
            }
        }
    }
    Some(best.into_iter().map(|(c, (d, strict))| Ineq { c, d, strict }).collect())
}

fn tighten_lo(lo: &mut Option<(Rational, bool)>, b: Rational, strict: bool) {
    let replace = match lo {
        None => true,
        Some((v, _)) => b > *v || (b == *v && strict),
    };
    if replace {
        *lo = Some((b, strict));
    }
}

fn tighten_hi(hi: &mut Option<(Rational, bool)>, b: Rational, strict: bool) {
    let replace = match hi {
        None => true,
        Some((v, _)) => b < *v || (b == *v && strict),
    };
    if replace {
        *hi = Some((b, strict));
    }
}

fn above(x: &Rational, lo: &Option<(Rational, bool)>) -> bool {
    match lo {
        None => true,
        Some((b, true)) => x > b,
        Some((b, false)) => x >= b,
    }
}

fn below(x: &Rational, hi: &Option<(Rational, bool)>) -> bool {
    match hi {
        None => true,
        Some((b, true)) => x < b,
        Some((b, false)) => x <= b,
    }
}

/// The integer closest to zero in the interval if there is one, otherwise
/// the fraction with the smallest denominator.
fn choose_value(lo: Option<(Rational, bool)>, hi: Option<(Rational, bool)>) -> Rational {
    let zero = Rational::zero();
    if above(&zero, &lo) && below(&zero, &hi) {
        return zero;
    }
    let lo_int = lo.as_ref().map(|(b, s)| {
        let c = from_bigint(ceil(b));
        if *s && &c == b { c + Rational::one() } else { c }
    });
    let hi_int = hi.as_ref().map(|(b, s)| {
        let f = from_bigint(floor(b));
        if *s && &f == b { f - Rational::one() } else { f }
    });
    match (&lo_int, &hi_int) {
        (Some(l), Some(h)) if l <= h => {
            // Zero is outside, so the interval lies on one side of it.
            if l.is_positive() { l.clone() } else { h.clone() }
        }
        (Some(l), None) => l.clone(),
        (None, Some(h)) => h.clone(),
        _ => {
            let (lb, _) = lo.clone().unwrap();
            let (hb, _) = hi.clone().unwrap();
            for q in 2..=256i64 {
                let qr = Rational::from_integer(q.into());
                let p = from_bigint(ceil(&(&lb * &qr)));
                for cand in [&p / &qr, (&p + Rational::one()) / &qr] {
                    if above(&cand, &lo) && below(&cand, &hi) {
                        return cand;
                    }
                }
            }
            (lb + hb) / Rational::from_integer(2.into())
        }
    }
}
