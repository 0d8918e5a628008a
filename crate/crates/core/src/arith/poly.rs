//! Univariate rational polynomials: arithmetic, characteristic polynomials,
//! rational roots and Sturm-sequence real-root counting.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::QMatrix;
use super::rational::{fmt_rational, from_bigint, gcd_of_numerators, int, lcm_of_denominators, Rational};
use crate::error::{Error, Result};

/// Coefficients in ascending degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `T`.
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `T − r`.
    pub fn linear_root(r: &Rational) -> Self {
        Self::new(vec![-r.clone(), Rational::one()])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: &Rational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn pow(&self, k: usize) -> QPoly {
        (0..k).fold(QPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lead = d.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] -= &c * dc;
                }
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r.primitive_part();
        }
        a.monic()
    }

    /// Integer-coefficient polynomial with coprime coefficients and positive
    /// leading coefficient, proportional to `self`.
    pub fn primitive_part(&self) -> QPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = from_bigint(lcm_of_denominators(self.coeffs.iter()));
        let scaled: Vec<Rational> = self.coeffs.iter().map(|c| c * &l).collect();
        let mut g = from_bigint(gcd_of_numerators(scaled.iter()).abs());
        if scaled.last().unwrap().is_negative() {
            g = -g;
        }
        QPoly::new(scaled.into_iter().map(|c| c / &g).collect())
    }

    /// Evaluates `p(M)` by Horner's scheme.
    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.rows();
        let mut acc = QMatrix::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + &QMatrix::identity(n).scale(c);
        }
        acc
    }

    /// Square-free factorization (Yun): pairs `(g_i, i)` with `self` equal to
    /// a constant times the product of `g_i^i`, each `g_i` monic and square-free.
    pub fn square_free_decomposition(&self) -> Vec<(QPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_rem(&a0).0;
        let mut c = fp.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Number of distinct real roots, by Sturm's theorem.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let p = self.div_rem(&self.gcd(&self.derivative())).0;
        let seq = sturm_sequence(&p);
        let at = |sign_of: &dyn Fn(&QPoly) -> i32| -> usize {
            let signs: Vec<i32> = seq.iter().map(sign_of).filter(|&s| s != 0).collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        let at_neg_inf = at(&|q: &QPoly| {
            let s = sign_of_rational(&q.leading());
            if q.degree().unwrap_or(0) % 2 == 1 { -s } else { s }
        });
        let at_pos_inf = at(&|q: &QPoly| sign_of_rational(&q.leading()));
        at_neg_inf - at_pos_inf
    }

    /// Formats with the given variable name, highest degree first.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                s.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{}*{mono}", fmt_rational(&a)));
            }
        }
        s
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("T"))
    }
}

fn sign_of_rational(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn sturm_sequence(p: &QPoly) -> Vec<QPoly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].div_rem(&seq[n - 1]).1;
        if r.is_zero() {
            break;
        }
        // Positive rescaling keeps the sign pattern and the coefficients small.
        let r = r.neg();
        let pp = r.primitive_part();
        let r = if sign_of_rational(&pp.leading()) == sign_of_rational(&r.leading()) { pp } else { pp.neg() };
        seq.push(r);
    }
    seq
}

/// `det(A − T·I)` via the Faddeev–LeVerrier recurrence.
pub fn char_poly(a: &QMatrix) -> Result<QPoly> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    // c[k] is the coefficient of T^k in det(T·I − A).
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    let mut m = QMatrix::zeros(n, n);
    for k in 1..=n {
        m = &(a * &m) + &QMatrix::identity(n).scale(&c[n - k + 1]);
        let am = a * &m;
        c[n - k] = -am.trace() / int(k as i64);
    }
    let p = QPoly::new(c);
    Ok(if n % 2 == 1 { p.neg() } else { p })
}

/// All rational roots with multiplicities, in increasing order.
pub fn rational_roots(p: &QPoly) -> Vec<(Rational, usize)> {
    let mut found: BTreeMap<Rational, usize> = BTreeMap::new();
    for (g, mult) in p.square_free_decomposition() {
        for r in rational_roots_square_free(&g) {
            *found.entry(r).or_insert(0) += mult;
        }
    }
    found.into_iter().collect()
}

/// Divides out every rational root and returns the remaining factor together
/// with the roots.
pub fn split_rational_part(p: &QPoly) -> (Vec<(Rational, usize)>, QPoly) {
    let roots = rational_roots(p);
    let mut rest = p.clone();
    for (r, m) in &roots {
        for _ in 0..*m {
            rest = rest.div_rem(&QPoly::linear_root(r)).0;
        }
    }
    (roots, rest.monic())
}

/// True iff `p` has a real root that is not rational.
pub fn has_irrational_real_root(p: &QPoly) -> bool {
    let (_, rest) = split_rational_part(p);
    rest.count_real_roots() > 0
}

fn rational_roots_square_free(g: &QPoly) -> Vec<Rational> {
    let mut roots = Vec::new();
    let mut prim = g.primitive_part();
    if prim.coeff(0).is_zero() {
        roots.push(Rational::zero());
        prim = prim.div_rem(&QPoly::x()).0;
    }
    if prim.degree().unwrap_or(0) == 0 {
        return roots;
    }
    let a0 = prim.coeff(0).numer().abs();
    let an = prim.leading().numer().abs();
    let ps = divisors(&a0);
    let qs = divisors(&an);
    let mut remaining = prim.degree().unwrap();
    let mut seen = std::collections::BTreeSet::new();
    'outer: for q in &qs {
        for p in &ps {
            for cand in [Rational::new(p.clone(), q.clone()), -Rational::new(p.clone(), q.clone())] {
                if remaining == 0 {
                    break 'outer;
                }
                if seen.insert(cand.clone()) && prim.eval(&cand).is_zero() {
                    roots.push(cand);
                    remaining -= 1;
                }
            }
        }
    }
    roots
}

/// Positive divisors by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut m = n.clone();
    let mut d = BigInt::from(2);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
    }
    if m > BigInt::one() {
        factors.push((m, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// `C(k, j)` as a polynomial in `k`.
pub fn binomial_poly(j: usize) -> QPoly {
    let mut p = QPoly::one();
    for i in 0..j {
        p = p.mul(&QPoly::new(vec![int(-(i as i64)), Rational::one()]));
    }
    p.scale(&(Rational::one() / from_bigint(factorial(j))))
}

/// `C(k, j)` for an integer `k` (zero for `0 ≤ k < j`).
pub fn binomial(k: i64, j: usize) -> Rational {
    binomial_poly(j).eval(&int(k))
}

pub fn factorial(j: usize) -> BigInt {
    (1..=j).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn to_usize(n: &BigInt) -> Option<usize> {
    n.to_usize()
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}
