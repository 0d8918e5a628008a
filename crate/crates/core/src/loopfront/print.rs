//! Prints a loop back in the input language.
//!
//! The language updates variables one at a time, so a simultaneous update
//! `x := A x + c` is rewritten in terms of already-updated values. That works
//! when, for some assignment order, every leading principal minor of the
//! reordered `A` (except the full one) is nonzero.

use num_traits::{One, Signed, Zero};

use super::LoopProgram;
use crate::arith::rational::fmt_rational;
use crate::arith::{QMatrix, Rational};
use crate::error::{Error, Result};

/// Largest dimension for which assignment orders are searched exhaustively.
const MAX_PERMUTED: usize = 8;

/// Formats `Σ coeffs[j]·names[j] + constant`.
pub fn format_affine(coeffs: &[Rational], names: &[String], constant: &Rational) -> String {
    let mut out = String::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let term = if mag.is_one() { name.clone() } else { format!("{}*{}", fmt_rational(&mag), name) };
        push_term(&mut out, c.is_negative(), &term);
    }
    if !constant.is_zero() || out.is_empty() {
        push_term(&mut out, constant.is_negative(), &fmt_rational(&constant.abs()));
    }
    out
}

fn push_term(out: &mut String, negative: bool, term: &str) {
    match (out.is_empty(), negative) {
        (true, false) => out.push_str(term),
        (true, true) => {
            out.push('-');
            out.push_str(term);
        }
        (false, false) => {
            out.push_str(" + ");
            out.push_str(term);
        }
        (false, true) => {
            out.push_str(" - ");
            out.push_str(term);
        }
    }
}

fn leading_minors_ok(a: &QMatrix, order: &[usize]) -> bool {
    (1..order.len()).all(|k| {
        let idx = &order[..k];
        a.select_rows(idx).select_cols(idx).det().map(|d| !d.is_zero()).unwrap_or(false)
    })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// An assignment order for which sequential updates can express the loop.
pub fn assignment_order(a: &QMatrix) -> Option<Vec<usize>> {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    if leading_minors_ok(a, &order) {
        return Some(order);
    }
    if n > MAX_PERMUTED {
        return None;
    }
    while next_permutation(&mut order) {
        if leading_minors_ok(a, &order) {
            return Some(order);
        }
    }
    None
}

/// The body as `(variable, expression)` pairs in execution order.
fn sequential_body(p: &LoopProgram) -> Result<Vec<(usize, Vec<Rational>, Rational)>> {
    let n = p.n();
    let order = assignment_order(&p.a).ok_or_else(|| {
        Error::InvalidProgram(
            "this update cannot be written as sequential assignments without temporaries; use the JSON form".into(),
        )
    })?;
    let mut body = Vec::with_capacity(n);
    for (i, &r) in order.iter().enumerate() {
        let s = &order[..i];
        let t = &order[i..];
        let mut coeffs = vec![Rational::zero(); n];
        let mut constant = p.c[r].clone();
        if s.is_empty() {
            for j in 0..n {
                coeffs[j] = p.a.get(r, j).clone();
            }
        } else {
            // Old values on `s` equal B⁻¹(new_s − A_{s,t} x_t − c_s).
            let b_inv = p.a.select_rows(s).select_cols(s).inverse()?;
            let a_rs = p.a.select_rows(&[r]).select_cols(s);
            let g = a_rs.checked_mul(&b_inv)?;
            let a_st = p.a.select_rows(s).select_cols(t);
            let gt = g.checked_mul(&a_st)?;
            for (k, &j) in s.iter().enumerate() {
                coeffs[j] = g.get(0, k).clone();
            }
            for (k, &j) in t.iter().enumerate() {
                coeffs[j] = p.a.get(r, j) - gt.get(0, k);
            }
            for (k, &j) in s.iter().enumerate() {
                constant -= g.get(0, k) * &p.c[j];
            }
        }
        body.push((r, coeffs, constant));
    }
    Ok(body)
}

/// Renders `p` in the loop language; errors when the update needs temporaries.
pub fn to_dsl(p: &LoopProgram) -> Result<String> {
    let body = sequential_body(p)?;
    let names = &p.var_names;
    let conds: Vec<String> = (0..p.m())
        .map(|i| format!("{} > {}", format_affine(p.f.row(i), names, &Rational::zero()), fmt_rational(&p.b[i])))
        .collect();
    let mut out = format!("while ({}) {{\n", conds.join(" && "));
    for (r, coeffs, constant) in body {
        out.push_str(&format!("  {} := {};\n", names[r], format_affine(&coeffs, names, &constant)));
    }
    out.push('}');
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::loopfront::parse;

    fn same_semantics(a: &LoopProgram, b: &LoopProgram) -> bool {
        let order = a.var_names.clone();
        let b = b.reordered(&order).unwrap();
        a.a == b.a && a.c == b.c && a.f == b.f && a.b == b.b
    }

    #[test]
    fn example_round_trips() {
        let src = "while(x-1/2y-2z>0){ x:=-20x-9y+75z; y:=-7/20x+97/20y+21/4z; z:=35/97x+3/97y-40/97z;}";
        let p = parse(src).unwrap();
        let text = to_dsl(&p).unwrap();
        let q = parse(&text).unwrap();
        assert!(same_semantics(&p, &q), "{text}");
    }

    #[test]
    fn simultaneous_swap_needs_another_order_or_fails() {
        // x, y := y, x has zero leading minors in every order.
        let p = LoopProgram::new(
            vec!["x".into(), "y".into()],
            QMatrix::from_i64(&[[0, 1], [1, 0]]),
            vec![int(0), int(0)],
            QMatrix::from_i64(&[[1, 0]]),
            vec![int(0)],
        )
        .unwrap();
        assert!(to_dsl(&p).is_err());
        // x, y := y, x + y works when y is assigned first.
        let q = LoopProgram::new(
            vec!["x".into(), "y".into()],
            QMatrix::from_i64(&[[0, 1], [1, 1]]),
            vec![int(1), int(-2)],
            QMatrix::from_i64(&[[1, -1]]),
            vec![int(3)],
        )
        .unwrap();
        let back = parse(&to_dsl(&q).unwrap()).unwrap();
        assert!(same_semantics(&q, &back));
    }

    #[test]
    fn affine_formatting() {
        let names: Vec<String> = vec!["x".into(), "y".into()];
        assert_eq!(format_affine(&[int(-1), int(2)], &names, &int(-3)), "-x + 2*y - 3");
        assert_eq!(format_affine(&[int(0), int(0)], &names, &int(0)), "0");
    }
}
