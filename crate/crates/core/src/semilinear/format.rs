//! Rendering of semi-linear sets: bracket text, JSON and SMT-LIB2.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{Atom, Cell, Normalized, Rel, SemiLinearSet};
use crate::arith::rational::{fmt_rational, serde_q, Rational};
use crate::error::{Error, Result};

/// `Σ c_i·name_i + constant` with unit coefficients elided.
pub fn linear_expr(coeffs: &[Rational], constant: &Rational, names: &[String]) -> String {
    let mut s = String::new();
    for (c, name) in coeffs.iter().zip(names) {
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
            s.push(if neg { '-' } else { '+' });
        }
        if !a.is_one() {
            s.push_str(&fmt_rational(&a));
            s.push('*');
        }
        s.push_str(name);
    }
    if !constant.is_zero() {
        if s.is_empty() {
            s.push_str(&fmt_rational(constant));
        } else {
            s.push(if constant.is_negative() { '-' } else { '+' });
            s.push_str(&fmt_rational(&constant.abs()));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Solves the atom for its first variable: `v<e`, `e<v` or `v==e`.
pub fn atom_text(a: &Atom, names: &[String]) -> String {
    let Some(i) = a.coeffs.iter().position(|c| !c.is_zero()) else {
        return match a.rel {
            Rel::EqZero => format!("0=={}", fmt_rational(&a.offset)),
            Rel::GtZero => format!("0<{}", fmt_rational(&a.offset)),
        };
    };
    let lead = a.coeffs[i].clone();
    // v = −(rest)/lead.
    let mut rest: Vec<Rational> = a.coeffs.iter().map(|c| -c / &lead).collect();
    rest[i] = Rational::zero();
    let constant = -&a.offset / &lead;
    let e = linear_expr(&rest, &constant, names);
    let v = &names[i];
    match a.rel {
        Rel::EqZero => format!("{v}=={e}"),
        Rel::GtZero if lead.is_negative() => format!("{v}<{e}"),
        Rel::GtZero => format!("{e}<{v}"),
    }
}

pub fn cell_text(c: &Cell, names: &[String]) -> String {
    if c.is_full() {
        return "[[true]]".into();
    }
    // Equalities first, each group ordered by leading variable.
    let mut atoms: Vec<&Atom> = c.atoms().iter().collect();
    atoms.sort_by_key(|a| (a.rel, a.coeffs.iter().position(|c| !c.is_zero())));
    let parts: Vec<String> = atoms.iter().map(|a| atom_text(a, names)).collect();
    format!("[[{}]]", parts.join(","))
}

/// `[[…]]OR[[…]]`, or `empty`.
pub fn to_text(s: &SemiLinearSet) -> String {
    if s.cells().is_empty() {
        return "empty".into();
    }
    s.cells().iter().map(|c| cell_text(c, s.names())).collect::<Vec<_>>().join("OR")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomJson {
    #[serde(with = "serde_q::vec")]
    pub coeffs: Vec<Rational>,
    #[serde(with = "serde_q")]
    pub offset: Rational,
    pub rel: Rel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetJson {
    pub dim: usize,
    pub vars: Vec<String>,
    pub cells: Vec<Vec<AtomJson>>,
}

pub fn to_json(s: &SemiLinearSet) -> SetJson {
    SetJson {
        dim: s.dim(),
        vars: s.names().to_vec(),
        cells: s
            .cells()
            .iter()
            .map(|c| {
                c.atoms()
                    .iter()
                    .map(|a| AtomJson { coeffs: a.coeffs.clone(), offset: a.offset.clone(), rel: a.rel })
                    .collect()
            })
            .collect(),
    }
}

pub fn from_json(j: &SetJson) -> Result<SemiLinearSet> {
    if j.vars.len() != j.dim {
        return Err(Error::Json("variable count differs from dim".into()));
    }
    let mut cells = Vec::new();
    for c in &j.cells {
        let items: Vec<Normalized> =
            c.iter().map(|a| Atom::make(a.coeffs.clone(), a.offset.clone(), a.rel)).collect();
        if let Some(cell) = Cell::from_normalized(items) {
            cells.push(cell);
        }
    }
    Ok(SemiLinearSet::from_cells(j.dim, cells)?.with_names(j.vars.clone()))
}

fn smt_rational(r: &Rational) -> String {
    let a = r.abs();
    let body = if a.is_integer() {
        format!("{}.0", a.numer())
    } else {
        format!("(/ {}.0 {}.0)", a.numer(), a.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn smt_atom(a: &Atom, names: &[String]) -> String {
    let mut terms: Vec<String> = a
        .coeffs
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| if c.is_one() { n.clone() } else { format!("(* {} {n})", smt_rational(c)) })
        .collect();
    if !a.offset.is_zero() || terms.is_empty() {
        terms.push(smt_rational(&a.offset));
    }
    let lhs = if terms.len() == 1 { terms.pop().unwrap() } else { format!("(+ {})", terms.join(" ")) };
    let op = match a.rel {
        Rel::EqZero => "=",
        Rel::GtZero => ">",
    };
    format!("({op} {lhs} 0.0)")
}

/// A QF_LRA script defining `ant` and asserting it.
pub fn to_smt2(s: &SemiLinearSet, name: &str) -> String {
    let mut out = String::from("(set-logic QF_LRA)\n");
    for n in s.names() {
        out.push_str(&format!("(declare-fun {n} () Real)\n"));
    }
    let cells: Vec<String> = s
        .cells()
        .iter()
        .map(|c| {
            if c.is_full() {
                "true".to_string()
            } else {
                let atoms: Vec<String> = c.atoms().iter().map(|a| smt_atom(a, s.names())).collect();
                format!("(and {})", atoms.join(" "))
            }
        })
        .collect();
    let body = match cells.len() {
        0 => "false".to_string(),
        1 => cells[0].clone(),
        _ => format!("(or {})", cells.join(" ")),
    };
    out.push_str(&format!("(define-fun {name} () Bool {body})\n(assert {name})\n(check-sat)\n"));
    out
}
