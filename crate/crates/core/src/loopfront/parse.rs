//! Recursive-descent parser for the loop language.
//!
//! ```text
//! program := 'while' '(' cond (('&&' | ',') cond)* ')' '{' (assign ';')* '}'
//! cond    := expr ('>' | '<') expr
//! assign  := ident ':=' expr
//! ```
//! Expressions are affine: `+ - * / ^`, parentheses, implicit multiplication
//! (`-7/20x`, `2(x+y)`) and decimal or fractional literals. `//` starts a
//! comment.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::LoopProgram;
use crate::arith::rational::{parse_rational, Rational};
use crate::arith::QMatrix;
use crate::error::{Error, Result};
use crate::semilinear::{Atom, Cell, Normalized, SemiLinearSet};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    AndAnd,
    Gt,
    Lt,
    Ge,
    Le,
    Assign,
    Eq,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        let (l0, c0) = (line, col);
        let adv = |k: usize, i: &mut usize, col: &mut usize| {
            *i += k;
            *col += k;
        };
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            adv(1, &mut i, &mut col);
            continue;
        }
        if ch == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let v = parse_rational(&text).ok_or_else(|| err(l0, c0, format!("bad number {text:?}")))?;
            out.push(Token { tok: Tok::Num(v), line: l0, col: c0 });
            continue;
        }
        if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, col: c0 });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (ch, next) {
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            (':', Some('=')) => (Tok::Assign, 2),
            ('=', Some('=')) => (Tok::Eq, 2),
            ('≥', _) => (Tok::Ge, 1),
            ('≤', _) => (Tok::Le, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('^', _) => (Tok::Caret, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            ('>', _) => (Tok::Gt, 1),
            ('<', _) => (Tok::Lt, 1),
            ('=', _) => (Tok::Eq, 1),
            _ => return Err(err(l0, c0, format!("unexpected character {ch:?}"))),
        };
        adv(len, &mut i, &mut col);
        out.push(Token { tok, line: l0, col: c0 });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// An affine expression `Σ coeff·var + constant` over named variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinExpr {
    pub coeffs: BTreeMap<String, Rational>,
    pub constant: Rational,
}

impl LinExpr {
    pub fn constant(c: Rational) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn var(name: &str) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), Rational::one());
        LinExpr { coeffs, constant: Rational::zero() }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &LinExpr) -> LinExpr {
        let mut r = self.clone();
        for (k, v) in &o.coeffs {
            *r.coeffs.entry(k.clone()).or_insert_with(Rational::zero) += v;
        }
        r.constant += &o.constant;
        r.clean()
    }

    pub fn scale(&self, s: &Rational) -> LinExpr {
        LinExpr {
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
            constant: &self.constant * s,
        }
        .clean()
    }

    pub fn neg(&self) -> LinExpr {
        self.scale(&-Rational::one())
    }

    fn clean(mut self) -> LinExpr {
        self.coeffs.retain(|_, v| !v.is_zero());
        self
    }

    pub fn coeff(&self, name: &str) -> Rational {
        self.coeffs.get(name).cloned().unwrap_or_else(Rational::zero)
    }

    /// Replaces every variable by its expression in `state`.
    pub fn substitute(&self, state: &BTreeMap<String, LinExpr>) -> LinExpr {
        let mut r = LinExpr::constant(self.constant.clone());
        for (k, v) in &self.coeffs {
            let e = state.get(k).cloned().unwrap_or_else(|| LinExpr::var(k));
            r = r.add(&e.scale(v));
        }
        r
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    order: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token> {
        let t = self.peek().clone();
        if t.tok == want {
            Ok(self.bump())
        } else {
            Err(err(t.line, t.col, format!("expected {what}, found {}", describe(&t.tok))))
        }
    }

    fn note_var(&mut self, name: &str) {
        if !self.order.iter().any(|v| v == name) {
            self.order.push(name.to_string());
        }
    }

    fn program(&mut self) -> Result<(Vec<(LinExpr, LinExpr)>, Vec<(String, LinExpr)>)> {
        let t = self.bump();
        if t.tok != Tok::Ident("while".into()) {
            return Err(err(t.line, t.col, format!("expected `while`, found {}", describe(&t.tok))));
        }
        self.expect(Tok::LParen, "`(`")?;
        let mut conds = vec![self.cond()?];
        while matches!(self.peek().tok, Tok::AndAnd | Tok::Comma) {
            self.bump();
            conds.push(self.cond()?);
        }
        self.expect(Tok::RParen, "`)` closing the guard")?;
        self.expect(Tok::LBrace, "`{`")?;
        let mut body = Vec::new();
        while self.peek().tok != Tok::RBrace {
            body.push(self.assign()?);
            match self.peek().tok {
                Tok::Semi => {
                    self.bump();
                }
                Tok::RBrace => {}
                _ => {
                    let t = self.peek().clone();
                    return Err(err(t.line, t.col, format!("expected `;`, found {}", describe(&t.tok))));
                }
            }
        }
        self.expect(Tok::RBrace, "`}`")?;
        let t = self.peek().clone();
        if t.tok != Tok::Eof {
            return Err(err(t.line, t.col, format!("unexpected {} after the loop", describe(&t.tok))));
        }
        Ok((conds, body))
    }

    /// Returns `(form, bound)` meaning `form > bound` after normalization.
    fn cond(&mut self) -> Result<(LinExpr, LinExpr)> {
        let lhs = self.expr()?;
        let t = self.bump();
        let rhs = self.expr()?;
        match t.tok {
            Tok::Gt => Ok((lhs, rhs)),
            Tok::Lt => Ok((rhs, lhs)),
            Tok::Ge | Tok::Le => Err(err(
                t.line,
                t.col,
                "non-strict comparison is not supported; conditions are strict. Over the integers \
                 `e >= d` can be written `e > d - 1`",
            )),
            other => Err(err(t.line, t.col, format!("expected `>` or `<`, found {}", describe(&other)))),
        }
    }

    fn assign(&mut self) -> Result<(String, LinExpr)> {
        let t = self.bump();
        let Tok::Ident(name) = t.tok else {
            return Err(err(t.line, t.col, format!("expected an assignment target, found {}", describe(&t.tok))));
        };
        if name == "while" {
            return Err(err(t.line, t.col, "nested loops are not supported"));
        }
        self.note_var(&name);
        let op = self.bump();
        match op.tok {
            Tok::Assign => {}
            Tok::Eq => return Err(err(op.line, op.col, "use `:=` for assignments")),
            other => return Err(err(op.line, op.col, format!("expected `:=`, found {}", describe(&other)))),
        }
        Ok((name, self.expr()?))
    }

    fn expr(&mut self) -> Result<LinExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LinExpr> {
        let mut acc = self.unary()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = multiply(&acc, &rhs, &t)?;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    if !rhs.is_constant() {
                        return Err(err(t.line, t.col, "division by a variable is not linear"));
                    }
                    if rhs.constant.is_zero() {
                        return Err(err(t.line, t.col, "division by zero"));
                    }
                    acc = acc.scale(&(Rational::one() / &rhs.constant));
                }
                // Juxtaposition: `2x`, `1/2y`, `3(x+1)`.
                Tok::Num(_) | Tok::Ident(_) | Tok::LParen => {
                    let rhs = self.power()?;
                    acc = multiply(&acc, &rhs, &t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<LinExpr> {
        match self.peek().tok {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<LinExpr> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        let t = self.bump();
        let e = self.unary()?;
        let k = if e.is_constant() && e.constant.is_integer() && !e.constant.is_negative() {
            e.constant.to_integer().to_u32()
        } else {
            None
        };
        let Some(k) = k else {
            return Err(err(t.line, t.col, "exponent must be a non-negative integer constant"));
        };
        if base.is_constant() {
            if base.constant.is_zero() && k == 0 {
                return Ok(LinExpr::constant(Rational::one()));
            }
            return Ok(LinExpr::constant(num_traits::pow(base.constant.clone(), k as usize)));
        }
        match k {
            0 => Ok(LinExpr::constant(Rational::one())),
            1 => Ok(base),
            _ => Err(err(t.line, t.col, "nonlinear term (power of a variable)")),
        }
    }

    fn atom(&mut self) -> Result<LinExpr> {
        let t = self.bump();
        match t.tok {
            Tok::Num(v) => Ok(LinExpr::constant(v)),
            Tok::Ident(name) => {
                if name == "while" {
                    return Err(err(t.line, t.col, "unexpected `while`"));
                }
                self.note_var(&name);
                Ok(LinExpr::var(&name))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            other => Err(err(t.line, t.col, format!("expected a number, variable or `(`, found {}", describe(&other)))),
        }
    }
}

fn multiply(a: &LinExpr, b: &LinExpr, at: &Token) -> Result<LinExpr> {
    if a.is_constant() {
        Ok(b.scale(&a.constant))
    } else if b.is_constant() {
        Ok(a.scale(&b.constant))
    } else {
        Err(err(at.line, at.col, "nonlinear term (product of variables)"))
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(v) => format!("number {v}"),
        Tok::Eof => "end of input".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Semi => "`;`".into(),
        Tok::Comma => "`,`".into(),
        Tok::AndAnd => "`&&`".into(),
        Tok::Gt => "`>`".into(),
        Tok::Lt => "`<`".into(),
        Tok::Ge => "`>=`".into(),
        Tok::Le => "`<=`".into(),
        Tok::Assign => "`:=`".into(),
        Tok::Eq => "`=`".into(),
    }
}

/// Composes sequential assignments into the simultaneous update
/// `x := A x + c` over the variables `vars`.
pub fn compose_sequential(vars: &[String], assignments: &[(String, LinExpr)]) -> Result<(QMatrix, Vec<Rational>)> {
    let mut state: BTreeMap<String, LinExpr> = vars.iter().map(|v| (v.clone(), LinExpr::var(v))).collect();
    for (target, e) in assignments {
        if let Some(unknown) = e.coeffs.keys().find(|k| !state.contains_key(*k)) {
            return Err(Error::InvalidProgram(format!("unknown variable {unknown}")));
        }
        if !state.contains_key(target) {
            return Err(Error::InvalidProgram(format!("unknown variable {target}")));
        }
        let v = e.substitute(&state);
        state.insert(target.clone(), v);
    }
    let n = vars.len();
    let mut a = QMatrix::zeros(n, n);
    let mut c = vec![Rational::zero(); n];
    for (i, v) in vars.iter().enumerate() {
        let e = &state[v];
        for (j, w) in vars.iter().enumerate() {
            a.set(i, j, e.coeff(w));
        }
        c[i] = e.constant.clone();
    }
    Ok((a, c))
}

/// Parses a loop; variables are ordered by first appearance in the guard,
/// then in the body.
pub fn parse(src: &str) -> Result<LoopProgram> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, order: Vec::new() };
    let (conds, body) = p.program()?;
    let vars = p.order.clone();
    let (a, c) = compose_sequential(&vars, &body)?;
    let m = conds.len();
    let mut f = QMatrix::zeros(m, vars.len());
    let mut b = vec![Rational::zero(); m];
    for (i, (form, bound)) in conds.iter().enumerate() {
        let d = form.add(&bound.neg());
        for (j, v) in vars.iter().enumerate() {
            f.set(i, j, d.coeff(v));
        }
        b[i] = -d.constant.clone();
    }
    LoopProgram::new(vars, a, c, f, b)
}

/// Parses a set written as `[[atom, …]]OR[[…]]` (also `true` cells and
/// `empty`), with atoms `e < e`, `e > e`, `e == e` or `e = e` over `names`.
pub fn parse_locus(src: &str, names: &[String]) -> Result<SemiLinearSet> {
    let n = names.len();
    let text = src.trim();
    if text == "empty" {
        return Ok(SemiLinearSet::empty(n).with_names(names.to_vec()));
    }
    let mut cells = Vec::new();
    for piece in text.split("OR") {
        let body = piece
            .trim()
            .strip_prefix("[[")
            .and_then(|p| p.strip_suffix("]]"))
            .ok_or_else(|| err(1, 1, format!("cell {piece:?} is not of the form [[...]]")))?;
        if body.trim() == "true" {
            cells.push(Cell::full());
            continue;
        }
        let mut items = Vec::new();
        for atom in body.split(',') {
            items.push(parse_atom(atom, names)?);
        }
        if let Some(c) = Cell::from_normalized(items) {
            cells.push(c);
        }
    }
    Ok(SemiLinearSet::from_cells(n, cells)?.with_names(names.to_vec()))
}

fn parse_atom(src: &str, names: &[String]) -> Result<Normalized> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, order: Vec::new() };
    let lhs = p.expr()?;
    let op = p.bump();
    let rhs = p.expr()?;
    let end = p.peek().clone();
    if end.tok != Tok::Eof {
        return Err(err(end.line, end.col, format!("unexpected {} in constraint", describe(&end.tok))));
    }
    if let Some(v) = p.order.iter().find(|v| !names.contains(v)) {
        return Err(err(op.line, op.col, format!("unknown variable {v}")));
    }
    let d = lhs.add(&rhs.neg());
    let coeffs: Vec<Rational> = names.iter().map(|v| d.coeff(v)).collect();
    let c = d.constant.clone();
    match op.tok {
        Tok::Gt => Ok(Atom::gt(coeffs, c)),
        Tok::Lt => Ok(Atom::gt(coeffs.iter().map(|x| -x).collect(), -c)),
        Tok::Eq => Ok(Atom::eq(coeffs, c)),
        other => Err(err(op.line, op.col, format!("expected a comparison, found {}", describe(&other)))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::{int, rat};

    const EXAMPLE: &str = "while(x-1/2y-2z>0){
 x:=-20x-9y+75z;
 y:=-7/20x+97/20y+21/4z;
 z:=35/97x+3/97y-40/97z;}";

    #[test]
    fn example_loop_matrices() {
        let p = parse(EXAMPLE).unwrap();
        assert_eq!(p.var_names, vec!["x", "y", "z"]);
        assert_eq!(p.a, QMatrix::from_i64(&[[-20, -9, 75], [7, 8, -21], [-7, -3, 26]]));
        assert_eq!(p.f.row(0).to_vec(), vec![int(1), rat(-1, 2), int(-2)]);
        assert_eq!(p.b, vec![int(0)]);
        assert!(p.c.iter().all(|v| v.is_zero()));
    }

    #[test]
    fn rotation_prefix() {
        let p = parse("while (3t + 7s > 0) { t := t - s; s := t + 2s; }").unwrap();
        assert_eq!(p.a, QMatrix::from_i64(&[[1, -1], [1, 1]]));
    }

    #[test]
    fn identity_loop_and_constant_folding() {
        let p = parse("while (x > 0) { x := x; }").unwrap();
        assert!(p.a.is_identity());
        let q = parse("while (x - 1 > 2) { x := x; }").unwrap();
        assert_eq!(q.f.row(0).to_vec(), vec![int(1)]);
        assert_eq!(q.b, vec![int(3)]);
    }

    #[test]
    fn affine_assignment() {
        let p = parse("while (x > 0) { x := 2x + 1; }").unwrap();
        assert_eq!(p.a, QMatrix::from_i64(&[[2]]));
        assert_eq!(p.c, vec![int(1)]);
    }

    #[test]
    fn comparisons_on_either_side() {
        let p = parse("while (1 < x, 2x < 3 + y && y > 0.5) { x := x; y := y; }").unwrap();
        assert_eq!(p.f, QMatrix::from_rows(vec![vec![int(1), int(0)], vec![int(-2), int(1)], vec![int(0), int(1)]]).unwrap());
        assert_eq!(p.b, vec![int(1), int(-3), rat(1, 2)]);
    }

    #[test]
    fn powers_and_comments() {
        let p = parse("// shift loop\nwhile (-x > -2^(30)) { x := 2*x; // doubled\n y := y + 1 }").unwrap();
        assert_eq!(p.b, vec![-Rational::from_integer((1i64 << 30).into())]);
    }

    #[test]
    fn errors_carry_positions() {
        match parse("while (x > 0) {\n  x := x*y;\n}") {
            Err(Error::Parse { line: 2, msg, .. }) => assert!(msg.contains("nonlinear")),
            other => panic!("unexpected {other:?}"),
        }
        match parse("while (x >= 0) { x := x; }") {
            Err(Error::Parse { line: 1, col: 10, msg }) => assert!(msg.contains("e > d - 1")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("while (x > 0) { x = x; }"), Err(Error::Parse { .. })));
        assert!(matches!(parse("while (x > 0) { x := x^2; }"), Err(Error::Parse { .. })));
        assert!(matches!(parse("while (x > 0) { x := x / y; }"), Err(Error::Parse { .. })));
        assert!(matches!(parse("while (x > 0) { x := x; } extra"), Err(Error::Parse { .. })));
    }

    #[test]
    fn locus_text_round_trips() {
        let names: Vec<String> = vec!["u1".into(), "u2".into(), "u3".into()];
        let text = "[[u1<-u2+3*u3]]OR[[u1==-u2+3*u3,-u3<u2]]OR[[u1==4*u3,u2==-u3,0<u3]]";
        let s = parse_locus(text, &names).unwrap();
        assert_eq!(crate::semilinear::format::to_text(&s), text);
        assert!(parse_locus("empty", &names).unwrap().is_trivially_empty());
        assert!(parse_locus("[[v<0]]", &names).is_err());
    }

    #[test]
    fn sequential_composition_uses_new_values() {
        let vars: Vec<String> = vec!["x".into(), "y".into()];
        let body = vec![
            ("x".to_string(), LinExpr::var("x").add(&LinExpr::var("y"))),
            ("y".to_string(), LinExpr::var("x").add(&LinExpr::constant(int(1)))),
        ];
        let (a, c) = compose_sequential(&vars, &body).unwrap();
        assert_eq!(a, QMatrix::from_i64(&[[1, 1], [1, 1]]));
        assert_eq!(c, vec![int(0), int(1)]);
    }
}
