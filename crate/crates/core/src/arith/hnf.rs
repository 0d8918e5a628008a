//! Row-style Hermite normal form and integer solutions of linear systems.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::QMatrix;
use super::rational::{from_bigint, Rational};
use crate::error::{Error, Result};

/// Returns `(H, U)` with `U·M = H`, `U` unimodular and `H` in row Hermite form:
/// positive pivots, zeros below each pivot, entries above a pivot in `[0, pivot)`.
pub fn hermite_normal_form(m: &QMatrix) -> Result<(QMatrix, QMatrix)> {
    if !m.is_integral() {
        return Err(Error::NotIntegral);
    }
    let (r, c) = (m.rows(), m.cols());
    let mut h: Vec<Vec<BigInt>> = (0..r)
        .map(|i| m.row(i).iter().map(|x| x.to_integer()).collect())
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..r).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut row = 0;
    for col in 0..c {
        if row == r {
            break;
        }
        for i in row + 1..r {
            if h[i][col].is_zero() {
                continue;
            }
            let a = h[row][col].clone();
            let b = h[i][col].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (ag, bg) = (&a / &g, &b / &g);
            combine(&mut h, row, i, &x, &y, &bg, &ag);
            combine(&mut u, row, i, &x, &y, &bg, &ag);
        }
        if h[row][col].is_zero() {
            continue;
        }
        if h[row][col].is_negative() {
            negate(&mut h[row]);
            negate(&mut u[row]);
        }
        let piv = h[row][col].clone();
        for i in 0..row {
            let q = h[i][col].div_floor(&piv);
            if !q.is_zero() {
                sub_multiple(&mut h, i, row, &q);
                sub_multiple(&mut u, i, row, &q);
            }
        }
        row += 1;
    }
    Ok((to_matrix(&h, c), to_matrix(&u, r)))
}

/// `R_p ← x·R_p + y·R_q`, `R_q ← −b·R_p + a·R_q` (determinant one).
fn combine(m: &mut [Vec<BigInt>], p: usize, q: usize, x: &BigInt, y: &BigInt, b: &BigInt, a: &BigInt) {
    let rp = m[p].clone();
    let rq = m[q].clone();
    for j in 0..rp.len() {
        m[p][j] = x * &rp[j] + y * &rq[j];
        m[q][j] = a * &rq[j] - b * &rp[j];
    }
}

fn negate(row: &mut [BigInt]) {
    for v in row.iter_mut() {
        *v = -v.clone();
    }
}

fn sub_multiple(m: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    let s = m[src].clone();
    for (t, v) in m[target].iter_mut().zip(&s) {
        *t -= q * v;
    }
}

fn to_matrix(rows: &[Vec<BigInt>], cols: usize) -> QMatrix {
    let data = rows.iter().flat_map(|r| r.iter().map(|v| from_bigint(v.clone()))).collect();
    QMatrix::new(rows.len(), cols, data).expect("shape")
}

/// Integer solutions of `C·x = d`, as `x = x0 + N·t` with `t` ranging over all
/// integer vectors; `None` when no integer solution exists. `C` and `d` must be
/// integral.
pub fn integer_solutions(c: &QMatrix, d: &[Rational]) -> Result<Option<(Vec<Rational>, QMatrix)>> {
    let (m, n) = (c.rows(), c.cols());
    if d.len() != m {
        return Err(Error::DimensionMismatch("right-hand side length".into()));
    }
    if !d.iter().all(|x| x.is_integer()) {
        return Err(Error::NotIntegral);
    }
    let (h, u) = hermite_normal_form(&c.transpose())?;
    // Pivot columns of the echelon rows of H.
    let mut pivots = Vec::new();
    for i in 0..n {
        match (0..m).find(|&j| !h.get(i, j).is_zero()) {
            Some(p) => pivots.push(p),
            None => break,
        }
    }
    let rank = pivots.len();
    let mut y = vec![Rational::zero(); n];
    for (j, &p) in pivots.iter().enumerate() {
        let mut rhs = d[p].clone();
        for (i, yi) in y.iter().enumerate().take(j) {
            rhs -= h.get(i, p) * yi;
        }
        let v = rhs / h.get(j, p);
        if !v.is_integer() {
            return Ok(None);
        }
        y[j] = v;
    }
    // Remaining equations must hold too.
    for e in 0..m {
        let lhs: Rational = (0..rank).map(|j| h.get(j, e) * &y[j]).sum();
        if lhs != d[e] {
            return Ok(None);
        }
    }
    let ut = u.transpose();
    let x0 = ut.mul_vec(&y);
    let free: Vec<usize> = (rank..n).collect();
    Ok(Some((x0, ut.select_cols(&free))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;

    fn check_form(m: &QMatrix) {
        let (h, u) = hermite_normal_form(m).unwrap();
        assert_eq!(&u * m, h);
        assert_eq!(u.det().unwrap().abs(), int(1));
        let mut last_pivot: Option<usize> = None;
        let mut zero_seen = false;
        for i in 0..h.rows() {
            match (0..h.cols()).find(|&j| !h.get(i, j).is_zero()) {
                Some(p) => {
                    assert!(!zero_seen, "nonzero row after a zero row");
                    assert!(last_pivot.is_none_or(|lp| p > lp));
                    assert!(h.get(i, p) > &int(0));
                    for k in 0..i {
                        assert!(h.get(k, p) >= &int(0) && h.get(k, p) < h.get(i, p));
                    }
                    for k in i + 1..h.rows() {
                        assert_eq!(h.get(k, p), &int(0));
                    }
                    last_pivot = Some(p);
                }
                None => zero_seen = true,
            }
        }
    }

    #[test]
    fn identity_is_fixed() {
        let (h, u) = hermite_normal_form(&QMatrix::identity(3)).unwrap();
        assert!(h.is_identity() && u.is_identity());
    }

    #[test]
    fn small_matrix_form() {
        check_form(&QMatrix::from_i64(&[[2, 4], [1, 3]]));
        check_form(&QMatrix::from_i64(&[[6, 4, 2], [3, 9, 12], [0, 0, 5], [4, -2, 7]]));
        check_form(&QMatrix::from_i64(&[[0, 0], [0, -3]]));
    }

    #[test]
    fn single_entry() {
        let (h, _) = hermite_normal_form(&QMatrix::from_i64(&[[2]])).unwrap();
        assert_eq!(h, QMatrix::from_i64(&[[2]]));
        assert_eq!(integer_solutions(&QMatrix::from_i64(&[[2]]), &[int(1)]).unwrap(), None);
    }

    #[test]
    fn integer_solution_lattice() {
        // 2x + 4y = 6 has solutions (3 - 2t, t).
        let c = QMatrix::from_i64(&[[2, 4]]);
        let (x0, n) = integer_solutions(&c, &[int(6)]).unwrap().unwrap();
        assert_eq!(c.mul_vec(&x0), vec![int(6)]);
        assert_eq!(n.cols(), 1);
        assert!((&c * &n).is_zero());
        // 2x + 4y = 5 has none.
        assert_eq!(integer_solutions(&c, &[int(5)]).unwrap(), None);
    }

    #[test]
    fn rejects_fractions() {
        let m = QMatrix::from_rows(vec![vec![crate::arith::rational::rat(1, 2)]]).unwrap();
        assert_eq!(hermite_normal_form(&m), Err(Error::NotIntegral));
    }
}
