//! Dense matrices over the rationals.
//!
//! Elimination runs on primitive integer rows (cross-multiplication followed by
//! content removal), so intermediate values stay integral and small.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::{fmt_rational, from_bigint, int, lcm_of_denominators, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    /// Builds a matrix from rows; a zero-row input gives the 0x0 matrix.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds an `n x k` matrix from `k` columns of length `n`.
    pub fn from_columns(n: usize, cols: &[Vec<Rational>]) -> Result<Self> {
        let mut m = Self::zeros(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch("column length".into()));
            }
            for (i, v) in col.iter().enumerate() {
                m.data[i * cols.len() + j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn from_i64<const C: usize>(rows: &[[i64; C]]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().map(|&v| int(v))).collect();
        QMatrix { rows: rows.len(), cols: C, data }
    }

    pub fn column_vector(v: Vec<Rational>) -> Self {
        QMatrix { rows: v.len(), cols: 1, data: v }
    }

    pub fn row_vector(v: Vec<Rational>) -> Self {
        QMatrix { rows: 1, cols: v.len(), data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn checked_mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `M·v` for a column vector given as a slice.
    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension");
        (0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect()
    }

    /// `v·M` for a row vector given as a slice.
    pub fn vec_mul(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.rows, "vec_mul dimension");
        let mut out = vec![Rational::zero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o += vi * a;
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn pow(&self, mut k: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn hstack(&self, other: &QMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row count".into()));
        }
        let rows = (0..self.rows)
            .map(|i| self.row(i).iter().chain(other.row(i)).cloned().collect())
            .collect();
        Ok(QMatrix { rows: self.rows, cols: self.cols + other.cols, data: flatten(rows) })
    }

    pub fn vstack(&self, other: &QMatrix) -> Result<Self> {
        if self.cols != other.cols && self.rows != 0 && other.rows != 0 {
            return Err(Error::DimensionMismatch("vstack column count".into()));
        }
        let cols = if self.rows == 0 { other.cols } else { self.cols };
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(QMatrix { rows: self.rows + other.rows, cols, data })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let data = idx.iter().flat_map(|&i| self.row(i).iter().cloned()).collect();
        QMatrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m.data[i * idx.len() + jj] = self.get(i, j).clone();
            }
        }
        m
    }

    /// Reduced row echelon form with pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows).map(|i| integer_row(self.row(i))).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            // Lowest index among rows with a nonzero entry; ties go to the smallest row.
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let prow = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r {
                    eliminate(row, &prow, c);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut out = Self::zeros(self.rows, self.cols);
        for (i, &c) in pivots.iter().enumerate() {
            let piv = from_bigint(rows[i][c].clone());
            for j in 0..self.cols {
                if !rows[i][j].is_zero() {
                    out.data[i * self.cols + j] = from_bigint(rows[i][j].clone()) / &piv;
                }
            }
        }
        (out, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Null-space basis as column vectors, in reduced echelon form (each basis
    /// vector has a leading one in a position where the others vanish).
    pub fn kernel_basis(&self) -> Vec<QMatrix> {
        self.kernel_vectors().into_iter().map(QMatrix::column_vector).collect()
    }

    /// Null-space basis as plain vectors, echelonized as in `kernel_basis`.
    pub fn kernel_vectors(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, f).clone();
            }
            basis.push(v);
        }
        echelonize(basis)
    }

    /// Columns form a basis of the kernel (`cols x dim` matrix).
    pub fn kernel_matrix(&self) -> QMatrix {
        let vs = self.kernel_vectors();
        QMatrix::from_columns(self.cols, &vs).expect("kernel columns")
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Rational::one());
        }
        // Bareiss on the row-scaled integer matrix.
        let mut scale = Rational::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let l = lcm_of_denominators(self.row(i).iter());
            scale *= from_bigint(l.clone());
            m.push(self.row(i).iter().map(|x| (x * from_bigint(l.clone())).to_integer()).collect());
        }
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(p) => {
                        m.swap(k, p);
                        sign = -sign;
                    }
                    None => return Ok(Rational::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        Ok(from_bigint(sign * &m[n - 1][n - 1]) / scale)
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Self::zeros(0, 0));
        }
        let aug = self.hstack(&Self::identity(n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Ok(r.select_cols(&idx))
    }

    /// Some solution of `M·x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows, "solve dimension");
        let aug = self.hstack(&QMatrix::column_vector(b.to_vec())).ok()?;
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Reduced echelon form of a list of vectors, zero rows removed.
pub fn echelonize(vectors: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return vectors;
    }
    let m = QMatrix::from_rows(vectors).expect("equal lengths");
    let (r, pivots) = m.rref();
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

fn flatten(rows: Vec<Vec<Rational>>) -> Vec<Rational> {
    rows.into_iter().flatten().collect()
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = lcm_of_denominators(row.iter());
    let l = from_bigint(l);
    let v: Vec<BigInt> = row.iter().map(|x| (x * &l).to_integer()).collect();
    make_primitive(v)
}

fn make_primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// `row ← piv·row − row[c]·prow`, then divide by the content.
fn eliminate(row: &mut Vec<BigInt>, prow: &[BigInt], c: usize) {
    if row[c].is_zero() {
        return;
    }
    let a = &prow[c];
    let b = row[c].clone();
    let g = a.gcd(&b);
    let (a, b) = (a / &g, b / &g);
    let a = if a.is_negative() { (-a, -b) } else { (a, b) };
    let (a, b) = a;
    let new: Vec<BigInt> = row
        .iter()
        .zip(prow)
        .map(|(x, p)| &a * x - &b * p)
        .collect();
    *row = make_primitive(new);
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        self.checked_mul(rhs).expect("matrix product dimensions")
    }
}

impl Add for &QMatrix {
    type Output = QMatrix;
    fn add(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum dimensions");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Sub for &QMatrix {
    type Output = QMatrix;
    fn sub(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix difference dimensions");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(fmt_rational).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;

    fn m(rows: &[[i64; 3]]) -> QMatrix {
        QMatrix::from_i64(rows)
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let k = QMatrix::zeros(3, 3).kernel_basis();
        assert_eq!(k.len(), 3);
        assert_eq!(QMatrix::from_columns(3, &k.iter().map(|c| c.col(0)).collect::<Vec<_>>()).unwrap(), QMatrix::identity(3));
    }

    #[test]
    fn identity_kernel_is_trivial() {
        assert!(QMatrix::identity(4).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_vectors_annihilate_and_rank_nullity_holds() {
        let a = m(&[[1, 2, 3], [2, 4, 6], [1, 0, 1]]);
        let k = a.kernel_basis();
        assert_eq!(a.rank() + k.len(), 3);
        for v in &k {
            assert!((&a * v).is_zero());
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[[2, 1, 0], [0, 1, 3], [1, 0, 1]]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        assert!((&inv * &a).is_identity());
        assert_eq!(m(&[[1, 2, 3], [2, 4, 6], [0, 0, 1]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn determinant_matches_known_value() {
        let a = m(&[[-20, -9, 75], [7, 8, -21], [-7, -3, 26]]);
        assert_eq!(a.det().unwrap(), int(40));
        let b = QMatrix::from_rows(vec![vec![rat(1, 2), int(1)], vec![int(3), rat(1, 3)]]).unwrap();
        assert_eq!(b.det().unwrap(), rat(1, 6) - int(3));
    }

    #[test]
    fn solve_finds_a_solution_or_none() {
        let a = m(&[[1, 1, 0], [0, 1, 1], [1, 2, 1]]);
        let x = a.solve(&[int(1), int(2), int(3)]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![int(1), int(2), int(3)]);
        assert!(a.solve(&[int(1), int(2), int(4)]).is_none());
    }

    #[test]
    fn power_by_squaring_matches_iteration() {
        let a = m(&[[1, 1, 0], [0, 1, 1], [0, 0, 1]]);
        let mut it = QMatrix::identity(3);
        for k in 0..12 {
            assert_eq!(a.pow(k).unwrap(), it);
            it = &it * &a;
        }
    }

    #[test]
    fn rref_is_reduced() {
        let a = m(&[[0, 2, 4], [1, 1, 1], [2, 4, 6]]);
        let (r, piv) = a.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r, m(&[[1, 0, -1], [0, 1, 2], [0, 0, 0]]));
    }
}
