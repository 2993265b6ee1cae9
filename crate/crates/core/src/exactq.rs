//! Dense matrices over the rationals with exact row reduction.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse rational '{0}'")]
    Parse(String),
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p", "p/q" or "-p/q".
pub fn parse_q(s: &str) -> Result<Q, ExactError> {
    let t = s.trim();
    let bad = || ExactError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut s = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// Row-major dense rational matrix. `BigRational` keeps every entry reduced
/// with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

/// Result of [`RatMatrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref {
    pub rank: usize,
    pub r: RatMatrix,
    pub pivots: Vec<usize>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(fmt_q).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "] ({}x{})", self.rows, self.cols)
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Q::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must share `cols` entries.
    pub fn from_rows(rows: Vec<Vec<Q>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        RatMatrix { rows: r, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_cols(cols: &[Vec<Q>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = x.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect(), cols)
    }

    pub fn diag(entries: &[Q]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m.data[i * n + i] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Q>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
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

    pub fn mul(&self, other: &RatMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape");
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
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn add(&self, other: &RatMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &RatMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &Q) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// Overwrites the block starting at `(r0, c0)` with `b`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &RatMatrix) {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn hstack(&self, other: &RatMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "hstack rows");
        let cols = self.cols + other.cols;
        let mut m = Self::zeros(self.rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[i * cols + j] = self.get(i, j).clone();
            }
            for j in 0..other.cols {
                m.data[i * cols + self.cols + j] = other.get(i, j).clone();
            }
        }
        m
    }

    pub fn vstack(&self, other: &RatMatrix) -> Self {
        assert_eq!(self.cols, other.cols, "vstack cols");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, other: &RatMatrix) -> Self {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let cols: Vec<Vec<Q>> = idx.iter().map(|&j| self.col(j)).collect();
        Self::from_cols(&cols, self.rows)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }

    /// Reduced row echelon form; pivots are the first nonzero entries in column order.
    pub fn rref(&self) -> Rref {
        let mut rows: Vec<Vec<Q>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = rows[r][c].recip();
            if !inv.is_one() {
                for x in rows[r][c..].iter_mut() {
                    *x *= &inv;
                }
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { rank: r, r: Self::from_rows(rows, self.cols), pivots }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().rank
    }

    /// Columns span the null space; one column per free variable, in column order.
    pub fn kernel_basis(&self) -> RatMatrix {
        let rr = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        let mut k = Self::zeros(self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            k.set(f, j, Q::one());
            for (i, &p) in rr.pivots.iter().enumerate() {
                let v = rr.r.get(i, f);
                if !v.is_zero() {
                    k.set(p, j, -v);
                }
            }
        }
        k
    }

    /// Some x with M·x = b, or `None` when b is outside the column space.
    pub fn solve(&self, b: &[Q]) -> Result<Option<Vec<Q>>, ExactError> {
        if b.len() != self.rows {
            return Err(ExactError::Dimension(format!(
                "right-hand side has length {} but matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let aug = self.hstack(&Self::from_cols(&[b.to_vec()], self.rows));
        let rr = aug.rref();
        if rr.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![Q::zero(); self.cols];
        for (i, &p) in rr.pivots.iter().enumerate() {
            x[p] = rr.r.get(i, self.cols).clone();
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Self::zeros(0, 0));
        }
        let rr = self.hstack(&Self::identity(n)).rref();
        if rr.pivots.len() < n || rr.pivots[n - 1] != n - 1 {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        Some(rr.r.select_cols(&idx))
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        let mut a: Vec<Vec<Q>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= &a[c][c];
            let piv = a[c].clone();
            for row in a.iter_mut().skip(c + 1) {
                if row[c].is_zero() {
                    continue;
                }
                let f = &row[c] / &piv[c];
                for (x, p) in row[c..].iter_mut().zip(&piv[c..]) {
                    *x -= &f * p;
                }
            }
        }
        det
    }

    /// Indices of a maximal independent subset of the columns, chosen greedily left to right.
    pub fn independent_cols(&self) -> Vec<usize> {
        self.rref().pivots
    }

    /// Basis of the column space made of original columns.
    pub fn col_space(&self) -> RatMatrix {
        let p = self.independent_cols();
        self.select_cols(&p)
    }

    pub fn max_abs_entry(&self) -> Q {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
    }
}

/// Greedy extension of the column span of `sub` by columns of `sup`, in order.
/// Returns the indices of the columns of `sup` that were added.
pub fn extend_basis(sub: &RatMatrix, sup: &RatMatrix) -> Vec<usize> {
    let k = sub.cols();
    let piv = sub.hstack(sup).rref().pivots;
    piv.into_iter().filter(|&p| p >= k).map(|p| p - k).collect()
}

/// Standard basis vectors completing the column span of `sub` to the whole space.
pub fn complement_std(sub: &RatMatrix) -> Vec<usize> {
    extend_basis(sub, &RatMatrix::identity(sub.rows()))
}

/// For a matrix `b` with independent columns, a matrix `c` with `c·b = I`.
/// Rows come from the inverse of `b` completed by standard vectors, so `c`
/// kills the chosen standard complement.
pub fn coordinate_map(b: &RatMatrix) -> RatMatrix {
    let n = b.rows();
    let k = b.cols();
    let extra = complement_std(b);
    let full = b.hstack(&RatMatrix::identity(n).select_cols(&extra));
    let inv = full.inverse().expect("columns must be independent");
    let idx: Vec<usize> = (0..k).collect();
    inv.select_rows(&idx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_examples() {
        let r = RatMatrix::identity(3).rref();
        assert_eq!((r.rank, r.pivots), (3, vec![0, 1, 2]));
        let r = RatMatrix::zeros(2, 5).rref();
        assert_eq!((r.rank, r.pivots.len()), (0, 0));
        let r = RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.r, RatMatrix::from_i64(&[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(RatMatrix::identity(2).kernel_basis().cols(), 0);
        assert_eq!(RatMatrix::zeros(1, 3).kernel_basis().cols(), 3);
        let k = RatMatrix::from_i64(&[&[1, 2]]).kernel_basis();
        assert_eq!(k, RatMatrix::from_i64(&[&[-2], &[1]]));
    }

    #[test]
    fn solve_examples() {
        let x = RatMatrix::identity(2).solve(&[q(3), q(5)]).unwrap().unwrap();
        assert_eq!(x, vec![q(3), q(5)]);
        let m = RatMatrix::from_i64(&[&[1, 1]]);
        let x = m.solve(&[q(2)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(2)]);
        let m = RatMatrix::from_i64(&[&[1], &[0]]);
        assert_eq!(m.solve(&[q(0), q(1)]).unwrap(), None);
        assert!(m.solve(&[q(0)]).is_err());
    }

    #[test]
    fn empty_shapes() {
        let m = RatMatrix::zeros(0, 3);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.kernel_basis().cols(), 3);
        let m = RatMatrix::zeros(3, 0);
        assert_eq!(m.kernel_basis().cols(), 0);
        assert_eq!(m.solve(&[q(0), q(0), q(0)]).unwrap(), Some(vec![]));
        assert_eq!(m.solve(&[q(1), q(0), q(0)]).unwrap(), None);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("-6/4").unwrap(), qf(-3, 2));
        assert_eq!(fmt_q(&qf(-3, 2)), "-3/2");
        assert_eq!(fmt_q(&q(7)), "7");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn inverse_and_det() {
        let m = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.det(), q(1));
        assert_eq!(m.mul(&m.inverse().unwrap()), RatMatrix::identity(2));
        assert!(RatMatrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn coordinates_and_complements() {
        let b = RatMatrix::from_i64(&[&[1], &[1], &[0]]);
        assert_eq!(complement_std(&b), vec![0, 2]);
        let c = coordinate_map(&b);
        assert_eq!(c.mul(&b), RatMatrix::identity(1));
    }
}
