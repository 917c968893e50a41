//! Dense row-major matrices over a [`Ring`], with exact (or tolerance-aware)
//! linear algebra when the entries form a [`Scalar`] field.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Backend, Involution, Ring, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![R::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = R::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::validation("matrix rows have unequal lengths"));
        }
        Ok(Matrix {
            rows: n,
            cols: if n == 0 { 0 } else { m },
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix whose columns are the given vectors (of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<R>]) -> Self {
        Matrix::from_fn(rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn diagonal(entries: &[R]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
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

    pub fn row(&self, i: usize) -> Vec<R> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<R>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &R> {
        self.data.iter()
    }

    pub fn map<T: Ring>(&self, f: impl FnMut(&R) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    /// Matrix product; panics on a dimension mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product of {}x{} and {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let cur = std::mem::replace(&mut out[(i, j)], R::zero());
                        out[(i, j)] = cur + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|a| s.clone() * a.clone())
    }

    pub fn pow(&self, n: u32) -> Self {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[&Matrix<R>]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Sub-matrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += c * row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, c: &R) {
        for j in 0..self.cols {
            let s = &self[(src, j)];
            if !s.is_zero() {
                let v = c.clone() * s.clone();
                let cur = std::mem::replace(&mut self[(dst, j)], R::zero());
                self[(dst, j)] = cur + v;
            }
        }
    }

    /// `col[dst] += c * col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, c: &R) {
        for i in 0..self.rows {
            let s = &self[(i, src)];
            if !s.is_zero() {
                let v = s.clone() * c.clone();
                let cur = std::mem::replace(&mut self[(i, dst)], R::zero());
                self[(i, dst)] = cur + v;
            }
        }
    }

    /// Determinant by Laplace expansion. Works over any ring (for example
    /// Laurent polynomials); intended for small matrices.
    pub fn det_laplace(&self) -> R {
        assert!(self.is_square());
        let n = self.rows;
        match n {
            0 => R::one(),
            1 => self[(0, 0)].clone(),
            2 => {
                self[(0, 0)].clone() * self[(1, 1)].clone()
                    - self[(0, 1)].clone() * self[(1, 0)].clone()
            }
            _ => {
                let mut acc = R::zero();
                for j in 0..n {
                    let a = &self[(0, j)];
                    if a.is_zero() {
                        continue;
                    }
                    let rows: Vec<usize> = (1..n).collect();
                    let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                    let minor = self.select(&rows, &cols).det_laplace();
                    let term = a.clone() * minor;
                    acc = if j % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }
}

impl<R: Ring + Involution> Matrix<R> {
    /// Entrywise involution.
    pub fn conj(&self) -> Self {
        self.map(Involution::conj)
    }

    /// Involution followed by transposition.
    pub fn conj_transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }
}

/// Result of a reduced row echelon computation.
pub struct Echelon<S> {
    pub reduced: Matrix<S>,
    pub pivots: Vec<usize>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| S::from_i64(x)).collect())
                .collect(),
        )
    }

    pub fn with_backend(&self, backend: &Backend) -> Self {
        self.map(|x| x.clone().with_backend(backend))
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b))
    }

    /// Reduced row echelon form. Pivots are chosen by the largest
    /// [`Scalar::pivot_score`] in each column.
    pub fn rref(&self) -> Echelon<S> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best: Option<(usize, f64)> = None;
            for i in r..m.rows {
                let s = m[(i, c)].pivot_score();
                if !m[(i, c)].is_zero() && best.map_or(true, |(_, b)| s > b) {
                    best = Some((i, s));
                }
            }
            let Some((p, _)) = best else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = std::mem::replace(&mut m[(r, j)], S::zero());
                m[(r, j)] = v * inv.clone();
            }
            m[(r, c)] = S::one();
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = -m[(i, c)].clone();
                    m.add_row_multiple(i, r, &f);
                    m[(i, c)] = S::zero();
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel `{x : A x = 0}` as the columns of a matrix.
    pub fn kernel(&self) -> Matrix<S> {
        let Echelon { reduced, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis[(f, k)] = S::one();
            for (r, &p) in pivots.iter().enumerate() {
                basis[(p, k)] = -reduced[(r, f)].clone();
            }
        }
        basis
    }

    /// Columns forming a basis of the column space (a subset of the original
    /// columns).
    pub fn column_basis(&self) -> Matrix<S> {
        let pivots = self.rref().pivots;
        self.select(&(0..self.rows).collect::<Vec<_>>(), &pivots)
    }

    /// Some `X` with `A X = B`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &Matrix<S>) -> Option<Matrix<S>> {
        assert_eq!(self.rows, b.rows);
        let aug = Matrix::from_fn(self.rows, self.cols + b.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[(i, j - self.cols)].clone()
            }
        });
        let Echelon { reduced, pivots } = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (r, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(p, j)] = reduced[(r, self.cols + j)].clone();
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<S>> {
        if !self.is_square() {
            return None;
        }
        let x = self.solve(&Matrix::identity(self.rows))?;
        (self.rank() == self.rows).then_some(x)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && (S::certify_invertible(self) || self.rank() == self.rows)
    }

    pub fn det(&self) -> S {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = S::one();
        for c in 0..n {
            let mut best: Option<(usize, f64)> = None;
            for i in c..n {
                let s = m[(i, c)].pivot_score();
                if !m[(i, c)].is_zero() && best.map_or(true, |(_, b)| s > b) {
                    best = Some((i, s));
                }
            }
            let Some((p, _)) = best else {
                return S::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)].clone();
            let inv = pivot.inv().expect("pivot is nonzero");
            for i in c + 1..n {
                if !m[(i, c)].is_zero() {
                    let f = -(m[(i, c)].clone() * inv.clone());
                    m.add_row_multiple(i, c, &f);
                }
            }
            det = det * pivot;
        }
        det
    }

    /// Coefficients (ascending, monic) of `det(t·I - A)`, computed through a
    /// Hessenberg reduction.
    pub fn char_poly(&self) -> Vec<S> {
        assert!(self.is_square());
        let n = self.rows;
        let mut h = self.clone();
        for j in 0..n.saturating_sub(2) {
            let mut best: Option<(usize, f64)> = None;
            for i in j + 1..n {
                let s = h[(i, j)].pivot_score();
                if !h[(i, j)].is_zero() && best.map_or(true, |(_, b)| s > b) {
                    best = Some((i, s));
                }
            }
            let Some((p, _)) = best else { continue };
            h.swap_rows(p, j + 1);
            h.swap_cols(p, j + 1);
            let inv = h[(j + 1, j)].inv().expect("pivot is nonzero");
            for r in j + 2..n {
                if h[(r, j)].is_zero() {
                    continue;
                }
                let u = h[(r, j)].clone() * inv.clone();
                h.add_row_multiple(r, j + 1, &(-u.clone()));
                h.add_col_multiple(j + 1, r, &u);
            }
        }
        // p_k = (t - h_kk) p_{k-1} - Σ_i h_{k-i,k} (Π h_{m,m-1}) p_{k-i-1}
        let mut polys: Vec<Vec<S>> = vec![vec![S::one()]];
        for k in 0..n {
            let prev = &polys[k];
            let mut next = vec![S::zero(); k + 2];
            for (d, c) in prev.iter().enumerate() {
                next[d + 1] = next[d + 1].clone() + c.clone();
                next[d] = next[d].clone() - h[(k, k)].clone() * c.clone();
            }
            let mut prod = S::one();
            for i in 1..=k {
                prod = prod * h[(k - i + 1, k - i)].clone();
                if prod.is_zero() {
                    break;
                }
                let coef = h[(k - i, k)].clone() * prod.clone();
                if coef.is_zero() {
                    continue;
                }
                for (d, c) in polys[k - i].iter().enumerate() {
                    next[d] = next[d].clone() - coef.clone() * c.clone();
                }
            }
            polys.push(next);
        }
        polys.pop().unwrap()
    }

    /// `Σ coeffs[k] A^k`.
    pub fn eval_poly(&self, coeffs: &[S]) -> Matrix<S> {
        assert!(self.is_square());
        let mut acc = Matrix::zeros(self.rows, self.rows);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self);
            for i in 0..self.rows {
                acc[(i, i)] = acc[(i, i)].clone() + c.clone();
            }
        }
        acc
    }

    /// Converts entries to f64 complex values.
    pub fn to_c64_rows(&self) -> Vec<Vec<num_complex::Complex64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_c64()).collect())
            .collect()
    }
}

impl<R> Index<(usize, usize)> for Matrix<R> {
    type Output = R;
    fn index(&self, (i, j): (usize, usize)) -> &R {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &self.data[i * self.cols + j]
    }
}

impl<R> IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<R: fmt::Display> fmt::Display for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl<R: fmt::Debug> fmt::Debug for Matrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        f.write_str("]")
    }
}

impl<R: Serialize> Serialize for Matrix<R> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let rows: Vec<&[R]> = (0..self.rows)
            .map(|i| &self.data[i * self.cols..(i + 1) * self.cols])
            .collect();
        rows.serialize(s)
    }
}

impl<'de, R: Ring + Deserialize<'de>> Deserialize<'de> for Matrix<R> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<R>>::deserialize(d)?;
        Matrix::from_rows(rows).map_err(D::Error::custom)
    }
}
