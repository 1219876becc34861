//! Dense exact-rational matrices and Gaussian elimination.
//!
//! Everything here is sized for game-sized systems (a handful of states), so
//! plain elimination with exact pivots is the right tool.

use num_traits::{One, Zero};

use crate::{Error, Q};

/// Row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, Error> {
        if rows == 0 || cols == 0 {
            return Err(Error::BadDimensions(rows, cols));
        }
        Ok(QMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        })
    }

    pub fn identity(n: usize) -> Result<Self, Error> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::BadDimensions(r, c));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
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

    pub fn transpose(&self) -> QMatrix {
        let mut out = QMatrix {
            rows: self.cols,
            cols: self.rows,
            data: vec![Q::zero(); self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].clone();
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Q]) -> Result<Vec<Q>, Error> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(self.cols, x.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Q::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() {
                        acc += a * &x[j];
                    }
                }
                acc
            })
            .collect())
    }

    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix, Error> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(self.cols, other.rows));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let cur = out.get(i, j) + a * b;
                        out.set(i, j, cur);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                self.rows * self.cols,
                other.rows * other.cols,
            ));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                self.rows * self.cols,
                other.rows * other.cols,
            ));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        Ok(out)
    }

    /// Solves `self · X = rhs` for a square nonsingular `self`; `None` if
    /// singular.
    pub fn solve_matrix(&self, rhs: &QMatrix) -> Result<Option<QMatrix>, Error> {
        if self.rows != self.cols {
            return Err(Error::BadDimensions(self.rows, self.cols));
        }
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch(self.rows, rhs.rows));
        }
        let n = self.rows;
        let k = rhs.cols;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let pivot = match (col..n).find(|&r| !a.get(r, col).is_zero()) {
                Some(p) => p,
                None => return Ok(None),
            };
            if pivot != col {
                for j in 0..n {
                    let tmp = a.get(pivot, j).clone();
                    a.set(pivot, j, a.get(col, j).clone());
                    a.set(col, j, tmp);
                }
                for j in 0..k {
                    let tmp = b.get(pivot, j).clone();
                    b.set(pivot, j, b.get(col, j).clone());
                    b.set(col, j, tmp);
                }
            }
            let inv = Q::one() / a.get(col, col).clone();
            for j in col..n {
                let v = a.get(col, j) * &inv;
                a.set(col, j, v);
            }
            for j in 0..k {
                let v = b.get(col, j) * &inv;
                b.set(col, j, v);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in col..n {
                    let v = a.get(r, j) - &factor * a.get(col, j);
                    a.set(r, j, v);
                }
                for j in 0..k {
                    let v = b.get(r, j) - &factor * b.get(col, j);
                    b.set(r, j, v);
                }
            }
        }
        Ok(Some(b))
    }

    /// Solves `self · x = rhs`; `None` if singular.
    pub fn solve(&self, rhs: &[Q]) -> Result<Option<Vec<Q>>, Error> {
        let col = QMatrix::from_rows(rhs.iter().map(|v| vec![v.clone()]).collect())?;
        Ok(self
            .solve_matrix(&col)?
            .map(|m| (0..m.rows()).map(|i| m.get(i, 0).clone()).collect()))
    }
}
