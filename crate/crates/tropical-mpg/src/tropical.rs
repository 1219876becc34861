//! Exact tropical (max-plus / min-plus) scalars, vectors and matrices.
//!
//! The max-plus semifield is `(ℚ ∪ {-∞}, max, +)`; the completed min-plus
//! semiring adds `+∞` with the convention `(-∞) + (+∞) = +∞`.  Finite values
//! are exact rationals, so every identity checked elsewhere in the crate is
//! an exact equality, never a float comparison.
//!
//! The adjoint (residual) of a max-plus matrix `A` is the min-plus operator
//! `A♯(y) = (-Aᵀ) ⊙' y`, tied to `A` by the Galois connection
//! `A ⊙ x ≤ y  ⟺  x ≤ A♯(y)`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;

use crate::{Error, Q};

/// Max-plus scalar: an exact rational or `-∞` (the tropical zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TropScalar {
    /// `-∞`, neutral for `max` and absorbing for `+`.
    Bottom,
    Finite(Q),
}

impl TropScalar {
    pub fn fin<T: Into<Q>>(v: T) -> Self {
        TropScalar::Finite(v.into())
    }

    pub fn fin_int(v: i64) -> Self {
        TropScalar::Finite(Q::from_integer(v.into()))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, TropScalar::Bottom)
    }

    pub fn as_finite(&self) -> Option<&Q> {
        match self {
            TropScalar::Bottom => None,
            TropScalar::Finite(q) => Some(q),
        }
    }

    /// Tropical multiplication `a ⊙ b = a + b`; `-∞` absorbs.
    pub fn tmul(&self, other: &Self) -> Self {
        match (self, other) {
            (TropScalar::Finite(a), TropScalar::Finite(b)) => TropScalar::Finite(a + b),
            _ => TropScalar::Bottom,
        }
    }

    /// Tropical addition `a ⊕ b = max(a, b)`.
    pub fn tadd(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }
}

impl PartialOrd for TropScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TropScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TropScalar::Bottom, TropScalar::Bottom) => Ordering::Equal,
            (TropScalar::Bottom, _) => Ordering::Less,
            (_, TropScalar::Bottom) => Ordering::Greater,
            (TropScalar::Finite(a), TropScalar::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for TropScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropScalar::Bottom => write!(f, "-inf"),
            TropScalar::Finite(q) => write!(f, "{}", q),
        }
    }
}

/// Scalar of the completed semiring `ℚ ∪ {-∞, +∞}`, totally ordered by
/// `-∞ < finite < +∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtScalar {
    Bottom,
    Finite(Q),
    Top,
}

impl ExtScalar {
    pub fn fin<T: Into<Q>>(v: T) -> Self {
        ExtScalar::Finite(v.into())
    }

    pub fn fin_int(v: i64) -> Self {
        ExtScalar::Finite(Q::from_integer(v.into()))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtScalar::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Q> {
        match self {
            ExtScalar::Finite(q) => Some(q),
            _ => None,
        }
    }

    /// Addition with the min-plus convention `(-∞) + (+∞) = +∞`.
    pub fn add_min(&self, other: &Self) -> Self {
        use ExtScalar::*;
        match (self, other) {
            (Top, _) | (_, Top) => Top,
            (Bottom, _) | (_, Bottom) => Bottom,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    /// Addition with the dual (max-plus) convention `(-∞) + (+∞) = -∞`.
    pub fn add_max(&self, other: &Self) -> Self {
        use ExtScalar::*;
        match (self, other) {
            (Bottom, _) | (_, Bottom) => Bottom,
            (Top, _) | (_, Top) => Top,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }

    /// Pointwise negation; swaps `-∞` and `+∞`.
    pub fn neg(&self) -> Self {
        match self {
            ExtScalar::Bottom => ExtScalar::Top,
            ExtScalar::Top => ExtScalar::Bottom,
            ExtScalar::Finite(q) => ExtScalar::Finite(-q),
        }
    }
}

impl From<TropScalar> for ExtScalar {
    fn from(t: TropScalar) -> Self {
        match t {
            TropScalar::Bottom => ExtScalar::Bottom,
            TropScalar::Finite(q) => ExtScalar::Finite(q),
        }
    }
}

impl From<&TropScalar> for ExtScalar {
    fn from(t: &TropScalar) -> Self {
        match t {
            TropScalar::Bottom => ExtScalar::Bottom,
            TropScalar::Finite(q) => ExtScalar::Finite(q.clone()),
        }
    }
}

impl PartialOrd for ExtScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtScalar::*;
        match (self, other) {
            (Bottom, Bottom) | (Top, Top) => Ordering::Equal,
            (Bottom, _) | (_, Top) => Ordering::Less,
            (Top, _) | (_, Bottom) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtScalar::Bottom => write!(f, "-inf"),
            ExtScalar::Top => write!(f, "+inf"),
            ExtScalar::Finite(q) => write!(f, "{}", q),
        }
    }
}

/// Dense matrix over the max-plus semifield, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropMatrix {
    rows: usize,
    cols: usize,
    data: Vec<TropScalar>,
}

impl TropMatrix {
    pub fn bottom(rows: usize, cols: usize) -> Result<Self, Error> {
        if rows == 0 || cols == 0 {
            return Err(Error::BadDimensions(rows, cols));
        }
        Ok(TropMatrix {
            rows,
            cols,
            data: vec![TropScalar::Bottom; rows * cols],
        })
    }

    /// Tropical identity: 0 on the diagonal, `-∞` off it.
    pub fn identity(n: usize) -> Result<Self, Error> {
        let mut m = Self::bottom(n, n)?;
        for i in 0..n {
            m.set(i, i, TropScalar::fin(Q::zero()));
        }
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<TropScalar>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::BadDimensions(r, c));
        }
        Ok(TropMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Rows of integers with `None` standing for `-∞`.
    pub fn from_int_rows(rows: &[Vec<Option<i64>>]) -> Result<Self, Error> {
        Self::from_rows(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|e| match e {
                            None => TropScalar::Bottom,
                            Some(v) => TropScalar::fin_int(*v),
                        })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TropScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TropScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> TropMatrix {
        let mut out = TropMatrix {
            rows: self.cols,
            cols: self.rows,
            data: vec![TropScalar::Bottom; self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].clone();
            }
        }
        out
    }

    /// Applies `f` to every finite entry, keeping the `-∞` pattern.
    pub fn map_finite(&self, mut f: impl FnMut(&Q) -> Q) -> TropMatrix {
        TropMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|e| match e {
                    TropScalar::Bottom => TropScalar::Bottom,
                    TropScalar::Finite(q) => TropScalar::Finite(f(q)),
                })
                .collect(),
        }
    }

    pub fn row_has_finite(&self, i: usize) -> bool {
        (0..self.cols).any(|j| !self.get(i, j).is_bottom())
    }

    pub fn col_has_finite(&self, j: usize) -> bool {
        (0..self.rows).any(|i| !self.get(i, j).is_bottom())
    }

    /// Indices of finite entries in column `j`.
    pub fn finite_in_col(&self, j: usize) -> Vec<usize> {
        (0..self.rows)
            .filter(|&i| !self.get(i, j).is_bottom())
            .collect()
    }

    /// Indices of finite entries in row `i`.
    pub fn finite_in_row(&self, i: usize) -> Vec<usize> {
        (0..self.cols)
            .filter(|&j| !self.get(i, j).is_bottom())
            .collect()
    }
}

/// Max-plus matrix-vector product: `(A ⊙ x)_i = max_j (A_ij + x_j)`.
pub fn maxplus_matvec(a: &TropMatrix, x: &[TropScalar]) -> Result<Vec<TropScalar>, Error> {
    if x.len() != a.cols {
        return Err(Error::DimensionMismatch(a.cols, x.len()));
    }
    let out = (0..a.rows)
        .map(|i| {
            let mut best = TropScalar::Bottom;
            for j in 0..a.cols {
                let term = a.get(i, j).tmul(&x[j]);
                if term > best {
                    best = term;
                }
            }
            best
        })
        .collect();
    Ok(out)
}

/// Max-plus product over the completed semiring (used when `+∞` may flow
/// through a pipeline); inside the max, sums follow `add_max`.
pub fn maxplus_matvec_ext(a: &TropMatrix, x: &[ExtScalar]) -> Result<Vec<ExtScalar>, Error> {
    if x.len() != a.cols {
        return Err(Error::DimensionMismatch(a.cols, x.len()));
    }
    let out = (0..a.rows)
        .map(|i| {
            let mut best = ExtScalar::Bottom;
            for j in 0..a.cols {
                let term = ExtScalar::from(a.get(i, j)).add_max(&x[j]);
                if term > best {
                    best = term;
                }
            }
            best
        })
        .collect();
    Ok(out)
}

/// Adjoint (residual) operator: `A♯(y)_j = min_i (y_i - A_ij)`, the min
/// running over finite `A_ij`; an empty min is `+∞` and sums follow
/// `add_min`, so `(-∞) + (+∞) = +∞`.
pub fn adjoint_apply(a: &TropMatrix, y: &[ExtScalar]) -> Result<Vec<ExtScalar>, Error> {
    if y.len() != a.rows {
        return Err(Error::DimensionMismatch(a.rows, y.len()));
    }
    let out = (0..a.cols)
        .map(|j| {
            let mut best = ExtScalar::Top;
            for i in 0..a.rows {
                // -(-∞) = +∞ makes the bottom entries of A drop out of the min.
                let term = y[i].add_min(&ExtScalar::from(a.get(i, j)).neg());
                if term < best {
                    best = term;
                }
            }
            best
        })
        .collect();
    Ok(out)
}

/// `t(x) = max`, `b(x) = min` and the Hilbert seminorm `t(x) - b(x)` of a
/// finite vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertStats {
    pub top: Q,
    pub bottom: Q,
    pub seminorm: Q,
}

pub fn hilbert_stats(x: &[Q]) -> Result<HilbertStats, Error> {
    let first = x.first().ok_or(Error::EmptyVector)?;
    let mut top = first.clone();
    let mut bottom = first.clone();
    for v in &x[1..] {
        if *v > top {
            top = v.clone();
        }
        if *v < bottom {
            bottom = v.clone();
        }
    }
    let seminorm = &top - &bottom;
    Ok(HilbertStats {
        top,
        bottom,
        seminorm,
    })
}

/// Hilbert stats of an extended vector; errors if any entry is `±∞`.
pub fn hilbert_stats_ext(x: &[ExtScalar]) -> Result<HilbertStats, Error> {
    let finite: Option<Vec<Q>> = x.iter().map(|e| e.as_finite().cloned()).collect();
    hilbert_stats(&finite.ok_or(Error::NonFiniteEntry)?)
}

/// Membership in the Hilbert ball `B_H(z, r) = { x : ‖x - z‖_H ≤ r }`.
pub fn hilbert_ball_contains(z: &[Q], r: &Q, x: &[Q]) -> Result<bool, Error> {
    if z.len() != x.len() {
        return Err(Error::DimensionMismatch(z.len(), x.len()));
    }
    if r < &Q::zero() {
        return Err(Error::NegativeRadius);
    }
    let diff: Vec<Q> = x.iter().zip(z).map(|(a, b)| a - b).collect();
    Ok(hilbert_stats(&diff)?.seminorm <= *r)
}

/// `t(x) = max_i x_i` for a finite vector.
pub fn top(x: &[Q]) -> Q {
    hilbert_stats(x).expect("nonempty").top
}

/// `b(x) = min_i x_i` for a finite vector.
pub fn bottom(x: &[Q]) -> Q {
    hilbert_stats(x).expect("nonempty").bottom
}
