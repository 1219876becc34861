//! Stochastic mean-payoff game data and plumbing.
//!
//! A game is a triple `(A, B, P)`: Min moves along finite entries of a
//! column of `A` (paying `-A_ij`), Max along finite entries of a row of `B`
//! (collecting `B_ik`), then nature moves with the row-stochastic matrix
//! `P`.  The standing assumption is that every row of `B` and every column
//! of `A` has at least one finite entry, so both players always have a move.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::linalg::QMatrix;
use crate::tropical::{TropMatrix, TropScalar};
use crate::{parse_q, Error, Q};

/// A stochastic mean-payoff game `(A, B, P)` with `m` Max states, `n` Min
/// states and `q` nature states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StochasticGame {
    a: TropMatrix,
    b: TropMatrix,
    p: QMatrix,
}

impl StochasticGame {
    /// Builds a game from `A ∈ 𝕋^{m×n}`, `B ∈ 𝕋^{m×q}`, `P ∈ ℚ^{q×n}`,
    /// checking only that the shapes cohere; see [`validate_game`] for the
    /// semantic checks.
    pub fn new(a: TropMatrix, b: TropMatrix, p: QMatrix) -> Result<Self, Error> {
        if b.rows() != a.rows() {
            return Err(Error::DimensionMismatch(a.rows(), b.rows()));
        }
        if p.rows() != b.cols() {
            return Err(Error::DimensionMismatch(b.cols(), p.rows()));
        }
        if p.cols() != a.cols() {
            return Err(Error::DimensionMismatch(a.cols(), p.cols()));
        }
        Ok(StochasticGame { a, b, p })
    }

    pub fn a(&self) -> &TropMatrix {
        &self.a
    }

    pub fn b(&self) -> &TropMatrix {
        &self.b
    }

    pub fn p(&self) -> &QMatrix {
        &self.p
    }

    /// Number of Max states (rows of `A` and `B`).
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Number of Min states (columns of `A`); the Shapley operator is a
    /// self-map of `𝕋^n`.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Number of nature states (columns of `B`, rows of `P`).
    pub fn q(&self) -> usize {
        self.b.cols()
    }

    /// Same `-∞` patterns, every finite payment mapped through `f`.
    pub fn map_payments(&self, mut f: impl FnMut(&Q) -> Q) -> StochasticGame {
        StochasticGame {
            a: self.a.map_finite(&mut f),
            b: self.b.map_finite(&mut f),
            p: self.p.clone(),
        }
    }
}

/// Outcome of the structural checks on a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    /// Every row of `B` has a finite entry (Max can always move).
    pub b_rows_finite: bool,
    /// Every column of `A` has a finite entry (Min can always move).
    pub a_cols_finite: bool,
    /// Every row of `P` has nonnegative entries summing to exactly one.
    pub p_stochastic: bool,
    /// All finite entries of `A` and `B` are integers.
    pub payments_integral: bool,
    /// Every row of `A` has a finite entry; hypothesis of the duality
    /// theorem, not part of base validity.
    pub a_rows_finite: bool,
}

impl ValidationReport {
    /// Full validity: the standing assumption, stochasticity and integer
    /// payments.
    pub fn is_valid(&self) -> bool {
        self.b_rows_finite && self.a_cols_finite && self.p_stochastic && self.payments_integral
    }

    /// Validity minus integrality; enough for evaluation and the oracle,
    /// which never use the payment bounds.
    pub fn is_structurally_valid(&self) -> bool {
        self.b_rows_finite && self.a_cols_finite && self.p_stochastic
    }
}

pub fn validate_game(g: &StochasticGame) -> ValidationReport {
    let b_rows_finite = (0..g.m()).all(|i| g.b.row_has_finite(i));
    let a_cols_finite = (0..g.n()).all(|j| g.a.col_has_finite(j));
    let a_rows_finite = (0..g.m()).all(|i| g.a.row_has_finite(i));
    let p_stochastic = (0..g.q()).all(|k| {
        let row = g.p.row(k);
        row.iter().all(|v| !v.is_negative()) && row.iter().sum::<Q>() == Q::one()
    });
    let integral = |m: &TropMatrix| {
        (0..m.rows())
            .all(|i| (0..m.cols()).all(|j| m.get(i, j).as_finite().is_none_or(|q| q.is_integer())))
    };
    ValidationReport {
        b_rows_finite,
        a_cols_finite,
        p_stochastic,
        payments_integral: integral(&g.a) && integral(&g.b),
        a_rows_finite,
    }
}

/// Derived statistics feeding every complexity bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameStats {
    /// Largest payment gap `max |A_ij - B_ih|` over finite pairs sharing a
    /// row; 0 when no row has both a finite `A` and a finite `B` entry.
    pub w: BigInt,
    /// Least common denominator of the transition probabilities.
    pub m_den: BigInt,
    /// Number of nondeterministic nature states (at least two successors of
    /// positive probability).
    pub k: usize,
    /// `μ = n · M^min{k, n-1}`.
    pub mu: BigInt,
    pub rows_of_a_finite: bool,
    /// The exponent `min{k, n-1}` appearing in all denominator bounds.
    pub exp: usize,
}

impl GameStats {
    /// `M^min{k, n-1}` — the denominator factor shared by all bounds.
    pub fn m_pow_min(&self) -> BigInt {
        self.m_den.pow(self.exp as u32)
    }
}

pub fn game_stats(g: &StochasticGame) -> Result<GameStats, Error> {
    let report = validate_game(g);
    if !report.is_valid() {
        return Err(Error::InvalidGame(format!("{report:?}")));
    }
    let mut w = BigInt::zero();
    for i in 0..g.m() {
        for j in 0..g.n() {
            let Some(aij) = g.a.get(i, j).as_finite() else {
                continue;
            };
            for h in 0..g.q() {
                let Some(bih) = g.b.get(i, h).as_finite() else {
                    continue;
                };
                let gap = (aij - bih).abs().to_integer();
                if gap > w {
                    w = gap;
                }
            }
        }
    }
    let mut m_den = BigInt::one();
    for k in 0..g.q() {
        for v in g.p.row(k) {
            m_den = m_den.lcm(v.denom());
        }
    }
    let k = (0..g.q())
        .filter(|&row| g.p.row(row).iter().filter(|v| v.is_positive()).count() >= 2)
        .count();
    let exp = k.min(g.n().saturating_sub(1));
    let mu = BigInt::from(g.n()) * m_den.pow(exp as u32);
    Ok(GameStats {
        w,
        m_den,
        k,
        mu,
        rows_of_a_finite: report.a_rows_finite,
        exp,
    })
}

// --- random generation ----------------------------------------------------

/// Generates a valid game: finite payments uniform in `[-w_max, w_max]`,
/// each `P` row built from `m_den` unit masses dropped uniformly on the `n`
/// successors (so all denominators divide `m_den`), finiteness enforced by
/// construction.  Deterministic for a fixed seed.
pub fn generate_random_game(
    n: usize,
    m: usize,
    q: usize,
    m_den: u32,
    w_max: i64,
    density: f64,
    seed: u64,
) -> Result<StochasticGame, Error> {
    if n == 0 || m == 0 || q == 0 || m_den == 0 {
        return Err(Error::InvalidGame(
            "state counts and M must be positive".into(),
        ));
    }
    if w_max < 0 || !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidGame(
            "need w_max >= 0 and density in (0,1]".into(),
        ));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let payment = |rng: &mut StdRng| TropScalar::fin_int(rng.gen_range(-w_max..=w_max));

    // A: at least one finite entry per column.
    let mut a = TropMatrix::bottom(m, n)?;
    for j in 0..n {
        for i in 0..m {
            if rng.gen_bool(density) {
                a.set(i, j, payment(&mut rng));
            }
        }
        if !a.col_has_finite(j) {
            let i = rng.gen_range(0..m);
            a.set(i, j, payment(&mut rng));
        }
    }
    // B: at least one finite entry per row.
    let mut b = TropMatrix::bottom(m, q)?;
    for i in 0..m {
        for h in 0..q {
            if rng.gen_bool(density) {
                b.set(i, h, payment(&mut rng));
            }
        }
        if !b.row_has_finite(i) {
            let h = rng.gen_range(0..q);
            b.set(i, h, payment(&mut rng));
        }
    }
    let p = random_stochastic_matrix(q, n, m_den, &mut rng)?;
    StochasticGame::new(a, b, p)
}

/// Row-stochastic matrix whose entries have denominators dividing `m_den`.
pub fn random_stochastic_matrix(
    rows: usize,
    cols: usize,
    m_den: u32,
    rng: &mut StdRng,
) -> Result<QMatrix, Error> {
    let mut p = QMatrix::zeros(rows, cols)?;
    for r in 0..rows {
        let mut counts = vec![0u32; cols];
        for _ in 0..m_den {
            counts[rng.gen_range(0..cols)] += 1;
        }
        for (c, &cnt) in counts.iter().enumerate() {
            p.set(r, c, Q::new(cnt.into(), m_den.into()));
        }
    }
    Ok(p)
}

// --- JSON wire format -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct WireGame {
    m: usize,
    n: usize,
    q: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Option<i64>>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Option<i64>>>,
    #[serde(rename = "P")]
    p: Vec<Vec<String>>,
}

/// Parses the JSON game file; `null` payments mean `-∞` and probabilities
/// are rational strings like `"1/2"` (normalized on input).
pub fn parse_game(text: &str) -> Result<StochasticGame, Error> {
    let wire: WireGame =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("game JSON: {e}")))?;
    let shape_err = |what: &str| Error::Parse(format!("game JSON: bad {what} shape"));
    if wire.a.len() != wire.m || wire.a.iter().any(|r| r.len() != wire.n) {
        return Err(shape_err("A"));
    }
    if wire.b.len() != wire.m || wire.b.iter().any(|r| r.len() != wire.q) {
        return Err(shape_err("B"));
    }
    if wire.p.len() != wire.q || wire.p.iter().any(|r| r.len() != wire.n) {
        return Err(shape_err("P"));
    }
    let a = TropMatrix::from_int_rows(&wire.a)?;
    let b = TropMatrix::from_int_rows(&wire.b)?;
    let p_rows: Result<Vec<Vec<Q>>, Error> = wire
        .p
        .iter()
        .map(|row| row.iter().map(|s| parse_q(s)).collect())
        .collect();
    let g = StochasticGame::new(a, b, QMatrix::from_rows(p_rows?)?)?;
    let report = validate_game(&g);
    if !report.is_valid() {
        return Err(Error::Parse(format!("game fails validation: {report:?}")));
    }
    Ok(g)
}

/// Serializes a game to the JSON wire format; requires integer payments.
pub fn serialize_game(g: &StochasticGame) -> Result<String, Error> {
    let trop_to_int = |m: &TropMatrix| -> Result<Vec<Vec<Option<i64>>>, Error> {
        (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| match m.get(i, j) {
                        TropScalar::Bottom => Ok(None),
                        TropScalar::Finite(q) => {
                            if !q.is_integer() {
                                return Err(Error::InvalidGame("non-integer payment".into()));
                            }
                            q.to_integer()
                                .to_i64()
                                .map(Some)
                                .ok_or_else(|| Error::InvalidGame("payment overflows i64".into()))
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let wire = WireGame {
        m: g.m(),
        n: g.n(),
        q: g.q(),
        a: trop_to_int(&g.a)?,
        b: trop_to_int(&g.b)?,
        p: (0..g.q())
            .map(|k| g.p.row(k).iter().map(|v| v.to_string()).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&wire).map_err(|e| Error::Internal(e.to_string()))
}

// --- reference instances ----------------------------------------------------

/// Small hand-checkable games used across tests, examples and docs.
pub mod samples {
    use super::*;

    /// Two-state game with uniform mixing: `F(x) = (s+2, s-1)` for
    /// `s = (x1+x2)/2`, mean payoff `1/2` in both states.
    pub fn two_state() -> StochasticGame {
        let a = TropMatrix::from_int_rows(&[vec![Some(0), None], vec![None, Some(0)]]).unwrap();
        let b = TropMatrix::from_int_rows(&[vec![Some(2), None], vec![None, Some(-1)]]).unwrap();
        let p = QMatrix::from_rows(vec![
            vec![crate::qq(1, 2), crate::qq(1, 2)],
            vec![crate::qq(1, 2), crate::qq(1, 2)],
        ])
        .unwrap();
        StochasticGame::new(a, b, p).unwrap()
    }

    /// Like [`two_state`] but with payments `(1, -1)`, so the mean payoff is
    /// exactly `0` with bias `(1, -1)`.
    pub fn two_state_zero_mean() -> StochasticGame {
        let a = TropMatrix::from_int_rows(&[vec![Some(0), None], vec![None, Some(0)]]).unwrap();
        let b = TropMatrix::from_int_rows(&[vec![Some(1), None], vec![None, Some(-1)]]).unwrap();
        let p = QMatrix::from_rows(vec![
            vec![crate::qq(1, 2), crate::qq(1, 2)],
            vec![crate::qq(1, 2), crate::qq(1, 2)],
        ])
        .unwrap();
        StochasticGame::new(a, b, p).unwrap()
    }

    /// Single state, single move: `F(x) = x + w`.
    pub fn single_state(w: i64) -> StochasticGame {
        let a = TropMatrix::from_int_rows(&[vec![Some(0)]]).unwrap();
        let b = TropMatrix::from_int_rows(&[vec![Some(w)]]).unwrap();
        let p = QMatrix::from_rows(vec![vec![Q::one()]]).unwrap();
        StochasticGame::new(a, b, p).unwrap()
    }

    /// Deterministic three-state game with a single Max row:
    /// `F_j(x) = max(x1 - 1, x2, x3 - 1)` for every `j`.  Its feasible set
    /// contains the Hilbert ball of radius 3 around `(0, 3, 0)` even though
    /// `b(F(z) - z) = 0` there — the inner-radius converse needs a
    /// diagonal-free map, and this one is not.
    pub fn three_state_flat() -> StochasticGame {
        let a = TropMatrix::from_int_rows(&[vec![Some(0), Some(0), Some(0)]]).unwrap();
        let b = TropMatrix::from_int_rows(&[vec![Some(-1), Some(0), Some(-1)]]).unwrap();
        let p = QMatrix::identity(3).unwrap();
        StochasticGame::new(a, b, p).unwrap()
    }

    /// Deterministic two-cycle with rewards `3` and `-1`: mean payoff `1`.
    pub fn two_cycle() -> StochasticGame {
        let a = TropMatrix::from_int_rows(&[vec![Some(0), None], vec![None, Some(0)]]).unwrap();
        let b = TropMatrix::from_int_rows(&[vec![Some(3), None], vec![None, Some(-1)]]).unwrap();
        let p =
            QMatrix::from_rows(vec![vec![Q::zero(), Q::one()], vec![Q::one(), Q::zero()]]).unwrap();
        StochasticGame::new(a, b, p).unwrap()
    }

    /// Two decoupled self-loops with rewards `1` and `-1`: the mean payoff
    /// vector is `(1, -1)`, not constant.
    pub fn two_state_split() -> StochasticGame {
        let a = TropMatrix::from_int_rows(&[vec![Some(0), None], vec![None, Some(0)]]).unwrap();
        let b = TropMatrix::from_int_rows(&[vec![Some(1), None], vec![None, Some(-1)]]).unwrap();
        let p = QMatrix::identity(2).unwrap();
        StochasticGame::new(a, b, p).unwrap()
    }
}
