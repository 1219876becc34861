//! Shapley operators as pipelines of evaluation layers.
//!
//! The operator of a game `(A, B, P)` is `F = A♯ ∘ B ∘ P`, read from the
//! outside in: Min moves (adjoint layer), Max moves (max-plus layer), nature
//! moves (stochastic layer).  Keeping the factorization explicit makes the
//! conjugations structural rewrites instead of numeric tricks:
//!
//! - cyclic: `F = G ∘ H` becomes `H ∘ G` (rotation of the layer list);
//! - swap (Max and Min exchanging roles): `F̃(x) = -F(-x)`, realized by
//!   wrapping the pipeline in two negation layers, which [`normalize`] can
//!   then push through — `Swap ∘ A♯ ∘ Swap = Aᵀ⊙` and
//!   `Swap ∘ B⊙ ∘ Swap = (Bᵀ)♯`;
//! - dual: `F* = (Bᵀ)♯ ∘ P ∘ Aᵀ`, the operator of the game in which the
//!   move order is Min, nature, Max with payments exchanged.
//!
//! [`normalize`]: ShapleyOperator::normalize

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::Rng;

use crate::game::StochasticGame;
use crate::linalg::QMatrix;
use crate::tropical::{adjoint_apply, maxplus_matvec_ext, ExtScalar, TropMatrix};
use crate::{Error, Q};

/// One evaluation layer of a Shapley operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layer {
    /// `y ↦ A♯(y)`; the Min player's move.
    Adjoint(TropMatrix),
    /// `y ↦ B ⊙ y`; the Max player's move.
    MaxPlus(TropMatrix),
    /// `y ↦ P y`; nature's move.
    Stochastic(QMatrix),
    /// `y ↦ -y`; conjugation marker with its dimension.
    Swap(usize),
}

impl Layer {
    /// Dimension of the layer's argument.
    pub fn in_dim(&self) -> usize {
        match self {
            Layer::Adjoint(a) => a.rows(),
            Layer::MaxPlus(b) => b.cols(),
            Layer::Stochastic(p) => p.cols(),
            Layer::Swap(n) => *n,
        }
    }

    /// Dimension of the layer's output.
    pub fn out_dim(&self) -> usize {
        match self {
            Layer::Adjoint(a) => a.cols(),
            Layer::MaxPlus(b) => b.rows(),
            Layer::Stochastic(p) => p.rows(),
            Layer::Swap(n) => *n,
        }
    }
}

/// Which conjugate of an operator to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjugateKind {
    Cyclic,
    Swap,
    Dual,
}

/// An affine function `c + s·β` of a parameter `β → ∞`, ordered by
/// `(slope, constant)`; min/max of affine forms under this order equal the
/// pointwise min/max for all sufficiently large `β`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineForm {
    pub slope: Q,
    pub constant: Q,
}

impl AffineForm {
    pub fn new(constant: Q, slope: Q) -> Self {
        AffineForm { slope, constant }
    }

    fn shift(&self, c: &Q) -> Self {
        AffineForm {
            slope: self.slope.clone(),
            constant: &self.constant + c,
        }
    }

    fn neg(&self) -> Self {
        AffineForm {
            slope: -self.slope.clone(),
            constant: -self.constant.clone(),
        }
    }
}

/// A composed pipeline of layers; `layers[0]` acts last on data, i.e. it is
/// the first move of a game round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapleyOperator {
    layers: Vec<Layer>,
}

impl ShapleyOperator {
    pub fn new(layers: Vec<Layer>) -> Result<Self, Error> {
        if layers.is_empty() {
            return Err(Error::UnsupportedShape("empty pipeline".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].in_dim() != pair[1].out_dim() {
                return Err(Error::DimensionMismatch(
                    pair[0].in_dim(),
                    pair[1].out_dim(),
                ));
            }
        }
        Ok(ShapleyOperator { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn in_dim(&self) -> usize {
        self.layers.last().unwrap().in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers.first().unwrap().out_dim()
    }

    pub fn is_self_map(&self) -> bool {
        self.in_dim() == self.out_dim()
    }

    /// The canonical `(A, B, P)` factorization, when the pipeline has it.
    pub fn canonical(&self) -> Option<(&TropMatrix, &TropMatrix, &QMatrix)> {
        match self.layers.as_slice() {
            [Layer::Adjoint(a), Layer::MaxPlus(b), Layer::Stochastic(p)] => Some((a, b, p)),
            _ => None,
        }
    }

    /// Exact evaluation over the completed semiring, layer by layer.  Mixed
    /// `±∞` under a stochastic layer resolves to `+∞`, the completed
    /// min-plus convention.
    pub fn apply(&self, x: &[ExtScalar]) -> Result<Vec<ExtScalar>, Error> {
        if x.len() != self.in_dim() {
            return Err(Error::DimensionMismatch(self.in_dim(), x.len()));
        }
        let mut cur = x.to_vec();
        for layer in self.layers.iter().rev() {
            cur = match layer {
                Layer::Adjoint(a) => adjoint_apply(a, &cur)?,
                Layer::MaxPlus(b) => maxplus_matvec_ext(b, &cur)?,
                Layer::Stochastic(p) => stochastic_ext(p, &cur)?,
                Layer::Swap(_) => cur.iter().map(ExtScalar::neg).collect(),
            };
        }
        Ok(cur)
    }

    /// Evaluation on a finite rational vector; errors if the result leaves
    /// `ℚ^n` (it cannot for a valid game operator).
    pub fn apply_finite(&self, x: &[Q]) -> Result<Vec<Q>, Error> {
        let ext: Vec<ExtScalar> = x.iter().map(|q| ExtScalar::fin(q.clone())).collect();
        self.apply(&ext)?
            .into_iter()
            .map(|e| e.as_finite().cloned().ok_or(Error::NonFiniteEntry))
            .collect()
    }

    /// Evaluates `F` on the half-line `x(β) = z + β·w` symbolically: the
    /// output forms are exact for every sufficiently large `β`.
    pub fn apply_affine(&self, x: &[AffineForm]) -> Result<Vec<AffineForm>, Error> {
        if x.len() != self.in_dim() {
            return Err(Error::DimensionMismatch(self.in_dim(), x.len()));
        }
        let mut cur = x.to_vec();
        for layer in self.layers.iter().rev() {
            cur = match layer {
                Layer::Adjoint(a) => (0..a.cols())
                    .map(|j| {
                        (0..a.rows())
                            .filter_map(|i| {
                                a.get(i, j)
                                    .as_finite()
                                    .map(|aij| cur[i].shift(&-aij.clone()))
                            })
                            .min()
                            .ok_or_else(|| {
                                Error::UnsupportedShape(
                                    "adjoint column without finite entry".into(),
                                )
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                Layer::MaxPlus(b) => (0..b.rows())
                    .map(|i| {
                        (0..b.cols())
                            .filter_map(|j| b.get(i, j).as_finite().map(|bij| cur[j].shift(bij)))
                            .max()
                            .ok_or_else(|| {
                                Error::UnsupportedShape("max-plus row without finite entry".into())
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                Layer::Stochastic(p) => (0..p.rows())
                    .map(|k| {
                        let mut slope = Q::zero();
                        let mut constant = Q::zero();
                        for l in 0..p.cols() {
                            let w = p.get(k, l);
                            if !w.is_zero() {
                                slope += w * &cur[l].slope;
                                constant += w * &cur[l].constant;
                            }
                        }
                        Ok(AffineForm { slope, constant })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                Layer::Swap(_) => cur.iter().map(AffineForm::neg).collect(),
            };
        }
        Ok(cur)
    }

    /// Finite-precision contract: a vector within `eps` of the exact value
    /// in the sup norm.  Without an RNG the exact value is rounded to the
    /// `eps`-grid (error ≤ eps/2); with one, the full adversarial `±eps` is
    /// injected in every coordinate.
    pub fn apply_approx(
        &self,
        x: &[Q],
        eps: &Q,
        adversary: Option<&mut StdRng>,
    ) -> Result<Vec<Q>, Error> {
        if eps.is_negative() {
            return Err(Error::NonPositiveEpsilon);
        }
        let exact = self.apply_finite(x)?;
        if eps.is_zero() {
            return Ok(exact);
        }
        match adversary {
            None => Ok(exact
                .into_iter()
                .map(|v| {
                    let steps = (&v / eps + crate::qq(1, 2)).floor();
                    steps * eps
                })
                .collect()),
            Some(rng) => Ok(exact
                .into_iter()
                .map(|v| {
                    if rng.gen_bool(0.5) {
                        &v + eps
                    } else {
                        &v - eps
                    }
                })
                .collect()),
        }
    }

    /// Structural conjugation.
    pub fn conjugate(&self, kind: ConjugateKind) -> Result<ShapleyOperator, Error> {
        match kind {
            ConjugateKind::Cyclic => {
                if !self.is_self_map() {
                    return Err(Error::UnsupportedShape(
                        "cyclic conjugate of a non-self-map".into(),
                    ));
                }
                let mut layers = self.layers.clone();
                layers.rotate_left(1);
                ShapleyOperator::new(layers)
            }
            ConjugateKind::Swap => {
                let mut layers = Vec::with_capacity(self.layers.len() + 2);
                layers.push(Layer::Swap(self.out_dim()));
                layers.extend(self.layers.iter().cloned());
                layers.push(Layer::Swap(self.in_dim()));
                ShapleyOperator::new(layers)
            }
            ConjugateKind::Dual => {
                let (a, b, p) = self.canonical().ok_or_else(|| {
                    Error::UnsupportedShape("dual needs the canonical A♯∘B∘P form".into())
                })?;
                if !(0..a.rows()).all(|i| a.row_has_finite(i)) {
                    return Err(Error::InvalidGame(
                        "dualization requires a finite entry in every row of A".into(),
                    ));
                }
                ShapleyOperator::new(vec![
                    Layer::Adjoint(b.transpose()),
                    Layer::Stochastic(p.clone()),
                    Layer::MaxPlus(a.transpose()),
                ])
            }
        }
    }

    /// Rewrites the pipeline without `Swap` layers by conjugating the layers
    /// they cross; errors if the swap count is odd (the map would be
    /// order-reversing).
    pub fn normalize(&self) -> Result<ShapleyOperator, Error> {
        let mut out = Vec::with_capacity(self.layers.len());
        let mut pending = false;
        for layer in &self.layers {
            match layer {
                Layer::Swap(_) => pending = !pending,
                Layer::Adjoint(a) if pending => out.push(Layer::MaxPlus(a.transpose())),
                Layer::MaxPlus(b) if pending => out.push(Layer::Adjoint(b.transpose())),
                other => out.push(other.clone()),
            }
        }
        if pending {
            return Err(Error::UnsupportedShape("odd number of swap layers".into()));
        }
        ShapleyOperator::new(out)
    }

    /// Recession function: every finite payment becomes 0, patterns and
    /// probabilities kept, so `F̂(x) = lim_{s→∞} F(sx)/s`.
    pub fn recession(&self) -> ShapleyOperator {
        let layers = self
            .layers
            .iter()
            .map(|layer| match layer {
                Layer::Adjoint(a) => Layer::Adjoint(a.map_finite(|_| Q::zero())),
                Layer::MaxPlus(b) => Layer::MaxPlus(b.map_finite(|_| Q::zero())),
                other => other.clone(),
            })
            .collect();
        ShapleyOperator { layers }
    }

    /// Boolean dependence pattern: `pattern[i][j]` is true when output
    /// coordinate `i` can depend on input coordinate `j` (some path of
    /// finite payments and positive probabilities connects them).
    pub fn dependence_pattern(&self) -> Vec<Vec<bool>> {
        let mut acc: Option<Vec<Vec<bool>>> = None;
        for layer in &self.layers {
            let step = layer_pattern(layer);
            acc = Some(match acc {
                None => step,
                Some(prev) => bool_matmul(&prev, &step),
            });
        }
        acc.unwrap()
    }
}

fn layer_pattern(layer: &Layer) -> Vec<Vec<bool>> {
    match layer {
        Layer::Adjoint(a) => (0..a.cols())
            .map(|j| (0..a.rows()).map(|i| !a.get(i, j).is_bottom()).collect())
            .collect(),
        Layer::MaxPlus(b) => (0..b.rows())
            .map(|i| (0..b.cols()).map(|j| !b.get(i, j).is_bottom()).collect())
            .collect(),
        Layer::Stochastic(p) => (0..p.rows())
            .map(|i| (0..p.cols()).map(|j| p.get(i, j).is_positive()).collect())
            .collect(),
        Layer::Swap(n) => (0..*n).map(|i| (0..*n).map(|j| i == j).collect()).collect(),
    }
}

fn bool_matmul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let cols = b[0].len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().enumerate().any(|(k, &v)| v && b[k][j]))
                .collect()
        })
        .collect()
}

fn stochastic_ext(p: &QMatrix, x: &[ExtScalar]) -> Result<Vec<ExtScalar>, Error> {
    if x.len() != p.cols() {
        return Err(Error::DimensionMismatch(p.cols(), x.len()));
    }
    Ok((0..p.rows())
        .map(|k| {
            let mut acc = ExtScalar::fin(Q::zero());
            for l in 0..p.cols() {
                let w = p.get(k, l);
                if w.is_zero() {
                    continue;
                }
                let term = match &x[l] {
                    ExtScalar::Finite(v) => ExtScalar::Finite(w * v),
                    inf => inf.clone(),
                };
                acc = acc.add_min(&term);
            }
            acc
        })
        .collect())
}

/// The game's Shapley operator `F = A♯ ∘ B ∘ P`, an `n → n` self-map.
pub fn build_operator(g: &StochasticGame) -> Result<ShapleyOperator, Error> {
    let report = crate::game::validate_game(g);
    if !report.is_structurally_valid() {
        return Err(Error::InvalidGame(format!("{report:?}")));
    }
    ShapleyOperator::new(vec![
        Layer::Adjoint(g.a().clone()),
        Layer::MaxPlus(g.b().clone()),
        Layer::Stochastic(g.p().clone()),
    ])
}

/// Convenience: the perturbed operator `u + F` of a canonical game is again
/// a game operator, with `A_ij` replaced by `A_ij - u_j` (columnwise shift).
pub fn shift_game(g: &StochasticGame, u: &[Q]) -> Result<StochasticGame, Error> {
    if u.len() != g.n() {
        return Err(Error::DimensionMismatch(g.n(), u.len()));
    }
    let mut a = g.a().clone();
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            if let Some(v) = a.get(i, j).as_finite() {
                let shifted = v - &u[j];
                a.set(i, j, crate::tropical::TropScalar::Finite(shifted));
            }
        }
    }
    StochasticGame::new(a, g.b().clone(), g.p().clone())
}

/// `μ`-scaled and shifted game realizing `G = 1 + F_{2μ}`: payments are
/// multiplied by `2μ` and every finite entry of `A` is lowered by one, so
/// `ρ(G) = 1 + 2μ·ρ(F)` by additive homogeneity.
pub fn perturbed_rescaled_game(g: &StochasticGame, mu: &BigInt) -> StochasticGame {
    let two_mu = Q::from_integer(2 * mu.clone());
    let a = g
        .a()
        .map_finite(|v| v * &two_mu - Q::from_integer(1.into()));
    let b = g.b().map_finite(|v| v * &two_mu);
    StochasticGame::new(a, b, g.p().clone()).expect("shape preserved")
}
