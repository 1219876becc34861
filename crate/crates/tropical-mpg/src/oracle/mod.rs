//! Ground-truth solver for desk-scale games.
//!
//! Positional strategies are enumerated exhaustively; each pair induces a
//! finite Markov reward chain that is evaluated exactly (limit average via
//! the Cesàro limit), and a saddle point is certified by checking the
//! Liggett–Lippman inequalities against *every* opposing strategy.  On top
//! of the average-reward saddle, a Blackwell-optimal pair is certified by
//! comparing discounted values as `α → 1⁻` through their exact Laurent
//! expansions (lexicographic comparison of the coefficient stacks), which
//! yields the ergodic constant, the Blackwell bias `v* = Dr` and an
//! invariant half-line.
//!
//! The solver accepts any normalized operator pipeline with exactly one
//! adjoint (Min) layer and one max-plus (Max) layer — in particular the
//! canonical `A♯ ∘ B ∘ P`, its cyclic conjugates, the swapped operator and
//! the dual `(Bᵀ)♯ ∘ P ∘ Aᵀ`.

pub mod chain;

use std::cmp::Ordering;

use num_traits::Zero;

pub use chain::{stationary_distribution, ChainModel};

use crate::game::StochasticGame;
use crate::linalg::QMatrix;
use crate::shapley::{build_operator, AffineForm, Layer, ShapleyOperator};
use crate::{Error, Q};

/// Positional strategy of Min: for every input state of the adjoint layer,
/// a row with a finite entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinStrategy(pub Vec<usize>);

/// Positional strategy of Max: for every output state of the max-plus
/// layer, a column with a finite entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxStrategy(pub Vec<usize>);

/// Budget and depth knobs for the exhaustive solver.
#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Upper bound on the number of strategy pairs.
    pub max_pairs: u128,
    /// Also certify a Blackwell-optimal pair and compute bias data.
    pub with_blackwell: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_pairs: 1 << 20,
            with_blackwell: true,
        }
    }
}

impl OracleConfig {
    /// Average-reward data only (state values and a saddle pair).
    pub fn average_only() -> Self {
        OracleConfig {
            with_blackwell: false,
            ..Self::default()
        }
    }
}

/// An invariant half-line: `F(z + βw) = z + (β+1)w` for all large `β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfLine {
    pub z: Vec<Q>,
    pub w: Vec<Q>,
}

/// Everything the brute-force solver knows about a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleSolution {
    /// Exact state values (the escape rate vector).
    pub chi: Vec<Q>,
    /// A certified saddle pair.
    pub sigma: MinStrategy,
    pub tau: MaxStrategy,
    /// The ergodic constant, present iff `chi` is constant.
    pub rho: Option<Q>,
    /// A bias vector (`F(v) = ρ + v`), present iff `chi` is constant.
    pub bias: Option<Vec<Q>>,
    /// The Blackwell bias `v* = lim (v_α - ρ/(1-α))`, present iff `chi` is
    /// constant.
    pub blackwell_bias: Option<Vec<Q>>,
    /// Invariant half-line from the Blackwell pair's Laurent data
    /// (`z = y₀`, `w = χ`); present when Blackwell data was requested.
    pub halfline: Option<HalfLine>,
}

// --- layered normal form ------------------------------------------------------

/// A self-map pipeline with exactly one Min and one Max choice layer.
struct NormalForm {
    op: ShapleyOperator,
    dim: usize,
}

impl NormalForm {
    fn new(op: &ShapleyOperator) -> Result<Self, Error> {
        if !op.is_self_map() {
            return Err(Error::UnsupportedShape("oracle needs a self-map".into()));
        }
        let norm = op.normalize()?;
        let mut adjoints = 0usize;
        let mut maxpluses = 0usize;
        for layer in norm.layers() {
            match layer {
                Layer::Adjoint(_) => adjoints += 1,
                Layer::MaxPlus(_) => maxpluses += 1,
                Layer::Stochastic(_) => {}
                Layer::Swap(_) => unreachable!("normalized pipeline"),
            }
        }
        if adjoints != 1 || maxpluses != 1 {
            return Err(Error::UnsupportedShape(format!(
                "oracle needs exactly one Min and one Max layer, got {adjoints} and {maxpluses}"
            )));
        }
        let dim = norm.in_dim();
        Ok(NormalForm { op: norm, dim })
    }

    /// Per-state admissible rows of the adjoint layer.
    fn min_choices(&self) -> Result<Vec<Vec<usize>>, Error> {
        for layer in self.op.layers() {
            if let Layer::Adjoint(a) = layer {
                return (0..a.cols())
                    .map(|j| {
                        let c = a.finite_in_col(j);
                        if c.is_empty() {
                            Err(Error::InvalidGame(format!(
                                "A column {j} has no finite entry"
                            )))
                        } else {
                            Ok(c)
                        }
                    })
                    .collect();
            }
        }
        unreachable!()
    }

    /// Per-state admissible columns of the max-plus layer.
    fn max_choices(&self) -> Result<Vec<Vec<usize>>, Error> {
        for layer in self.op.layers() {
            if let Layer::MaxPlus(b) = layer {
                return (0..b.rows())
                    .map(|i| {
                        let c = b.finite_in_row(i);
                        if c.is_empty() {
                            Err(Error::InvalidGame(format!("B row {i} has no finite entry")))
                        } else {
                            Ok(c)
                        }
                    })
                    .collect();
            }
        }
        unreachable!()
    }

    /// Folds the pipeline under a fixed strategy pair into the induced
    /// round chain and reward.
    fn chain(&self, sigma: &[usize], tau: &[usize]) -> Result<ChainModel, Error> {
        enum Trans {
            Select(Vec<usize>),
            Dense(Vec<Vec<Q>>),
        }

        let n = self.dim;
        let mut trans = Trans::Select((0..n).collect());
        let mut reward = vec![Q::zero(); n];

        // Adds the layer reward `rho(state)` and moves every trajectory to
        // `choice(state)` inside a `width`-sized next space.
        let apply_choice = |trans: &mut Trans,
                            reward: &mut Vec<Q>,
                            choice: &dyn Fn(usize) -> usize,
                            rho: &dyn Fn(usize) -> Q,
                            width: usize| {
            match trans {
                Trans::Select(c) => {
                    for (i, cur) in c.iter_mut().enumerate() {
                        reward[i] += rho(*cur);
                        *cur = choice(*cur);
                    }
                }
                Trans::Dense(d) => {
                    for (i, row) in d.iter_mut().enumerate() {
                        let mut next = vec![Q::zero(); width];
                        for (s, mass) in row.iter().enumerate() {
                            if mass.is_zero() {
                                continue;
                            }
                            reward[i] += mass * rho(s);
                            next[choice(s)] += mass;
                        }
                        *row = next;
                    }
                }
            }
        };

        for layer in self.op.layers() {
            match layer {
                Layer::Adjoint(a) => {
                    apply_choice(
                        &mut trans,
                        &mut reward,
                        &|s| sigma[s],
                        &|s| {
                            -a.get(sigma[s], s)
                                .as_finite()
                                .expect("strategy respects finiteness")
                                .clone()
                        },
                        a.rows(),
                    );
                }
                Layer::MaxPlus(b) => {
                    apply_choice(
                        &mut trans,
                        &mut reward,
                        &|s| tau[s],
                        &|s| {
                            b.get(s, tau[s])
                                .as_finite()
                                .expect("strategy respects finiteness")
                                .clone()
                        },
                        b.cols(),
                    );
                }
                Layer::Stochastic(p) => {
                    trans = match trans {
                        Trans::Select(c) => {
                            Trans::Dense(c.iter().map(|&s| p.row(s).to_vec()).collect())
                        }
                        Trans::Dense(d) => {
                            let width = p.cols();
                            Trans::Dense(
                                d.iter()
                                    .map(|row| {
                                        let mut next = vec![Q::zero(); width];
                                        for (s, mass) in row.iter().enumerate() {
                                            if mass.is_zero() {
                                                continue;
                                            }
                                            for (j, pv) in p.row(s).iter().enumerate() {
                                                if !pv.is_zero() {
                                                    next[j] += mass * pv;
                                                }
                                            }
                                        }
                                        next
                                    })
                                    .collect(),
                            )
                        }
                    };
                }
                Layer::Swap(_) => unreachable!("normalized pipeline"),
            }
        }

        let rows: Vec<Vec<Q>> = match trans {
            Trans::Select(c) => c
                .iter()
                .map(|&s| {
                    let mut row = vec![Q::zero(); n];
                    row[s] = Q::from_integer(1.into());
                    row
                })
                .collect(),
            Trans::Dense(d) => d,
        };
        Ok(ChainModel {
            t: QMatrix::from_rows(rows)?,
            r: reward,
        })
    }
}

// --- enumeration ----------------------------------------------------------------

fn cartesian(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

fn count(choices: &[Vec<usize>]) -> u128 {
    choices
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128))
}

/// All admissible positional strategies of both players of a canonical
/// game, in a fixed lexicographic order.
pub fn enumerate_strategies(
    g: &StochasticGame,
) -> Result<(Vec<MinStrategy>, Vec<MaxStrategy>), Error> {
    enumerate_strategies_with(g, &OracleConfig::default())
}

pub fn enumerate_strategies_with(
    g: &StochasticGame,
    cfg: &OracleConfig,
) -> Result<(Vec<MinStrategy>, Vec<MaxStrategy>), Error> {
    let nf = NormalForm::new(&build_operator(g)?)?;
    let min_c = nf.min_choices()?;
    let max_c = nf.max_choices()?;
    let required = count(&min_c).saturating_mul(count(&max_c));
    if required > cfg.max_pairs {
        return Err(Error::BudgetExceeded {
            required,
            budget: cfg.max_pairs,
        });
    }
    Ok((
        cartesian(&min_c).into_iter().map(MinStrategy).collect(),
        cartesian(&max_c).into_iter().map(MaxStrategy).collect(),
    ))
}

/// The Markov reward chain induced by a strategy pair on a canonical game:
/// `T_jl = P_{τ(σ(j)) l}` and `r_j = -A_{σ(j) j} + B_{σ(j) τ(σ(j))}`.
pub fn induced_chain(
    g: &StochasticGame,
    sigma: &MinStrategy,
    tau: &MaxStrategy,
) -> Result<ChainModel, Error> {
    validate_pair(g, sigma, tau)?;
    let nf = NormalForm::new(&build_operator(g)?)?;
    nf.chain(&sigma.0, &tau.0)
}

/// Exact limit-average payoff vector `g(σ, τ)`.
pub fn evaluate_pair(
    g: &StochasticGame,
    sigma: &MinStrategy,
    tau: &MaxStrategy,
) -> Result<Vec<Q>, Error> {
    chain::gain(&induced_chain(g, sigma, tau)?)
}

fn validate_pair(g: &StochasticGame, sigma: &MinStrategy, tau: &MaxStrategy) -> Result<(), Error> {
    if sigma.0.len() != g.n() {
        return Err(Error::DimensionMismatch(g.n(), sigma.0.len()));
    }
    if tau.0.len() != g.m() {
        return Err(Error::DimensionMismatch(g.m(), tau.0.len()));
    }
    for (j, &i) in sigma.0.iter().enumerate() {
        if i >= g.m() || g.a().get(i, j).is_bottom() {
            return Err(Error::InvalidGame(format!(
                "sigma({j}) = {i} is not admissible"
            )));
        }
    }
    for (i, &k) in tau.0.iter().enumerate() {
        if k >= g.q() || g.b().get(i, k).is_bottom() {
            return Err(Error::InvalidGame(format!(
                "tau({i}) = {k} is not admissible"
            )));
        }
    }
    Ok(())
}

// --- saddle search ----------------------------------------------------------------

fn le_vec(a: &[Q], b: &[Q]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn constant_value(v: &[Q]) -> Option<Q> {
    if v.iter().all(|x| x == &v[0]) {
        Some(v[0].clone())
    } else {
        None
    }
}

/// Lexicographic comparison of one coordinate of two Laurent stacks.
fn lex_cmp_coord(a: &[Vec<Q>], b: &[Vec<Q>], j: usize) -> Ordering {
    for (ta, tb) in a.iter().zip(b) {
        match ta[j].cmp(&tb[j]) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn lex_ge_all_coords(a: &[Vec<Q>], b: &[Vec<Q>], dim: usize) -> bool {
    (0..dim).all(|j| lex_cmp_coord(a, b, j) != Ordering::Less)
}

/// Solves a game exhaustively; equivalent to
/// [`solve_operator`] on the game's canonical operator.
pub fn solve_game(g: &StochasticGame) -> Result<OracleSolution, Error> {
    solve_game_with(g, &OracleConfig::default())
}

pub fn solve_game_with(g: &StochasticGame, cfg: &OracleConfig) -> Result<OracleSolution, Error> {
    solve_operator(&build_operator(g)?, cfg)
}

/// Exhaustive solve of an operator pipeline with one Min and one Max layer.
pub fn solve_operator(op: &ShapleyOperator, cfg: &OracleConfig) -> Result<OracleSolution, Error> {
    let nf = NormalForm::new(op)?;
    let min_c = nf.min_choices()?;
    let max_c = nf.max_choices()?;
    let required = count(&min_c).saturating_mul(count(&max_c));
    if required > cfg.max_pairs {
        return Err(Error::BudgetExceeded {
            required,
            budget: cfg.max_pairs,
        });
    }
    let sigmas = cartesian(&min_c);
    let taus = cartesian(&max_c);

    // Exact average payoff of every pair.
    let mut gains: Vec<Vec<Vec<Q>>> = Vec::with_capacity(sigmas.len());
    for s in &sigmas {
        let mut row = Vec::with_capacity(taus.len());
        for t in &taus {
            row.push(chain::gain(&nf.chain(s, t)?)?);
        }
        gains.push(row);
    }

    // chi = componentwise min over sigma of (componentwise max over tau).
    let upper: Vec<Vec<Q>> = gains
        .iter()
        .map(|row| {
            let mut acc = row[0].clone();
            for v in &row[1..] {
                for (a, b) in acc.iter_mut().zip(v) {
                    if b > a {
                        *a = b.clone();
                    }
                }
            }
            acc
        })
        .collect();
    let mut chi = upper[0].clone();
    for v in &upper[1..] {
        for (a, b) in chi.iter_mut().zip(v) {
            if b < a {
                *a = b.clone();
            }
        }
    }

    // A saddle pair: sigma attaining chi, a tau attaining the best response
    // in every coordinate, checked against all opposing strategies.
    let mut found = None;
    'outer: for (si, u) in upper.iter().enumerate() {
        if *u != chi {
            continue;
        }
        for (ti, gain) in gains[si].iter().enumerate() {
            if gain != &chi {
                continue;
            }
            if gains.iter().all(|row| le_vec(&chi, &row[ti])) {
                found = Some((si, ti));
                break 'outer;
            }
        }
    }
    let (si, ti) = found.ok_or_else(|| Error::Internal("no pure saddle point found".into()))?;

    let mut sol = OracleSolution {
        chi: chi.clone(),
        sigma: MinStrategy(sigmas[si].clone()),
        tau: MaxStrategy(taus[ti].clone()),
        rho: constant_value(&chi),
        bias: None,
        blackwell_bias: None,
        halfline: None,
    };
    if !cfg.with_blackwell {
        return Ok(sol);
    }

    // Blackwell refinement over the average-optimal sigma candidates.
    let terms = 2 * nf.dim + 2;
    let dim = nf.dim;
    let s_min: Vec<usize> = (0..sigmas.len()).filter(|&s| gains[s][ti] == chi).collect();
    let mut blackwell = None;
    'search: for &s in &s_min {
        let stacks: Vec<Vec<Vec<Q>>> = taus
            .iter()
            .map(|t| chain::laurent_stack(&nf.chain(&sigmas[s], t)?, terms))
            .collect::<Result<_, _>>()?;
        // Componentwise lexicographic best response.
        let mut best_per_coord: Vec<usize> = vec![0; dim];
        for (t, stack) in stacks.iter().enumerate().skip(1) {
            for j in 0..dim {
                if lex_cmp_coord(stack, &stacks[best_per_coord[j]], j) == Ordering::Greater {
                    best_per_coord[j] = t;
                }
            }
        }
        for (t, stack) in stacks.iter().enumerate() {
            let dominant = (0..dim)
                .all(|j| lex_cmp_coord(stack, &stacks[best_per_coord[j]], j) == Ordering::Equal);
            if !dominant {
                continue;
            }
            // sigma-side certification against every Min deviation.
            let mut certified = true;
            for s2 in &sigmas {
                let other = chain::laurent_stack(&nf.chain(s2, &taus[t])?, terms)?;
                if !lex_ge_all_coords(&other, stack, dim) {
                    certified = false;
                    break;
                }
            }
            if certified {
                blackwell = Some((s, t, stack.clone()));
                break 'search;
            }
        }
    }
    let (bs, bt, stack) =
        blackwell.ok_or_else(|| Error::Internal("no Blackwell-optimal pair certified".into()))?;
    if stack[0] != chi {
        return Err(Error::Internal(
            "Blackwell gain disagrees with the saddle value".into(),
        ));
    }

    let z = stack[1].clone();
    let w = stack[0].clone();
    if !verify_invariant_halfline(&nf.op, &z, &w)? {
        return Err(Error::Internal(
            "Laurent data is not an invariant half-line".into(),
        ));
    }
    sol.sigma = MinStrategy(sigmas[bs].clone());
    sol.tau = MaxStrategy(taus[bt].clone());
    sol.halfline = Some(HalfLine { z: z.clone(), w });
    if sol.rho.is_some() {
        // chi constant: z is a bias and F(z) = rho + z exactly.
        let fz = nf.op.apply_finite(&z)?;
        let rho = sol.rho.clone().unwrap();
        if fz.iter().zip(&z).any(|(a, b)| *a != b + &rho) {
            return Err(Error::Internal(
                "Blackwell bias fails the ergodic equation".into(),
            ));
        }
        sol.bias = Some(z.clone());
        sol.blackwell_bias = Some(z);
    }
    Ok(sol)
}

/// Ergodic constant and Blackwell bias of a given pair, after certifying
/// Blackwell optimality against all single-player deviations.
pub fn blackwell_bias(
    g: &StochasticGame,
    sigma: &MinStrategy,
    tau: &MaxStrategy,
) -> Result<(Q, Vec<Q>), Error> {
    validate_pair(g, sigma, tau)?;
    let nf = NormalForm::new(&build_operator(g)?)?;
    let terms = 2 * nf.dim + 2;
    let stack = chain::laurent_stack(&nf.chain(&sigma.0, &tau.0)?, terms)?;
    for t2 in cartesian(&nf.max_choices()?) {
        let other = chain::laurent_stack(&nf.chain(&sigma.0, &t2)?, terms)?;
        if !lex_ge_all_coords(&stack, &other, nf.dim) {
            return Err(Error::InvalidGame(
                "pair is not Blackwell-optimal (Max deviation)".into(),
            ));
        }
    }
    for s2 in cartesian(&nf.min_choices()?) {
        let other = chain::laurent_stack(&nf.chain(&s2, &tau.0)?, terms)?;
        if !lex_ge_all_coords(&other, &stack, nf.dim) {
            return Err(Error::InvalidGame(
                "pair is not Blackwell-optimal (Min deviation)".into(),
            ));
        }
    }
    let rho = constant_value(&stack[0])
        .ok_or_else(|| Error::InvalidGame("chi is not constant, no ergodic constant".into()))?;
    let v_star = stack[1].clone();
    let fv = nf.op.apply_finite(&v_star)?;
    if fv.iter().zip(&v_star).any(|(a, b)| *a != b + &rho) {
        return Err(Error::Internal(
            "Blackwell bias fails the ergodic equation".into(),
        ));
    }
    Ok((rho, v_star))
}

/// Checks `F(z + βw) = z + (β+1)w` for all sufficiently large `β`, by
/// evaluating `F` symbolically on affine forms in `β` (the piecewise-affine
/// selection stabilizes, so the symbolic value is exact beyond the last
/// breakpoint).
pub fn verify_invariant_halfline(op: &ShapleyOperator, z: &[Q], w: &[Q]) -> Result<bool, Error> {
    if z.len() != op.in_dim() || w.len() != op.in_dim() || !op.is_self_map() {
        return Err(Error::DimensionMismatch(op.in_dim(), z.len().min(w.len())));
    }
    let forms: Vec<AffineForm> = z
        .iter()
        .zip(w)
        .map(|(zi, wi)| AffineForm::new(zi.clone(), wi.clone()))
        .collect();
    let out = op.apply_affine(&forms)?;
    Ok(out
        .iter()
        .zip(z.iter().zip(w))
        .all(|(f, (zi, wi))| f.slope == *wi && f.constant == zi + wi))
}
