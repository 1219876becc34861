//! Collatz–Wielandt numbers, condition numbers, feasibility certificates,
//! inner-radius geometry and the duality report.
//!
//! The two feasibility problems attached to an operator `F` are
//!
//! - `𝒫(F)`: is there `x ∈ 𝕋^n`, `x ≠ 𝟘`, with `x ≤ F(x)`?  Feasible iff
//!   `cw̄(F) ≥ 0`, i.e. iff some state of the game is winning.
//! - `𝒫_ℝ(F)`: is there `x ∈ ℝ^n` with `x ≪ F(x)`?  Feasible iff
//!   `cw̲(F) > 0`, i.e. iff every state is strictly winning.
//!
//! The condition numbers are the reciprocals `cond(F) = |cw̄(F)|⁻¹` and
//! `cond_ℝ(F) = |cw̲(F)|⁻¹` (with `0⁻¹ = +∞`): the sup-norm distance from
//! `F` to the feasibility boundary under additive perturbations `u + F`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::game::{game_stats, validate_game, StochasticGame};
use crate::oracle::{solve_game_with, solve_operator, HalfLine, OracleConfig, OracleSolution};
use crate::shapley::{build_operator, ConjugateKind, ShapleyOperator};
use crate::tropical::{hilbert_stats, ExtScalar, HilbertStats, TropScalar};
use crate::{qq, Error, Q};

/// A condition number: a positive rational or `+∞` (the `0⁻¹` convention).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CondValue {
    Finite(Q),
    Infinite,
}

impl CondValue {
    /// `|cw|⁻¹` with `0⁻¹ = +∞`.
    pub fn from_cw(cw: &Q) -> Self {
        if cw.is_zero() {
            CondValue::Infinite
        } else {
            CondValue::Finite(cw.abs().recip())
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CondValue::Finite(q) => Value::String(q.to_string()),
            CondValue::Infinite => Value::String("inf".into()),
        }
    }
}

/// A-posteriori bracket for the Collatz–Wielandt numbers after `k_max`
/// value-iteration steps: for every `k`,
/// `b(F^{k+1}(0) - F^k(0)) ≤ cw̲ ≤ cw̄ ≤ t(F^{k+1}(0) - F^k(0))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwBracket {
    pub k_max: u64,
    /// `t(F^k(0))/k` at `k = k_max`.
    pub t_over_k: Q,
    /// `b(F^k(0))/k` at `k = k_max`.
    pub b_over_k: Q,
    /// Best lower end seen: `max_k b(F^{k+1}(0) - F^k(0))`.
    pub lower: Q,
    /// Best upper end seen: `min_k t(F^{k+1}(0) - F^k(0))`.
    pub upper: Q,
}

/// Iterates `F` from 0 and collects the one-step-increment bracket.
pub fn collatz_wielandt_approx(f: &ShapleyOperator, k_max: u64) -> Result<CwBracket, Error> {
    if !f.is_self_map() || k_max == 0 {
        return Err(Error::UnsupportedShape(
            "need a self-map and k_max >= 1".into(),
        ));
    }
    let mut u = vec![Q::zero(); f.in_dim()];
    let mut at_k = None;
    let mut lower: Option<Q> = None;
    let mut upper: Option<Q> = None;
    for k in 0..=k_max {
        let next = f.apply_finite(&u)?;
        let diff: Vec<Q> = next.iter().zip(&u).map(|(a, b)| a - b).collect();
        let HilbertStats { top, bottom, .. } = hilbert_stats(&diff)?;
        if lower.as_ref().is_none_or(|l| bottom > *l) {
            lower = Some(bottom);
        }
        if upper.as_ref().is_none_or(|h| top < *h) {
            upper = Some(top);
        }
        u = next;
        if k + 1 == k_max {
            let stats = hilbert_stats(&u)?;
            let kq = Q::from_integer(k_max.into());
            at_k = Some((stats.top / &kq, stats.bottom / kq));
        }
    }
    let (t_over_k, b_over_k) = at_k.expect("k_max >= 1");
    Ok(CwBracket {
        k_max,
        t_over_k,
        b_over_k,
        lower: lower.unwrap(),
        upper: upper.unwrap(),
    })
}

/// Exact Collatz–Wielandt numbers `(cw̄, cw̲) = (t(χ), b(χ))` via the oracle.
pub fn collatz_wielandt_exact(g: &StochasticGame) -> Result<(Q, Q), Error> {
    let sol = solve_game_with(g, &OracleConfig::average_only())?;
    let stats = hilbert_stats(&sol.chi)?;
    Ok((stats.top, stats.bottom))
}

/// Full condition diagnostics of a game.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub cw_upper: Q,
    pub cw_lower: Q,
    pub bracket: CwBracket,
    pub cond: CondValue,
    pub cond_r: CondValue,
    /// `max(0, cw̲)`, asserted only for diagonal-free operators.
    pub inner_radius: Option<Q>,
    pub witness_center: Option<Vec<Q>>,
    pub diagonal_free: bool,
    /// `n·M^min{k,n-1}`, the proven bound on `cond` when a bias exists.
    pub bound_cond: BigInt,
    /// `(n-1)(|ρ| + W)`, deterministic games with an ergodic constant only.
    pub bound_r_det: Option<Q>,
}

impl ConditionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "cw_upper": self.cw_upper.to_string(),
            "cw_lower": self.cw_lower.to_string(),
            "bracket": {
                "k_max": self.bracket.k_max,
                "t_over_k": self.bracket.t_over_k.to_string(),
                "b_over_k": self.bracket.b_over_k.to_string(),
                "lower": self.bracket.lower.to_string(),
                "upper": self.bracket.upper.to_string(),
            },
            "cond": self.cond.to_json(),
            "cond_r": self.cond_r.to_json(),
            "inner_radius": self.inner_radius.as_ref().map(|q| q.to_string()),
            "witness_center": self
                .witness_center
                .as_ref()
                .map(|v| v.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
            "diagonal_free": self.diagonal_free,
            "bound_cond": self.bound_cond.to_string(),
            "bound_r_det": self.bound_r_det.as_ref().map(|q| q.to_string()),
        })
    }
}

pub fn condition_numbers(g: &StochasticGame) -> Result<ConditionReport, Error> {
    condition_numbers_with(g, &OracleConfig::default(), 16)
}

pub fn condition_numbers_with(
    g: &StochasticGame,
    cfg: &OracleConfig,
    bracket_k: u64,
) -> Result<ConditionReport, Error> {
    let f = build_operator(g)?;
    let sol = solve_game_with(g, cfg)?;
    let chi_stats = hilbert_stats(&sol.chi)?;
    let (cw_upper, cw_lower) = (chi_stats.top, chi_stats.bottom);
    let stats = game_stats(g)?;
    let diag_free = diagonal_free(&f, 32, 0x5eed)?;
    let witness = sol
        .halfline
        .as_ref()
        .map(|hl| witness_center(&f, hl, &cw_lower))
        .transpose()?;
    let bound_r_det = match (&sol.rho, stats.m_den.is_one()) {
        (Some(rho), true) => {
            let n_minus_1 = Q::from_integer(BigInt::from(g.n()) - BigInt::one());
            Some(n_minus_1 * (rho.abs() + Q::from_integer(stats.w.clone())))
        }
        _ => None,
    };
    Ok(ConditionReport {
        cond: CondValue::from_cw(&cw_upper),
        cond_r: CondValue::from_cw(&cw_lower),
        bracket: collatz_wielandt_approx(&f, bracket_k)?,
        inner_radius: if diag_free {
            Some(if cw_lower.is_positive() {
                cw_lower.clone()
            } else {
                Q::zero()
            })
        } else {
            None
        },
        witness_center: witness,
        diagonal_free: diag_free,
        bound_cond: stats.mu.clone(),
        bound_r_det,
        cw_upper,
        cw_lower,
    })
}

/// A point `z` on the invariant half-line far enough out that
/// `F(z) - z = w`, hence `b(F(z) - z) = cw̲` exactly.
fn witness_center(f: &ShapleyOperator, hl: &HalfLine, cw_lower: &Q) -> Result<Vec<Q>, Error> {
    let mut beta = Q::zero();
    for _ in 0..64 {
        let x: Vec<Q> = hl.z.iter().zip(&hl.w).map(|(z, w)| z + &beta * w).collect();
        let fx = f.apply_finite(&x)?;
        let diff: Vec<Q> = fx.iter().zip(&x).map(|(a, b)| a - b).collect();
        if hilbert_stats(&diff)?.bottom == *cw_lower && diff.iter().all(|d| d >= cw_lower) {
            return Ok(x);
        }
        beta = if beta.is_zero() {
            Q::one()
        } else {
            beta * Q::from_integer(2.into())
        };
    }
    Err(Error::Internal(
        "no witness center found on the half-line".into(),
    ))
}

/// Structural diagonal-freeness (`F_i` independent of `x_i` for all `i`),
/// with random probes guarding the structural analysis.
pub fn diagonal_free(f: &ShapleyOperator, probes: u32, seed: u64) -> Result<bool, Error> {
    if !f.is_self_map() {
        return Err(Error::UnsupportedShape(
            "diagonal-freeness needs a self-map".into(),
        ));
    }
    let n = f.in_dim();
    let pattern = f.dependence_pattern();
    let structural = (0..n).all(|i| !pattern[i][i]);
    // Probe the coordinates the analysis claims are independent.
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..probes {
        let x: Vec<Q> = (0..n)
            .map(|_| qq(rng.gen_range(-50..=50), rng.gen_range(1..=8)))
            .collect();
        let fx = f.apply_finite(&x)?;
        for i in 0..n {
            if pattern[i][i] {
                continue;
            }
            let mut bumped = x.clone();
            bumped[i] += qq(rng.gen_range(1..=40), rng.gen_range(1..=4));
            let fb = f.apply_finite(&bumped)?;
            if fb[i] != fx[i] {
                return Err(Error::Internal(format!(
                    "structural analysis says F_{i} ignores x_{i}, probe disagrees"
                )));
            }
        }
    }
    Ok(structural)
}

/// Feasibility of `𝒫(F)` and `𝒫_ℝ(F)` with a re-verified certificate.
#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub p_feasible: bool,
    pub pr_feasible: bool,
    /// A certificate `z ∈ 𝕋^n`, `z ≠ 𝟘`, with `F(z) ≥ μ + z`: finite with
    /// `μ = cw̲` when `𝒫_ℝ` is feasible, supported on the winning states
    /// with `μ = cw̄` when only `𝒫` is.
    pub certificate_z: Option<Vec<TropScalar>>,
    pub certificate_mu: Option<Q>,
}

impl FeasibilityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "p_feasible": self.p_feasible,
            "pr_feasible": self.pr_feasible,
            "certificate_z": self
                .certificate_z
                .as_ref()
                .map(|v| v.iter().map(|t| t.to_string()).collect::<Vec<_>>()),
            "certificate_mu": self.certificate_mu.as_ref().map(|q| q.to_string()),
        })
    }
}

pub fn feasibility_status(g: &StochasticGame) -> Result<FeasibilityReport, Error> {
    feasibility_status_with(g, &OracleConfig::default())
}

pub fn feasibility_status_with(
    g: &StochasticGame,
    cfg: &OracleConfig,
) -> Result<FeasibilityReport, Error> {
    let f = build_operator(g)?;
    let mut cfg = cfg.clone();
    cfg.with_blackwell = true; // certificates come from the half-line
    let sol = solve_game_with(g, &cfg)?;
    let stats = hilbert_stats(&sol.chi)?;
    let (cw_upper, cw_lower) = (stats.top, stats.bottom);
    let p_feasible = !cw_upper.is_negative();
    let pr_feasible = cw_lower.is_positive();
    let hl = sol
        .halfline
        .as_ref()
        .ok_or_else(|| Error::Internal("missing half-line".into()))?;

    let (certificate_z, certificate_mu) = if pr_feasible {
        let center = witness_center(&f, hl, &cw_lower)?;
        let z: Vec<TropScalar> = center.into_iter().map(TropScalar::Finite).collect();
        (Some(z), Some(cw_lower.clone()))
    } else if p_feasible {
        // Support the certificate on the states of maximal value.
        let z: Vec<TropScalar> = sol
            .chi
            .iter()
            .zip(&hl.z)
            .map(|(chi_j, zj)| {
                if *chi_j == cw_upper {
                    TropScalar::Finite(zj.clone())
                } else {
                    TropScalar::Bottom
                }
            })
            .collect();
        (Some(z), Some(cw_upper.clone()))
    } else {
        (None, None)
    };

    if let (Some(z), Some(mu)) = (&certificate_z, &certificate_mu) {
        if !check_certificate(&f, z, mu)? {
            return Err(Error::Internal(
                "feasibility certificate failed re-verification".into(),
            ));
        }
    }
    Ok(FeasibilityReport {
        p_feasible,
        pr_feasible,
        certificate_z,
        certificate_mu,
    })
}

/// Checks `F(z) ≥ μ + z` for `z ∈ 𝕋^n`, `z ≠ 𝟘`, entrywise over the
/// completed semiring.
pub fn check_certificate(f: &ShapleyOperator, z: &[TropScalar], mu: &Q) -> Result<bool, Error> {
    if z.iter().all(|t| t.is_bottom()) {
        return Ok(false);
    }
    let ext: Vec<ExtScalar> = z.iter().map(ExtScalar::from).collect();
    let fz = f.apply(&ext)?;
    Ok(fz.iter().zip(z).all(|(fj, zj)| match zj {
        TropScalar::Bottom => true, // mu + (-inf) = -inf
        TropScalar::Finite(v) => *fj >= ExtScalar::Finite(mu + v),
    }))
}

/// True when `x ≤ F(x)`, i.e. `x` lies in the feasible set `𝒮(F)`.
pub fn in_feasible_set(f: &ShapleyOperator, x: &[Q]) -> Result<bool, Error> {
    let fx = f.apply_finite(x)?;
    Ok(x.iter().zip(&fx).all(|(a, b)| a <= b))
}

/// Inner radius of the feasible set, meaningful for diagonal-free maps.
#[derive(Clone, Debug)]
pub struct InnerRadiusReport {
    /// `max(0, cw̲)`; for diagonal-free operators this is the supremum of
    /// the radii of Hilbert balls inside `𝒮(F)`.
    pub radius: Q,
    pub witness_center: Option<Vec<Q>>,
    pub diagonal_free: bool,
}

pub fn inner_radius(g: &StochasticGame) -> Result<InnerRadiusReport, Error> {
    inner_radius_with(g, &OracleConfig::default())
}

pub fn inner_radius_with(
    g: &StochasticGame,
    cfg: &OracleConfig,
) -> Result<InnerRadiusReport, Error> {
    let f = build_operator(g)?;
    let mut cfg = cfg.clone();
    cfg.with_blackwell = true;
    let sol = solve_game_with(g, &cfg)?;
    let cw_lower = hilbert_stats(&sol.chi)?.bottom;
    let diag = diagonal_free(&f, 32, 0x5eed)?;
    let witness = sol
        .halfline
        .as_ref()
        .map(|hl| witness_center(&f, hl, &cw_lower))
        .transpose()?;
    let radius = if cw_lower.is_positive() {
        cw_lower
    } else {
        Q::zero()
    };
    Ok(InnerRadiusReport {
        radius,
        witness_center: witness,
        diagonal_free: diag,
    })
}

/// Deterministic sample of the Hilbert ball `B_H(z, r)`: all `2^n` extreme
/// patterns `z ± r/2` plus seeded rational points of the centered box.
pub fn sample_hilbert_ball(z: &[Q], r: &Q, count: usize, seed: u64) -> Vec<Vec<Q>> {
    let n = z.len();
    let half = r / Q::from_integer(2.into());
    let mut out = Vec::new();
    if n <= 16 {
        for mask in 0..(1u32 << n) {
            out.push(
                z.iter()
                    .enumerate()
                    .map(|(i, zi)| {
                        if mask >> i & 1 == 1 {
                            zi + &half
                        } else {
                            zi - &half
                        }
                    })
                    .collect(),
            );
        }
    }
    let mut rng = StdRng::seed_from_u64(seed);
    while out.len() < count {
        out.push(
            z.iter()
                .map(|zi| {
                    let ticks = rng.gen_range(-64i64..=64);
                    zi + &half * qq(ticks, 64)
                })
                .collect(),
        );
    }
    out.truncate(count.max(1 << n.min(16)));
    out
}

/// The duality diagnostics: `cw̄(F*) = -cw̲(F)` and its corollaries.
#[derive(Clone, Debug)]
pub struct DualityReport {
    /// Assumption plus a finite entry in every row of `A`.
    pub hypotheses_ok: bool,
    pub chi_primal: Vec<Q>,
    pub chi_dual: Vec<Q>,
    pub cw_upper_dual: Q,
    pub cw_lower_primal: Q,
    /// `cw̄(F*) = -cw̲(F)`.
    pub item_cw_antisymmetry: bool,
    /// `cond_ℝ(F) = cond(F*)`.
    pub item_cond_equality: bool,
    /// `𝒫(F*)` feasible or `𝒫_ℝ(F)` feasible.
    pub item_feasibility_split: bool,
    /// Not both `𝒫_ℝ(F)` and `𝒫_ℝ(F*)` feasible.
    pub item_exclusive_strict: bool,
}

impl DualityReport {
    pub fn all_items_hold(&self) -> bool {
        self.item_cw_antisymmetry
            && self.item_cond_equality
            && self.item_feasibility_split
            && self.item_exclusive_strict
    }

    pub fn to_json(&self) -> Value {
        json!({
            "hypotheses_ok": self.hypotheses_ok,
            "chi_primal": self.chi_primal.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "chi_dual": self.chi_dual.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "cw_upper_dual": self.cw_upper_dual.to_string(),
            "cw_lower_primal": self.cw_lower_primal.to_string(),
            "item_cw_antisymmetry": self.item_cw_antisymmetry,
            "item_cond_equality": self.item_cond_equality,
            "item_feasibility_split": self.item_feasibility_split,
            "item_exclusive_strict": self.item_exclusive_strict,
        })
    }
}

pub fn duality_report(g: &StochasticGame) -> Result<DualityReport, Error> {
    duality_report_with(g, &OracleConfig::average_only())
}

pub fn duality_report_with(g: &StochasticGame, cfg: &OracleConfig) -> Result<DualityReport, Error> {
    let report = validate_game(g);
    let hypotheses_ok = report.is_structurally_valid() && report.a_rows_finite;
    let f = build_operator(g)?;
    let dual = ShapleyOperator::new(vec![
        crate::shapley::Layer::Adjoint(g.b().transpose()),
        crate::shapley::Layer::Stochastic(g.p().clone()),
        crate::shapley::Layer::MaxPlus(g.a().transpose()),
    ])?;
    debug_assert!(f
        .conjugate(ConjugateKind::Dual)
        .map(|d| d == dual)
        .unwrap_or(true));
    let mut avg = cfg.clone();
    avg.with_blackwell = false;
    let primal = solve_operator(&f, &avg)?;
    let dual_sol = solve_operator(&dual, &avg)?;

    let primal_stats = hilbert_stats(&primal.chi)?;
    let dual_stats = hilbert_stats(&dual_sol.chi)?;
    let cw_lower_primal = primal_stats.bottom;
    let cw_upper_dual = dual_stats.top.clone();

    let item_cw_antisymmetry = cw_upper_dual == -cw_lower_primal.clone();
    let item_cond_equality =
        CondValue::from_cw(&cw_lower_primal) == CondValue::from_cw(&cw_upper_dual);
    let item_feasibility_split = !cw_upper_dual.is_negative() || cw_lower_primal.is_positive();
    let item_exclusive_strict = !(cw_lower_primal.is_positive() && dual_stats.bottom.is_positive());

    Ok(DualityReport {
        hypotheses_ok,
        chi_primal: primal.chi,
        chi_dual: dual_sol.chi,
        cw_upper_dual,
        cw_lower_primal,
        item_cw_antisymmetry,
        item_cond_equality,
        item_feasibility_split,
        item_exclusive_strict,
    })
}

/// Serializes an [`OracleSolution`] (rationals as `p/q` strings).
pub fn oracle_to_json(sol: &OracleSolution) -> Value {
    let qvec = |v: &[Q]| v.iter().map(|q| q.to_string()).collect::<Vec<_>>();
    json!({
        "chi": qvec(&sol.chi),
        "sigma": sol.sigma.0,
        "tau": sol.tau.0,
        "rho": sol.rho.as_ref().map(|q| q.to_string()),
        "bias": sol.bias.as_ref().map(|v| qvec(v)),
        "blackwell_bias": sol.blackwell_bias.as_ref().map(|v| qvec(v)),
        "halfline": sol.halfline.as_ref().map(|hl| json!({
            "z": qvec(&hl.z),
            "w": qvec(&hl.w),
        })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::samples;
    use crate::qi;
    use crate::shapley::shift_game;

    fn qv(vals: &[i64]) -> Vec<Q> {
        vals.iter().map(|&v| qi(v)).collect()
    }

    #[test]
    fn bracket_translation_is_tight_immediately() {
        let f = build_operator(&samples::single_state(5)).unwrap();
        let b = collatz_wielandt_approx(&f, 1).unwrap();
        assert_eq!(b.lower, qi(5));
        assert_eq!(b.upper, qi(5));
        assert_eq!(b.t_over_k, qi(5));
    }

    #[test]
    fn bracket_flat_example_closes_at_zero() {
        let f = build_operator(&samples::three_state_flat()).unwrap();
        let b = collatz_wielandt_approx(&f, 4).unwrap();
        assert_eq!(b.lower, qi(0));
        assert_eq!(b.upper, qi(0));
    }

    #[test]
    fn bracket_reference_game_within_rate() {
        // |t(F^k(0))/k - 1/2| <= 3/k and the bracket ends sandwich 1/2.
        let f = build_operator(&samples::two_state()).unwrap();
        let b = collatz_wielandt_approx(&f, 8).unwrap();
        assert!((b.t_over_k - qq(1, 2)).abs() <= qq(3, 8));
        assert!((b.b_over_k - qq(1, 2)).abs() <= qq(3, 8));
        assert!(b.lower <= qq(1, 2) && qq(1, 2) <= b.upper);
    }

    #[test]
    fn exact_cw_values() {
        assert_eq!(
            collatz_wielandt_exact(&samples::two_state()).unwrap(),
            (qq(1, 2), qq(1, 2))
        );
        assert_eq!(
            collatz_wielandt_exact(&samples::two_state_split()).unwrap(),
            (qi(1), qi(-1))
        );
        assert_eq!(
            collatz_wielandt_exact(&samples::single_state(7)).unwrap(),
            (qi(7), qi(7))
        );
    }

    #[test]
    fn condition_of_reference_game() {
        let r = condition_numbers(&samples::two_state()).unwrap();
        assert_eq!(r.cond, CondValue::Finite(qi(2)));
        assert_eq!(r.cond_r, CondValue::Finite(qi(2)));
        assert_eq!(r.bound_cond, BigInt::from(4));
        assert!(!r.diagonal_free); // F_1 depends on x_1 through the mixing
        assert_eq!(r.bound_r_det, None);
        let w = r.witness_center.unwrap();
        let f = build_operator(&samples::two_state()).unwrap();
        let fw = f.apply_finite(&w).unwrap();
        let diff: Vec<Q> = fw.iter().zip(&w).map(|(a, b)| a - b).collect();
        assert_eq!(hilbert_stats(&diff).unwrap().bottom, qq(1, 2));
    }

    #[test]
    fn condition_of_zero_mean_game_is_infinite() {
        let r = condition_numbers(&samples::two_state_zero_mean()).unwrap();
        assert_eq!(r.cond, CondValue::Infinite);
    }

    #[test]
    fn condition_of_deterministic_cycle() {
        let r = condition_numbers(&samples::two_cycle()).unwrap();
        assert_eq!(r.cond, CondValue::Finite(qi(1))); // rho = 1
        assert_eq!(r.bound_r_det, Some(qi(4))); // (n-1)(|rho| + W) = 1 * 4
    }

    #[test]
    fn flat_example_is_not_diagonal_free() {
        let f = build_operator(&samples::three_state_flat()).unwrap();
        assert!(!diagonal_free(&f, 8, 1).unwrap());
    }

    #[test]
    fn split_game_is_not_diagonal_free() {
        let f = build_operator(&samples::two_state_split()).unwrap();
        assert!(!diagonal_free(&f, 8, 1).unwrap());
    }

    #[test]
    fn crossed_game_is_diagonal_free() {
        // Deterministic swap: F(x) = (x2 + 3, x1 - 1); F_i ignores x_i.
        let f = build_operator(&samples::two_cycle()).unwrap();
        assert!(diagonal_free(&f, 8, 1).unwrap());
    }

    #[test]
    fn feasibility_of_reference_game() {
        let r = feasibility_status(&samples::two_state()).unwrap();
        assert!(r.p_feasible && r.pr_feasible);
        assert_eq!(r.certificate_mu, Some(qq(1, 2)));
        // A hand-picked certificate also verifies: z = (3, 0).
        let f = build_operator(&samples::two_state()).unwrap();
        let z = vec![TropScalar::fin(qi(3)), TropScalar::fin(qi(0))];
        assert!(check_certificate(&f, &z, &qq(1, 2)).unwrap());
    }

    #[test]
    fn feasibility_of_losing_translation() {
        let r = feasibility_status(&samples::single_state(-1)).unwrap();
        assert!(!r.p_feasible && !r.pr_feasible);
        assert!(r.certificate_z.is_none());
    }

    #[test]
    fn feasibility_of_flat_example() {
        // cw = 0: P is feasible, P_R is not; z = (0,3,0) certifies mu = 0.
        let r = feasibility_status(&samples::three_state_flat()).unwrap();
        assert!(r.p_feasible && !r.pr_feasible);
        assert_eq!(r.certificate_mu, Some(qi(0)));
        let f = build_operator(&samples::three_state_flat()).unwrap();
        let z: Vec<TropScalar> = qv(&[0, 3, 0]).into_iter().map(TropScalar::Finite).collect();
        assert!(check_certificate(&f, &z, &qi(0)).unwrap());
    }

    #[test]
    fn tropical_certificate_on_split_game() {
        // chi = (1, -1): only P is feasible; certificate must use a bottom.
        let r = feasibility_status(&samples::two_state_split()).unwrap();
        assert!(r.p_feasible && !r.pr_feasible);
        let z = r.certificate_z.unwrap();
        assert!(z[1].is_bottom());
        assert!(!z[0].is_bottom());
        assert_eq!(r.certificate_mu, Some(qi(1)));
    }

    #[test]
    fn certificate_rejects_all_bottom_and_wrong_mu() {
        let f = build_operator(&samples::two_state()).unwrap();
        let all_bottom = vec![TropScalar::Bottom, TropScalar::Bottom];
        assert!(!check_certificate(&f, &all_bottom, &qi(0)).unwrap());
        let z = vec![TropScalar::fin(qi(3)), TropScalar::fin(qi(0))];
        assert!(!check_certificate(&f, &z, &qi(1)).unwrap()); // mu too big
    }

    #[test]
    fn inner_radius_reports() {
        let flat = inner_radius(&samples::three_state_flat()).unwrap();
        assert!(!flat.diagonal_free);
        assert_eq!(flat.radius, qi(0));

        let cycle = inner_radius(&samples::two_cycle()).unwrap();
        assert!(cycle.diagonal_free);
        assert_eq!(cycle.radius, qi(1)); // cw_lower = rho = 1
        let w = cycle.witness_center.unwrap();
        let f = build_operator(&samples::two_cycle()).unwrap();
        let fw = f.apply_finite(&w).unwrap();
        let diff: Vec<Q> = fw.iter().zip(&w).map(|(a, b)| a - b).collect();
        assert_eq!(hilbert_stats(&diff).unwrap().bottom, qi(1));
    }

    #[test]
    fn ball_inclusion_on_flat_example() {
        // B_H((0,3,0), 3) sits inside S(F) even though b(F(z)-z) = 0.
        let f = build_operator(&samples::three_state_flat()).unwrap();
        let z = qv(&[0, 3, 0]);
        let fz = f.apply_finite(&z).unwrap();
        assert_eq!(fz, qv(&[3, 3, 3]));
        let diff: Vec<Q> = fz.iter().zip(&z).map(|(a, b)| a - b).collect();
        assert_eq!(hilbert_stats(&diff).unwrap().bottom, qi(0));
        for x in sample_hilbert_ball(&z, &qi(3), 200, 99) {
            assert!(in_feasible_set(&f, &x).unwrap());
        }
    }

    #[test]
    fn ball_sampler_stays_in_ball() {
        let z = qv(&[1, -2, 0]);
        let r = qq(5, 2);
        for x in sample_hilbert_ball(&z, &r, 100, 7) {
            assert!(crate::tropical::hilbert_ball_contains(&z, &r, &x).unwrap());
        }
    }

    #[test]
    fn duality_on_reference_game() {
        let d = duality_report(&samples::two_state()).unwrap();
        assert!(d.hypotheses_ok);
        assert_eq!(d.cw_upper_dual, qq(-1, 2));
        assert_eq!(d.cw_lower_primal, qq(1, 2));
        assert!(d.all_items_hold());
    }

    #[test]
    fn duality_on_translation() {
        let d = duality_report(&samples::single_state(4)).unwrap();
        assert_eq!(d.cw_upper_dual, qi(-4));
        assert!(d.all_items_hold());
    }

    #[test]
    fn perturbation_monotonicity_and_flip() {
        // Shifts smaller than |cw̄| preserve feasibility; -(cw̄+δ) flips it.
        let g = samples::two_state();
        let (cw_up, _) = collatz_wielandt_exact(&g).unwrap();
        assert_eq!(cw_up, qq(1, 2));
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..5 {
            let u: Vec<Q> = (0..2)
                .map(|_| qq(rng.gen_range(-49..=49), 100)) // |u|_inf < 1/2
                .collect();
            let shifted = shift_game(&g, &u).unwrap();
            let (up, _) = collatz_wielandt_exact(&shifted).unwrap();
            assert!(
                !up.is_negative(),
                "feasibility preserved under small shifts"
            );
        }
        for delta in [qi(1), qq(1, 2), qq(1, 4)] {
            let drop = -(cw_up.clone() + &delta);
            let u = vec![drop.clone(), drop];
            let shifted = shift_game(&g, &u).unwrap();
            let (up, _) = collatz_wielandt_exact(&shifted).unwrap();
            assert!(up.is_negative(), "large negative shift makes P infeasible");
        }
    }
}
