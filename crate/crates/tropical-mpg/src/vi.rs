//! Value iteration: the basic exact loop, the finite-precision variant and
//! the perturbed rescaled run, with predicted iteration bounds.
//!
//! The exact loop iterates `u ← F(u)` from `u = 0` while `t(u) ≥ 0` and
//! `b(u) ≤ 0`; once every coordinate is positive Max wins the mean-payoff
//! game, once every coordinate is negative Min does.  The non-strict
//! reading of the loop condition is deliberate: with strict inequalities
//! the loop could never leave `u = 0`, and the finite-precision variant
//! degenerates to exactly this form at `ε = 0`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::game::{game_stats, StochasticGame};
use crate::oracle::OracleSolution;
use crate::shapley::{build_operator, perturbed_rescaled_game, ShapleyOperator};
use crate::tropical::hilbert_stats;
use crate::{Error, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    MaxWins,
    MinWins,
    /// The iteration budget ran out before a sign was certified.
    Inconclusive,
}

impl Winner {
    pub fn as_str(&self) -> &'static str {
        match self {
            Winner::MaxWins => "MaxWins",
            Winner::MinWins => "MinWins",
            Winner::Inconclusive => "Inconclusive",
        }
    }
}

/// The condition that ended a run; re-checkable from `final_u` and `iterations`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitRule {
    /// `b(u) > 0` (exact mode).
    BottomPositive,
    /// `t(u) < 0` (exact mode).
    TopNegative,
    /// `-ℓε + b(u) ≥ 0` (finite precision).
    ApproxBottomNonneg,
    /// `ℓε + t(u) ≤ 0` (finite precision).
    ApproxTopNonpos,
}

/// How the finite-precision error arises; the contract is only that each
/// evaluation is within `ε` of the true value in the sup norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoiseMode {
    /// Round the exact value to the `ε`-grid.
    Round,
    /// Seeded worst-case `±ε` on every coordinate of every step.
    Adversarial { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VIMode {
    Exact,
    FinitePrecision,
}

#[derive(Clone, Debug)]
pub struct VIConfig {
    pub mode: VIMode,
    /// Per-evaluation error budget; required positive in finite precision.
    pub epsilon: Option<Q>,
    pub noise: NoiseMode,
    pub max_iters: u64,
}

impl VIConfig {
    pub fn exact(max_iters: u64) -> Self {
        VIConfig {
            mode: VIMode::Exact,
            epsilon: None,
            noise: NoiseMode::Round,
            max_iters,
        }
    }

    pub fn finite(epsilon: Q, noise: NoiseMode, max_iters: u64) -> Self {
        VIConfig {
            mode: VIMode::FinitePrecision,
            epsilon: Some(epsilon),
            noise,
            max_iters,
        }
    }
}

/// Closed-form iteration bounds computed from the game statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundSet {
    /// `‖v*‖_H · |ρ|⁻¹`; needs oracle data with `ρ ≠ 0`.
    pub nits_bound: Option<Q>,
    /// `10 n³ W M^{2·min{k,n-1}}`.
    pub total_bound: BigInt,
    /// `2 n² W`, deterministic games only.
    pub det_bound: Option<BigInt>,
    /// `21 n⁴ W M^{3·min{k,n-1}}` for the perturbed rescaled run.
    pub perturbed_bound: BigInt,
    /// `30 n³ W M^{2·min{k,n-1}}` for the finite-precision run.
    pub approx_bound: BigInt,
}

impl BoundSet {
    pub fn to_json(&self) -> Value {
        json!({
            "nits_bound": self.nits_bound.as_ref().map(|q| q.to_string()),
            "total_bound": self.total_bound.to_string(),
            "det_bound": self.det_bound.as_ref().map(|b| b.to_string()),
            "perturbed_bound": self.perturbed_bound.to_string(),
            "approx_bound": self.approx_bound.to_string(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct VIReport {
    pub winner: Winner,
    pub iterations: u64,
    pub final_u: Vec<Q>,
    pub exit: Option<ExitRule>,
    pub bounds: Option<BoundSet>,
}

impl VIReport {
    pub fn with_bounds(mut self, bounds: BoundSet) -> Self {
        self.bounds = Some(bounds);
        self
    }

    /// Re-derives the recorded exit condition from `final_u` and
    /// `iterations`; true when it indeed fired.
    pub fn recheck_exit(&self, epsilon: Option<&Q>) -> bool {
        let Ok(stats) = hilbert_stats(&self.final_u) else {
            return false;
        };
        let drift = epsilon.map(|e| e * Q::from_integer(self.iterations.into()));
        match (self.exit, drift) {
            (Some(ExitRule::BottomPositive), _) => stats.bottom.is_positive(),
            (Some(ExitRule::TopNegative), _) => stats.top.is_negative(),
            (Some(ExitRule::ApproxBottomNonneg), Some(d)) => stats.bottom >= d,
            (Some(ExitRule::ApproxTopNonpos), Some(d)) => stats.top <= -d,
            _ => false,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "winner": self.winner.as_str(),
            "iterations": self.iterations,
            "final_u": self.final_u.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
            "exit": self.exit.map(|e| format!("{e:?}")),
            "bounds": self.bounds.as_ref().map(|b| b.to_json()),
        })
    }
}

/// Basic exact value iteration.
pub fn run_exact(f: &ShapleyOperator, cfg: &VIConfig) -> Result<VIReport, Error> {
    if !f.is_self_map() {
        return Err(Error::UnsupportedShape(
            "value iteration needs a self-map".into(),
        ));
    }
    let mut u = vec![Q::zero(); f.in_dim()];
    let mut iterations = 0u64;
    loop {
        let stats = hilbert_stats(&u)?;
        if stats.top.is_negative() {
            return Ok(VIReport {
                winner: Winner::MinWins,
                iterations,
                final_u: u,
                exit: Some(ExitRule::TopNegative),
                bounds: None,
            });
        }
        if stats.bottom.is_positive() {
            return Ok(VIReport {
                winner: Winner::MaxWins,
                iterations,
                final_u: u,
                exit: Some(ExitRule::BottomPositive),
                bounds: None,
            });
        }
        if iterations >= cfg.max_iters {
            return Ok(VIReport {
                winner: Winner::Inconclusive,
                iterations,
                final_u: u,
                exit: None,
                bounds: None,
            });
        }
        u = f.apply_finite(&u)?;
        iterations += 1;
    }
}

/// Value iteration with `ε`-approximate evaluations: the loop runs while
/// `ℓε + t(u) ≥ 0` and `-ℓε + b(u) ≤ 0`, and the drift-adjusted signs
/// decide the winner.
pub fn run_finite_precision(f: &ShapleyOperator, cfg: &VIConfig) -> Result<VIReport, Error> {
    if !f.is_self_map() {
        return Err(Error::UnsupportedShape(
            "value iteration needs a self-map".into(),
        ));
    }
    let eps = cfg.epsilon.clone().ok_or(Error::NonPositiveEpsilon)?;
    if !eps.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let mut adversary = match &cfg.noise {
        NoiseMode::Round => None,
        NoiseMode::Adversarial { seed } => Some(StdRng::seed_from_u64(*seed)),
    };
    let mut u = vec![Q::zero(); f.in_dim()];
    let mut iterations = 0u64;
    loop {
        let stats = hilbert_stats(&u)?;
        let drift = &eps * Q::from_integer(iterations.into());
        let top_sig = &drift + &stats.top;
        let bottom_sig = &stats.bottom - &drift;
        if top_sig.is_negative() || bottom_sig.is_positive() {
            let (winner, exit) = if top_sig <= Q::zero() {
                (Winner::MinWins, ExitRule::ApproxTopNonpos)
            } else {
                (Winner::MaxWins, ExitRule::ApproxBottomNonneg)
            };
            return Ok(VIReport {
                winner,
                iterations,
                final_u: u,
                exit: Some(exit),
                bounds: None,
            });
        }
        if iterations >= cfg.max_iters {
            return Ok(VIReport {
                winner: Winner::Inconclusive,
                iterations,
                final_u: u,
                exit: None,
                bounds: None,
            });
        }
        u = f.apply_approx(&u, &eps, adversary.as_mut())?;
        iterations += 1;
    }
}

/// Dispatch on `cfg.mode`.
pub fn run(f: &ShapleyOperator, cfg: &VIConfig) -> Result<VIReport, Error> {
    match cfg.mode {
        VIMode::Exact => run_exact(f, cfg),
        VIMode::FinitePrecision => run_finite_precision(f, cfg),
    }
}

/// Exact value iteration on the perturbed rescaled operator `1 + F_{2μ}`.
/// A `MaxWins` verdict means Max wins the *original* game (`ρ ≥ 0`);
/// `MinWins` means Min strictly wins it (`ρ < 0`).  This decides every game,
/// including mean payoff exactly zero.
pub fn run_perturbed_rescaled(g: &StochasticGame, cfg: &VIConfig) -> Result<VIReport, Error> {
    let stats = game_stats(g)?;
    let perturbed = perturbed_rescaled_game(g, &stats.mu);
    let f = build_operator(&perturbed)?;
    let report = run_exact(&f, cfg)?;
    Ok(report.with_bounds(predict_bounds(g, None)?))
}

/// All closed-form bounds from the game statistics; the oracle-based
/// `nits_bound` only when `ρ ≠ 0` data is supplied.
pub fn predict_bounds(
    g: &StochasticGame,
    oracle_data: Option<&OracleSolution>,
) -> Result<BoundSet, Error> {
    let stats = game_stats(g)?;
    let n = BigInt::from(g.n());
    let m_min = stats.m_pow_min();
    let total_bound = BigInt::from(10) * n.pow(3) * &stats.w * m_min.pow(2);
    let det_bound = if stats.m_den.is_one() {
        Some(BigInt::from(2) * n.pow(2) * &stats.w)
    } else {
        None
    };
    let perturbed_bound = BigInt::from(21) * n.pow(4) * &stats.w * m_min.pow(3);
    let approx_bound = BigInt::from(30) * n.pow(3) * &stats.w * m_min.pow(2);
    let nits_bound = oracle_data.and_then(|sol| match (&sol.rho, &sol.blackwell_bias) {
        (Some(rho), Some(v)) if !rho.is_zero() => {
            let seminorm = hilbert_stats(v).ok()?.seminorm;
            Some(seminorm / rho.abs())
        }
        _ => None,
    });
    Ok(BoundSet {
        nits_bound,
        total_bound,
        det_bound,
        perturbed_bound,
        approx_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::samples;
    use crate::oracle::solve_game;
    use crate::tropical::TropMatrix;
    use crate::{qi, qq};

    fn qv(vals: &[i64]) -> Vec<Q> {
        vals.iter().map(|&v| qi(v)).collect()
    }

    #[test]
    fn translation_decided_in_one_step() {
        let f = build_operator(&samples::single_state(2)).unwrap();
        let r = run_exact(&f, &VIConfig::exact(100)).unwrap();
        assert_eq!(r.winner, Winner::MaxWins);
        assert_eq!(r.iterations, 1);
        assert!(r.recheck_exit(None));
    }

    #[test]
    fn reference_game_takes_four_iterations() {
        let f = build_operator(&samples::two_state()).unwrap();
        let r = run_exact(&f, &VIConfig::exact(100)).unwrap();
        assert_eq!(r.winner, Winner::MaxWins);
        assert_eq!(r.iterations, 4);
        assert_eq!(r.final_u, vec![qq(7, 2), qq(1, 2)]);
        assert_eq!(r.exit, Some(ExitRule::BottomPositive));
        assert!(r.recheck_exit(None));
        // u = F^l(0) exactly, through the iterates
        // (2,-1), (5/2,-1/2), (3,0), (7/2,1/2).
        let expected = [
            vec![qi(2), qi(-1)],
            vec![qq(5, 2), qq(-1, 2)],
            vec![qi(3), qi(0)],
            vec![qq(7, 2), qq(1, 2)],
        ];
        let mut u = qv(&[0, 0]);
        for step in &expected {
            u = f.apply_finite(&u).unwrap();
            assert_eq!(&u, step);
        }
        assert_eq!(u, r.final_u);
    }

    #[test]
    fn negative_payments_make_min_win() {
        // F(x) = (s-2, s-1): rho = -3/2.
        let g = samples::two_state();
        let b = TropMatrix::from_int_rows(&[vec![Some(-2), None], vec![None, Some(-1)]]).unwrap();
        let g = StochasticGame::new(g.a().clone(), b, g.p().clone()).unwrap();
        let f = build_operator(&g).unwrap();
        let r = run_exact(&f, &VIConfig::exact(100)).unwrap();
        assert_eq!(r.winner, Winner::MinWins);
        assert_eq!(solve_game(&g).unwrap().rho, Some(qq(-3, 2)));
    }

    #[test]
    fn zero_mean_game_is_inconclusive_exactly() {
        let f = build_operator(&samples::two_state_zero_mean()).unwrap();
        let r = run_exact(&f, &VIConfig::exact(50)).unwrap();
        assert_eq!(r.winner, Winner::Inconclusive);
        assert_eq!(r.iterations, 50);
        assert_eq!(r.exit, None);
    }

    #[test]
    fn finite_precision_requires_positive_epsilon() {
        let f = build_operator(&samples::two_state()).unwrap();
        let cfg = VIConfig::finite(Q::zero(), NoiseMode::Round, 10);
        assert!(matches!(
            run_finite_precision(&f, &cfg),
            Err(Error::NonPositiveEpsilon)
        ));
    }

    #[test]
    fn finite_precision_agrees_with_exact_on_reference_game() {
        let f = build_operator(&samples::two_state()).unwrap();
        for noise in [NoiseMode::Round, NoiseMode::Adversarial { seed: 7 }] {
            let cfg = VIConfig::finite(qq(1, 12), noise, 10_000);
            let r = run_finite_precision(&f, &cfg).unwrap();
            assert_eq!(r.winner, Winner::MaxWins);
            assert!(r.recheck_exit(Some(&qq(1, 12))));
        }
    }

    #[test]
    fn perturbed_run_handles_zero_mean() {
        let g = samples::two_state_zero_mean();
        let r = run_perturbed_rescaled(&g, &VIConfig::exact(100_000)).unwrap();
        assert_eq!(r.winner, Winner::MaxWins);
        assert_eq!(solve_game(&g).unwrap().rho, Some(qi(0)));
    }

    #[test]
    fn perturbed_run_on_reference_game_and_negation() {
        let g = samples::two_state();
        let r = run_perturbed_rescaled(&g, &VIConfig::exact(100_000)).unwrap();
        assert_eq!(r.winner, Winner::MaxWins);

        let neg =
            StochasticGame::new(g.a().clone(), g.b().map_finite(|v| -v), g.p().clone()).unwrap();
        let r = run_perturbed_rescaled(&neg, &VIConfig::exact(100_000)).unwrap();
        assert_eq!(r.winner, Winner::MinWins);
        assert!(solve_game(&neg).unwrap().rho.unwrap().is_negative());
    }

    #[test]
    fn bounds_of_reference_game() {
        let g = samples::two_state();
        let sol = solve_game(&g).unwrap();
        let b = predict_bounds(&g, Some(&sol)).unwrap();
        assert_eq!(b.total_bound, BigInt::from(640)); // 10 * 8 * 2 * 4
        assert_eq!(b.approx_bound, BigInt::from(1920));
        assert_eq!(b.perturbed_bound, BigInt::from(5376)); // 21 * 16 * 2 * 8
        assert_eq!(b.det_bound, None);
        assert_eq!(b.nits_bound, Some(qi(6))); // 3 * 2
    }

    #[test]
    fn bounds_of_deterministic_game() {
        let g = samples::two_cycle();
        let b = predict_bounds(&g, None).unwrap();
        assert_eq!(b.det_bound, Some(BigInt::from(24))); // 2 * 4 * 3
        assert_eq!(b.nits_bound, None);
    }

    #[test]
    fn zero_payment_game_bounds_vanish_and_perturbed_decides() {
        let g = samples::single_state(0);
        let b = predict_bounds(&g, None).unwrap();
        assert_eq!(b.total_bound, BigInt::zero());
        let r = run_perturbed_rescaled(&g, &VIConfig::exact(10)).unwrap();
        assert_eq!(r.winner, Winner::MaxWins);
        assert_eq!(r.iterations, 1);
    }
}
