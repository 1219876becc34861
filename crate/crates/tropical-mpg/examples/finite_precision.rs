//! Value iteration under inexact evaluation: every step may be off by up to
//! epsilon in the sup norm (here: worst-case adversarial noise), yet the
//! drift-adjusted stopping rule still decides the game for
//! epsilon <= 1/(3mu).  The perturbed rescaled run decides even rho = 0.
//!
//!     cargo run --example finite_precision

use tropical_mpg::game::{game_stats, samples};
use tropical_mpg::oracle::solve_game;
use tropical_mpg::shapley::build_operator;
use tropical_mpg::vi::{
    run_exact, run_finite_precision, run_perturbed_rescaled, NoiseMode, VIConfig,
};
use tropical_mpg::Q;

fn main() {
    let game = samples::two_state();
    let f = build_operator(&game).unwrap();
    let stats = game_stats(&game).unwrap();

    let exact = run_exact(&f, &VIConfig::exact(10_000)).unwrap();
    println!(
        "exact run:        {} after {} iterations",
        exact.winner.as_str(),
        exact.iterations
    );

    // epsilon = 1/(3mu) is the proven safe budget.
    let eps = Q::new(1.into(), stats.mu.clone() * 3);
    for seed in 0..4u64 {
        let cfg = VIConfig::finite(eps.clone(), NoiseMode::Adversarial { seed }, 100_000);
        let noisy = run_finite_precision(&f, &cfg).unwrap();
        println!(
            "adversarial +-{eps} (seed {seed}): {} after {} iterations",
            noisy.winner.as_str(),
            noisy.iterations
        );
        assert_eq!(noisy.winner, exact.winner);
    }

    // The zero-mean game: exact value iteration cannot terminate, but the
    // perturbed rescaled operator G = 1 + F_{2mu} has rho(G) = 1.
    let zero = samples::two_state_zero_mean();
    println!(
        "\nzero-mean game: rho = {}",
        solve_game(&zero).unwrap().rho.unwrap()
    );
    let capped = run_exact(&build_operator(&zero).unwrap(), &VIConfig::exact(200)).unwrap();
    println!(
        "plain run:      {} (budget {})",
        capped.winner.as_str(),
        capped.iterations
    );
    let perturbed = run_perturbed_rescaled(&zero, &VIConfig::exact(100_000)).unwrap();
    println!(
        "perturbed run:  {} after {} iterations (Max wins the original game)",
        perturbed.winner.as_str(),
        perturbed.iterations
    );
}
