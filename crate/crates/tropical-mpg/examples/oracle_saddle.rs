//! Exhaustive ground truth: strategy enumeration, saddle point, ergodic
//! constant and Blackwell bias.
//!
//!     cargo run --example oracle_saddle

use tropical_mpg::game::generate_random_game;
use tropical_mpg::oracle::{enumerate_strategies, evaluate_pair, solve_game};
use tropical_mpg::Q;

fn pretty(v: &[Q]) -> Vec<String> {
    v.iter().map(|q| q.to_string()).collect()
}

fn main() {
    let game = generate_random_game(3, 3, 2, 2, 4, 0.8, 42).unwrap();

    let (sigmas, taus) = enumerate_strategies(&game).unwrap();
    println!(
        "{} Min strategies x {} Max strategies",
        sigmas.len(),
        taus.len()
    );

    let sol = solve_game(&game).unwrap();
    println!("state values chi = {:?}", pretty(&sol.chi));
    println!(
        "saddle pair: sigma = {:?}, tau = {:?}",
        sol.sigma.0, sol.tau.0
    );
    match (&sol.rho, &sol.blackwell_bias) {
        (Some(rho), Some(bias)) => {
            println!("ergodic constant rho = {rho}");
            println!("Blackwell bias v* = {:?}  (F(v*) = rho + v*)", pretty(bias));
        }
        _ => println!("chi is not constant; no ergodic constant exists"),
    }

    // The saddle inequalities, re-checked against every deviation.
    let value = evaluate_pair(&game, &sol.sigma, &sol.tau).unwrap();
    let max_ok = taus.iter().all(|t| {
        evaluate_pair(&game, &sol.sigma, t)
            .unwrap()
            .iter()
            .zip(&value)
            .all(|(a, b)| a <= b)
    });
    let min_ok = sigmas.iter().all(|s| {
        evaluate_pair(&game, s, &sol.tau)
            .unwrap()
            .iter()
            .zip(&value)
            .all(|(a, b)| a >= b)
    });
    println!(
        "saddle verified against all deviations: {}",
        max_ok && min_ok
    );
}
