//! Build a small game, inspect its Shapley operator and run exact value
//! iteration.
//!
//!     cargo run --example solve_basic

use tropical_mpg::game::{game_stats, samples, serialize_game};
use tropical_mpg::shapley::build_operator;
use tropical_mpg::vi::{predict_bounds, run_exact, VIConfig};
use tropical_mpg::{qi, Q};

fn main() {
    // Two states, uniform mixing, payments +2 and -1: F(x) = (s+2, s-1)
    // with s = (x1+x2)/2, so the mean payoff is 1/2 everywhere.
    let game = samples::two_state();
    println!("game file:\n{}\n", serialize_game(&game).unwrap());

    let stats = game_stats(&game).unwrap();
    println!(
        "stats: W = {}, M = {}, k = {}, mu = n*M^min(k,n-1) = {}",
        stats.w, stats.m_den, stats.k, stats.mu
    );

    let f = build_operator(&game).unwrap();
    let x: Vec<Q> = vec![qi(0), qi(0)];
    println!("F(0,0) = {:?}", pretty(&f.apply_finite(&x).unwrap()));

    let report = run_exact(&f, &VIConfig::exact(10_000)).unwrap();
    println!(
        "\nvalue iteration: {} after {} iterations, final u = {:?}",
        report.winner.as_str(),
        report.iterations,
        pretty(&report.final_u),
    );

    let bounds = predict_bounds(&game, None).unwrap();
    println!(
        "a-priori iteration bound 10n^3 W M^2min = {}",
        bounds.total_bound
    );
}

fn pretty(v: &[Q]) -> Vec<String> {
    v.iter().map(|q| q.to_string()).collect()
}
