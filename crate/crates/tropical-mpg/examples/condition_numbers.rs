//! Collatz-Wielandt numbers and the condition number of the feasibility
//! problems, with the one-step a-posteriori bracket from value iteration.
//!
//!     cargo run --example condition_numbers

use tropical_mpg::condition::{collatz_wielandt_approx, condition_numbers, CondValue};
use tropical_mpg::game::samples;
use tropical_mpg::shapley::build_operator;

fn cond_str(c: &CondValue) -> String {
    match c {
        CondValue::Finite(q) => q.to_string(),
        CondValue::Infinite => "inf".into(),
    }
}

fn main() {
    for (name, game) in [
        ("two-state reference game", samples::two_state()),
        ("zero-mean variant", samples::two_state_zero_mean()),
        ("deterministic two-cycle", samples::two_cycle()),
    ] {
        let report = condition_numbers(&game).unwrap();
        println!("{name}:");
        println!(
            "  cw_bar = {}, cw_low = {}",
            report.cw_upper, report.cw_lower
        );
        println!(
            "  cond = {}, cond_R = {}",
            cond_str(&report.cond),
            cond_str(&report.cond_r)
        );
        println!("  cond bound n*M^min(k,n-1) = {}", report.bound_cond);
        if let Some(b) = &report.bound_r_det {
            println!("  deterministic bias bound (n-1)(|rho|+W) = {b}");
        }
        println!("  diagonal-free: {}", report.diagonal_free);

        // Brackets from iterating F, converging at rate ||v*||_H / k.
        let f = build_operator(&game).unwrap();
        for k in [4u64, 16, 64] {
            let b = collatz_wielandt_approx(&f, k).unwrap();
            println!(
                "  k = {k:3}: t/k = {}, b/k = {}, bracket = [{}, {}]",
                b.t_over_k, b.b_over_k, b.lower, b.upper
            );
        }
        println!();
    }
}
