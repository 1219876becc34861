//! Game duality: the dual operator `F* = (Bᵀ)♯ ∘ P ∘ Aᵀ` satisfies
//! `cw̄(F*) = -cw̲(F)`, so exactly one of "every primal state strictly wins"
//! and "some dual state wins" holds.
//!
//!     cargo run --example duality

use tropical_mpg::condition::duality_report;
use tropical_mpg::game::{generate_random_game, samples, validate_game};

fn main() {
    for (name, game) in [
        ("two-state reference game".to_string(), samples::two_state()),
        (
            "decoupled split game".to_string(),
            samples::two_state_split(),
        ),
        (
            "random 3x3x3".to_string(),
            generate_random_game(3, 3, 3, 3, 5, 0.9, 1).unwrap(),
        ),
    ] {
        if !validate_game(&game).a_rows_finite {
            println!("{name}: skipped, A has an empty row (duality hypothesis)");
            continue;
        }
        let d = duality_report(&game).unwrap();
        println!("{name}:");
        println!(
            "  chi(F)  = {:?}",
            d.chi_primal
                .iter()
                .map(|q| q.to_string())
                .collect::<Vec<_>>()
        );
        println!(
            "  chi(F*) = {:?}",
            d.chi_dual.iter().map(|q| q.to_string()).collect::<Vec<_>>()
        );
        println!(
            "  cw_bar(F*) = {} = -cw_low(F) = {}   [{}]",
            d.cw_upper_dual,
            -d.cw_lower_primal.clone(),
            ok(d.item_cw_antisymmetry),
        );
        println!(
            "  cond_R(F) = cond(F*)              [{}]",
            ok(d.item_cond_equality)
        );
        println!(
            "  P(F*) or P_R(F) feasible          [{}]",
            ok(d.item_feasibility_split)
        );
        println!(
            "  not both P_R(F) and P_R(F*)       [{}]",
            ok(d.item_exclusive_strict)
        );
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}
