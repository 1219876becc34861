//! Feasibility geometry in the Hilbert seminorm: ball inclusions in the
//! feasible set S(F) = { x : x <= F(x) }, certificates, and why the
//! inner-radius formula needs a diagonal-free operator.
//!
//!     cargo run --example hilbert_geometry

use tropical_mpg::condition::{
    check_certificate, feasibility_status, in_feasible_set, inner_radius, sample_hilbert_ball,
};
use tropical_mpg::game::samples;
use tropical_mpg::shapley::build_operator;
use tropical_mpg::tropical::{hilbert_stats, TropScalar};
use tropical_mpg::{qi, Q};

fn main() {
    // Three states, one Max row: F_j(x) = max(x1 - 1, x2, x3 - 1) for all j.
    let game = samples::three_state_flat();
    let f = build_operator(&game).unwrap();

    let z: Vec<Q> = vec![qi(0), qi(3), qi(0)];
    let fz = f.apply_finite(&z).unwrap();
    let diff: Vec<Q> = fz.iter().zip(&z).map(|(a, b)| a - b).collect();
    println!(
        "z = (0, 3, 0), F(z) = {:?}",
        fz.iter().map(|q| q.to_string()).collect::<Vec<_>>()
    );
    println!("b(F(z) - z) = {}", hilbert_stats(&diff).unwrap().bottom);

    // The ball of radius 3 around z still sits inside S(F): the sufficient
    // bound r <= b(F(z)-z) is not necessary here because F is not
    // diagonal-free (every F_i depends on x_i).
    let inside = sample_hilbert_ball(&z, &qi(3), 1000, 2024)
        .iter()
        .all(|x| in_feasible_set(&f, x).unwrap());
    println!("all 1000 samples of B_H(z, 3) lie in S(F): {inside}");
    let r = inner_radius(&game).unwrap();
    println!(
        "diagonal-free: {}; asserted inner radius: {}",
        r.diagonal_free, r.radius
    );

    // A certificate for the feasibility problem P(F): F(z) >= 0 + z.
    let cert: Vec<TropScalar> = z.iter().cloned().map(TropScalar::Finite).collect();
    println!(
        "certificate check F(z) >= 0 + z: {}",
        check_certificate(&f, &cert, &qi(0)).unwrap()
    );

    // A diagonal-free contrast: the deterministic two-cycle attains its
    // inner radius cw_low = 1 at the witness center.
    let cycle = samples::two_cycle();
    let r = inner_radius(&cycle).unwrap();
    let w = r.witness_center.clone().unwrap();
    println!(
        "\ntwo-cycle: diagonal-free = {}, inner radius = {}, witness = {:?}",
        r.diagonal_free,
        r.radius,
        w.iter().map(|q| q.to_string()).collect::<Vec<_>>()
    );
    let fc = build_operator(&cycle).unwrap();
    let ok = sample_hilbert_ball(&w, &r.radius, 1000, 7)
        .iter()
        .all(|x| in_feasible_set(&fc, x).unwrap());
    println!("ball of that radius around the witness is feasible: {ok}");

    let feas = feasibility_status(&cycle).unwrap();
    println!(
        "feasibility: P = {}, P_R = {}, certificate mu = {}",
        feas.p_feasible,
        feas.pr_feasible,
        feas.certificate_mu.unwrap()
    );
}
