//! Property tests for the algebraic laws the whole crate leans on.

use num_traits::Signed;
use proptest::prelude::*;

use tropical_mpg::game::{generate_random_game, parse_game, serialize_game};
use tropical_mpg::shapley::{build_operator, ConjugateKind};
use tropical_mpg::tropical::{
    adjoint_apply, hilbert_ball_contains, hilbert_stats, maxplus_matvec, ExtScalar, TropMatrix,
    TropScalar,
};
use tropical_mpg::{qq, Q};

fn trop_scalar() -> impl Strategy<Value = TropScalar> {
    prop_oneof![
        1 => Just(TropScalar::Bottom),
        3 => (-8i64..=8, 1i64..=3).prop_map(|(n, d)| TropScalar::fin(qq(n, d))),
    ]
}

fn ext_scalar() -> impl Strategy<Value = ExtScalar> {
    prop_oneof![
        1 => Just(ExtScalar::Bottom),
        1 => Just(ExtScalar::Top),
        4 => (-8i64..=8, 1i64..=3).prop_map(|(n, d)| ExtScalar::fin(qq(n, d))),
    ]
}

fn trop_matrix(rows: usize, cols: usize) -> impl Strategy<Value = TropMatrix> {
    proptest::collection::vec(proptest::collection::vec(trop_scalar(), cols), rows)
        .prop_map(|rows| TropMatrix::from_rows(rows).unwrap())
}

fn qvec(n: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec((-9i64..=9, 1i64..=4).prop_map(|(a, b)| qq(a, b)), n)
}

fn residuation_input() -> impl Strategy<Value = (TropMatrix, Vec<TropScalar>, Vec<ExtScalar>)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(m, n)| {
        (
            trop_matrix(m, n),
            proptest::collection::vec(trop_scalar(), n),
            proptest::collection::vec(ext_scalar(), m),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    // A (x) x <= y iff x <= A#(y): the Galois connection behind everything.
    #[test]
    fn residuation_galois_connection((a, x, y) in residuation_input()) {
        let ax = maxplus_matvec(&a, &x).unwrap();
        let lhs = ax.iter().zip(&y).all(|(l, r)| ExtScalar::from(l) <= *r);
        let sharp = adjoint_apply(&a, &y).unwrap();
        let rhs = x.iter().zip(&sharp).all(|(l, r)| ExtScalar::from(l) <= *r);
        prop_assert_eq!(lhs, rhs);
    }

    // Matrix-level homogeneity and order preservation of both products.
    #[test]
    fn matvec_homogeneous_and_monotone(
        a in trop_matrix(3, 2),
        x in qvec(2),
        bump in qvec(2),
        alpha in (-6i64..=6, 1i64..=3).prop_map(|(n, d)| qq(n, d)),
    ) {
        let tx: Vec<TropScalar> = x.iter().cloned().map(TropScalar::Finite).collect();
        let shifted: Vec<TropScalar> =
            x.iter().map(|v| TropScalar::Finite(v + &alpha)).collect();
        let base = maxplus_matvec(&a, &tx).unwrap();
        let moved = maxplus_matvec(&a, &shifted).unwrap();
        for (b, m) in base.iter().zip(&moved) {
            prop_assert_eq!(b.tmul(&TropScalar::Finite(alpha.clone())), m.clone());
        }
        let bigger: Vec<TropScalar> =
            x.iter().zip(&bump).map(|(v, d)| TropScalar::Finite(v + d.abs())).collect();
        let up = maxplus_matvec(&a, &bigger).unwrap();
        for (lo, hi) in base.iter().zip(&up) {
            prop_assert!(lo <= hi);
        }
    }

    #[test]
    fn adjoint_homogeneous(
        a in trop_matrix(2, 3),
        y in qvec(2),
        alpha in (-6i64..=6, 1i64..=3).prop_map(|(n, d)| qq(n, d)),
    ) {
        let ey: Vec<ExtScalar> = y.iter().cloned().map(ExtScalar::Finite).collect();
        let shifted: Vec<ExtScalar> = y.iter().map(|v| ExtScalar::Finite(v + &alpha)).collect();
        let base = adjoint_apply(&a, &ey).unwrap();
        let moved = adjoint_apply(&a, &shifted).unwrap();
        for (b, m) in base.iter().zip(&moved) {
            prop_assert_eq!(b.add_min(&ExtScalar::Finite(alpha.clone())), m.clone());
        }
    }

    // Hilbert seminorm: shift invariance, symmetry, nonnegativity.
    #[test]
    fn hilbert_seminorm_laws(x in qvec(4), alpha in (-9i64..=9, 1i64..=4).prop_map(|(n, d)| qq(n, d))) {
        let stats = hilbert_stats(&x).unwrap();
        prop_assert!(stats.seminorm >= Q::from_integer(0.into()));
        let shifted: Vec<Q> = x.iter().map(|v| v + &alpha).collect();
        prop_assert_eq!(&hilbert_stats(&shifted).unwrap().seminorm, &stats.seminorm);
        let negated: Vec<Q> = x.iter().map(|v| -v).collect();
        prop_assert_eq!(&hilbert_stats(&negated).unwrap().seminorm, &stats.seminorm);
    }

    // Game JSON round trip is the identity on generated games.
    #[test]
    fn game_json_round_trip(seed in any::<u64>()) {
        let n = 1 + (seed % 4) as usize;
        let m = 1 + ((seed >> 8) % 4) as usize;
        let q = 1 + ((seed >> 16) % 4) as usize;
        let g = generate_random_game(n, m, q, 3, 5, 0.7, seed).unwrap();
        let text = serialize_game(&g).unwrap();
        prop_assert_eq!(parse_game(&text).unwrap(), g);
    }

    // Operator laws on random game operators.
    #[test]
    fn operator_is_monotone_homogeneous_nonexpansive(seed in any::<u64>()) {
        let n = 1 + (seed % 3) as usize;
        let m = 1 + ((seed >> 8) % 3) as usize;
        let q = 1 + ((seed >> 16) % 3) as usize;
        let g = generate_random_game(n, m, q, 2, 5, 0.8, seed).unwrap();
        let f = build_operator(&g).unwrap();

        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            qq(-6 + (state % 13) as i64, 1 + ((state >> 32) % 3) as i64)
        };
        let x: Vec<Q> = (0..n).map(|_| next()).collect();
        let y: Vec<Q> = x.iter().map(|v| v + next().abs()).collect();
        let alpha = next();

        let fx = f.apply_finite(&x).unwrap();
        let fy = f.apply_finite(&y).unwrap();
        prop_assert!(fx.iter().zip(&fy).all(|(a, b)| a <= b));

        let shifted: Vec<Q> = x.iter().map(|v| v + &alpha).collect();
        let fs = f.apply_finite(&shifted).unwrap();
        prop_assert!(fs.iter().zip(&fx).all(|(a, b)| *a == b + &alpha));

        let sup = |u: &[Q], v: &[Q]| u.iter().zip(v).map(|(a, b)| (a - b).abs()).max().unwrap();
        prop_assert!(sup(&fx, &fy) <= sup(&x, &y));

        // Swap consistency: conjugate(F, swap)(x) = -F(-x).
        let swapped = f.conjugate(ConjugateKind::Swap).unwrap();
        let minus_x: Vec<Q> = x.iter().map(|v| -v).collect();
        let want: Vec<Q> = f.apply_finite(&minus_x).unwrap().into_iter().map(|v| -v).collect();
        prop_assert_eq!(swapped.apply_finite(&x).unwrap(), want);
    }

    // Ball inclusion: r <= b(F(z)-z) implies B_H(z, r) subset of S(F).
    #[test]
    fn ball_inclusion_lemma(seed in any::<u64>()) {
        let n = 1 + (seed % 3) as usize;
        let g = generate_random_game(n, 2, 2, 2, 4, 0.8, seed).unwrap();
        let f = build_operator(&g).unwrap();
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            qq(-5 + (state % 11) as i64, 1 + ((state >> 32) % 3) as i64)
        };
        let z: Vec<Q> = (0..n).map(|_| next()).collect();
        let fz = f.apply_finite(&z).unwrap();
        let diff: Vec<Q> = fz.iter().zip(&z).map(|(a, b)| a - b).collect();
        let r = hilbert_stats(&diff).unwrap().bottom;
        prop_assume!(r >= Q::from_integer(0.into()));
        for x in tropical_mpg::condition::sample_hilbert_ball(&z, &r, 64, seed) {
            prop_assert!(hilbert_ball_contains(&z, &r, &x).unwrap());
            prop_assert!(tropical_mpg::condition::in_feasible_set(&f, &x).unwrap());
        }
    }
}
