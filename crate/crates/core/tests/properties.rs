use lowdeg::cyclic_fourier::{expand_from_table, random_low_degree, CyclicPolynomial};
use lowdeg::linalg::{self, CMatrix};
use lowdeg::qudit_algebra::{BasisKind, Observable};
use lowdeg::remez::{self, interpolation_weights, split_weights, vandermonde_weights};
use lowdeg::rng;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_grid() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3, 2usize..=5)
}

fn poly(n: usize, k: usize, seed: u64) -> CyclicPolynomial {
    random_low_degree(n, k, n * (k - 1), seed, false).unwrap()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval((n, k) in small_grid(), seed in any::<u64>()) {
        let f = poly(n, k, seed);
        let table = f.table().unwrap();
        let mean_sq = table.iter().map(|v| v.norm_sqr()).sum::<f64>() / table.len() as f64;
        prop_assert!((mean_sq - f.l2_norm_sqr()).abs() <= 1e-9 * (1.0 + mean_sq));
    }

    #[test]
    fn table_round_trip((n, k) in small_grid(), seed in any::<u64>()) {
        let f = poly(n, k, seed);
        let g = expand_from_table(n, k, &f.table().unwrap()).unwrap();
        prop_assert!(f.max_coeff_diff(&g) <= 1e-10);
    }

    #[test]
    fn expansion_is_linear((n, k) in small_grid(), s1 in any::<u64>(), s2 in any::<u64>(), a in -3.0f64..3.0) {
        let f = poly(n, k, s1);
        let g = poly(n, k, s2);
        let a = Complex64::new(a, 0.5);
        let tf = f.table().unwrap();
        let tg = g.table().unwrap();
        let combo: Vec<Complex64> = tf.iter().zip(&tg).map(|(x, y)| a * x + y).collect();
        let h = expand_from_table(n, k, &combo).unwrap();
        let want = f.scale(a).add(&g).unwrap();
        prop_assert!(h.max_coeff_diff(&want) <= 1e-9);
    }

    #[test]
    fn coefficient_norm_decreases_in_p((n, k) in small_grid(), seed in any::<u64>(), p in 1.0f64..4.0, dp in 0.0f64..3.0) {
        let f = poly(n, k, seed);
        prop_assert!(f.coeff_norm(p + dp) <= f.coeff_norm(p) * (1.0 + 1e-12));
    }

    #[test]
    fn interpolation_reconstructs(k in 2usize..=40, theta in 0.0f64..std::f64::consts::TAU) {
        let z = Complex64::from_polar(1.0, theta);
        let w = interpolation_weights(z, k).unwrap();
        prop_assert!(w.max_reconstruction_error() <= 1e-9);
        let s = split_weights(&w);
        for (j, c) in w.c.iter().enumerate() {
            prop_assert!(close(s.reconstruct(j), *c));
        }
        prop_assert!(w.l1_norm() <= remez::weight_budget(k) + 1e-12);
    }

    #[test]
    fn vandermonde_recovers_constant_term(d in 1usize..=12, coeffs in prop::collection::vec(-5.0f64..5.0, 12)) {
        let v = vandermonde_weights(d).unwrap();
        let p = &coeffs[..d];
        let got = v.apply(p);
        prop_assert!((got - p[0]).abs() <= 1e-8 * (1.0 + v.max_abs()));
    }

    #[test]
    fn torus_sup_dominates_grid_sup((n, k) in (1usize..=2, 2usize..=4), seed in any::<u64>()) {
        let f = random_low_degree(n, k, 1, seed, false).unwrap();
        let omega = remez::omega_sup(&f).unwrap();
        let small = remez::torus_sup_lower_bound(&f, 64);
        let big = remez::torus_sup_lower_bound(&f, 1024);
        prop_assert!(small >= omega * (1.0 - 1e-12));
        prop_assert!(big >= small);
    }

    #[test]
    fn observable_expand_synthesize_round_trip(n in 1usize..=2, k in 2usize..=3, seed in any::<u64>(), hw in any::<bool>()) {
        let kind = if hw { BasisKind::Hw } else { BasisKind::Gm };
        let mut r = rng::stream(seed);
        let m: CMatrix = linalg::random_hermitian(k.pow(n as u32), &mut r);
        let a = Observable::new(n, k, m).unwrap();
        let b = Observable::from_coeffs(n, k, kind, &a.expand(kind)).unwrap();
        let diff = (a.matrix() - b.matrix()).norm();
        prop_assert!(diff <= 1e-10);
    }
}
