mod common;

use common::{rng, sized_problem};
use gcrss::linalg::{charpoly_gram, Matrix};
use gcrss::oracle::{
    enumerate_optimum, multiaffine_convolution_check, random_matrix, volume_weight,
};
use gcrss::selection::{select_gcrss, SelectionConfig};
use itertools::Itertools;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn volume_weights_sum_to_gram_coefficient(seed in any::<u64>(), n in 1usize..=6, db in 1usize..=8) {
        let mut r = rng(seed);
        let b = random_matrix(&mut r, n, db);
        let k = r.random_range(0..=db);
        let total: f64 = (0..db).combinations(k).map(|s| volume_weight(&b, &s).unwrap()).sum();
        // det[x I + B^T B] = (-1)^{d_B} det[(-x) I - B^T B]
        let cp = charpoly_gram(&b);
        let coef = cp.coeff(db - k) * if k % 2 == 1 { -1.0 } else { 1.0 };
        prop_assert!((total - coef).abs() <= 1e-8 * total.abs().max(1.0));
    }

    #[test]
    fn multiaffine_identity(seed in any::<u64>(), n in 1usize..=6, d in 1usize..=6, db in 1usize..=6) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, d);
        let b = random_matrix(&mut r, n, db);
        let k = r.random_range(0..=n.min(db));
        let (x, y) = multiaffine_convolution_check(&a, &b, k).unwrap();
        prop_assert!(x.rel_distance(&y) <= 1e-6);
    }

    #[test]
    fn enumeration_lower_bounds_greedy(seed in any::<u64>()) {
        let p = sized_problem(seed, 5, 6);
        let eta = 1e-8;
        let opt = enumerate_optimum(&p).unwrap();
        let res = select_gcrss(&p, &SelectionConfig::with_eta(eta)).unwrap();
        prop_assert!(opt.value.powi(2) <= res.residual_spectral_sq * (1.0 + 1e-12) + 1e-14);
        prop_assert!(res.residual_spectral_sq <= 2.0 * (p.k + p.r) as f64 * eta + res.maxroot_bound + 1e-7);
    }
}

#[test]
fn volume_weight_of_orthonormal_columns() {
    let q = random_matrix(&mut rng(3), 6, 4).qr().q();
    for s in (0..4).combinations(2) {
        assert!((volume_weight(&q, &s).unwrap() - 1.0).abs() < 1e-12);
    }
    assert_eq!(volume_weight(&Matrix::zeros(2, 2), &[]).unwrap(), 1.0);
}
