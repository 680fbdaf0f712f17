mod common;

use common::{low_rank, rng};
use gcrss::linalg::{
    charpoly_gram, column_projector, frobenius_norm_sq, projector_complement_colspan,
    projector_rank_one_downdate, spectral_norm, Matrix, SubsetState, RANK_TOL,
};
use gcrss::oracle::random_matrix;
use gcrss::poly::maxroot;
use proptest::prelude::*;
use rand::seq::SliceRandom;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn projector_is_symmetric_idempotent(seed in any::<u64>(), rows in 1usize..=12, cols in 1usize..=12, rank in 0usize..=12) {
        let m = low_rank(seed, rows, cols, rank.min(rows).min(cols));
        let q = projector_complement_colspan(&m, RANK_TOL).unwrap();
        let qm = &q.mat;
        prop_assert!((qm * qm - qm).abs().max() <= 1e-10);
        prop_assert!((qm - qm.transpose()).abs().max() <= 1e-12);
        prop_assert!((qm * &m).abs().max() <= 1e-9 * m.abs().max().max(1.0));
        prop_assert_eq!(q.rank, rows - rank.min(rows).min(cols));
    }

    #[test]
    fn downdates_match_direct_projector(seed in any::<u64>(), n in 1usize..=10, m in 1usize..=12) {
        let mut r = rng(seed);
        let b = random_matrix(&mut r, n, m);
        let a = random_matrix(&mut r, n, 3);
        let c = Matrix::zeros(0, 3);
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut r);
        let mut st = SubsetState::initial(&a, &b, &c, RANK_TOL);
        for &i in order.iter().take(n.min(m)) {
            st = projector_rank_one_downdate(&st, i, &b.column(i).into_owned(), RANK_TOL).unwrap();
        }
        let direct = column_projector(&b, &st.subset, RANK_TOL).unwrap();
        let scale = direct.mat.abs().max().max(1.0);
        prop_assert!((&st.projector.mat - &direct.mat).abs().max() <= 1e-8 * scale);
    }

    #[test]
    fn lemma_5_1_pythagoras(seed in any::<u64>(), n in 1usize..=8, d in 1usize..=6, m in 1usize..=8) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, n, d);
        let b = low_rank(seed ^ 1, n, m, m.min(n).saturating_sub(1).max(1));
        let mut idx: Vec<usize> = (0..m).collect();
        idx.shuffle(&mut r);
        let s = &idx[..m / 2];
        let full = projector_complement_colspan(&b, RANK_TOL).unwrap().mat;
        let qs = column_projector(&b, s, RANK_TOL).unwrap().mat;
        let proj_a = &a - &full * &a;
        let lhs = spectral_norm(&(&qs * &a)).powi(2);
        let rhs = spectral_norm(&(&full * &a)).powi(2) + spectral_norm(&(&qs * proj_a)).powi(2);
        prop_assert!(lhs <= rhs + 1e-8 * rhs.max(1.0));
    }

    #[test]
    fn spectral_norm_matches_charpoly_root(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=8) {
        let mut r = rng(seed);
        let m = random_matrix(&mut r, rows, cols);
        let s2 = spectral_norm(&m).powi(2);
        let root = maxroot(&charpoly_gram(&m), 1e-12 * s2.max(1.0)).unwrap();
        prop_assert!((s2 - root).abs() <= 1e-8 * s2.max(1.0));
        prop_assert!(frobenius_norm_sq(&m) + 1e-12 >= s2);
    }
}
