#![allow(dead_code)]

use gcrss::expected::GcrssProblem;
use gcrss::linalg::Matrix;
use gcrss::oracle::{random_matrix, random_problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random problem with random valid sizes.
pub fn sized_problem(seed: u64, max_nd: usize, max_sources: usize) -> GcrssProblem {
    let mut r = rng(seed);
    let p = random_problem(&mut r, max_nd, max_sources);
    let k = r.random_range(0..=p.n().min(p.d_b()));
    let rr = r.random_range(0..=p.n_c().min(p.d()));
    p.with_sizes(k, rr).unwrap()
}

/// Random `rows x cols` matrix of rank at most `rank`.
pub fn low_rank(seed: u64, rows: usize, cols: usize, rank: usize) -> Matrix {
    let mut r = rng(seed);
    random_matrix(&mut r, rows, rank) * random_matrix(&mut r, rank, cols)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
