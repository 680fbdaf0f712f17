//! Seeded random self-checks run by the `verify` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::expected::{expected_poly, GcrssProblem, PolyPath};
use crate::oracle::{enumerate_optimum, random_problem, random_symmetric, thompson_identity_check};
use crate::poly::{companion_roots, maxroot_eta};
use crate::selection::{select_gcrss, SelectionConfig};

/// Outcome of one property over all generated instances.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    pub failures: usize,
    /// Smallest observed margin (allowed minus observed); negative on failure.
    pub worst_slack: Option<f64>,
}

struct Tally {
    name: &'static str,
    instances: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, instances: 0, failures: 0, worst: f64::INFINITY }
    }

    fn record(&mut self, slack: f64) {
        self.instances += 1;
        if slack.is_nan() || slack < 0.0 {
            self.failures += 1;
        }
        self.worst = self.worst.min(if slack.is_nan() { f64::NEG_INFINITY } else { slack });
    }

    fn fail(&mut self) {
        self.record(f64::NEG_INFINITY);
    }

    fn finish(self) -> PropertyOutcome {
        PropertyOutcome {
            name: self.name.to_string(),
            passed: self.failures == 0 && self.instances > 0,
            instances: self.instances,
            failures: self.failures,
            worst_slack: match self.worst {
                w if w.is_finite() => Some(w),
                w if w < 0.0 => Some(-1.0),
                _ => None,
            },
        }
    }
}

/// Relative max-coefficient distance allowed between routes.
pub const PATH_TOL: f64 = 1e-7;
const ETA: f64 = 1e-8;

fn with_sizes<R: Rng>(rng: &mut R, max_size: usize) -> GcrssProblem {
    let max_sources = max_size + 1;
    let p = random_problem(rng, max_size, max_sources);
    let k = rng.random_range(0..=p.n().min(p.d_b()));
    let r = rng.random_range(0..=p.n_c().min(p.d()));
    p.with_sizes(k, r).expect("sizes within rank")
}

pub fn verify(seed: u64, instances: usize, max_size: usize) -> Result<Vec<PropertyOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sandwich = Tally::new("selection_sandwich");
    let mut monotone = Tally::new("trace_monotonicity");
    let mut paths = Tally::new("path_equivalence");
    let mut rooted = Tally::new("real_rootedness");
    let mut thompson = Tally::new("thompson_identity");
    let cfg = SelectionConfig::with_eta(ETA);

    for _ in 0..instances {
        let prob = with_sizes(&mut rng, max_size);
        let scale = prob.a.norm_squared().max(1.0);

        match (enumerate_optimum(&prob), select_gcrss(&prob, &cfg)) {
            (Ok(opt), Ok(res)) => {
                let allowed = 2.0 * (prob.k + prob.r) as f64 * ETA + res.maxroot_bound + 1e-7 * scale;
                let lower = res.residual_spectral_sq - opt.value * opt.value + 1e-9 * scale;
                sandwich.record(lower.min(allowed - res.residual_spectral_sq));
                let mut slack = f64::INFINITY;
                for pair in res.trace.windows(2) {
                    slack = slack.min(pair[0].lambda + 2.0 * ETA * scale - pair[1].lambda);
                }
                monotone.record(slack);
            }
            _ => sandwich.fail(),
        }

        match expected_poly(&prob, Some(PolyPath::Definition)) {
            Ok(reference) => {
                for path in PolyPath::ALL.into_iter().filter(|p| *p != PolyPath::Definition) {
                    if !path.applies_to(&prob) {
                        continue;
                    }
                    match expected_poly(&prob, Some(path)) {
                        Ok(p) => paths.record(PATH_TOL - p.rel_distance(&reference)),
                        Err(_) => paths.fail(),
                    }
                }
                if reference.is_zero() {
                    continue;
                }
                let lead = reference.max_abs_coeff();
                let mut slack = f64::INFINITY;
                match companion_roots(&reference) {
                    Ok(roots) => {
                        let mag = roots.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
                        for z in roots {
                            slack = slack.min(1e-6 * mag - z.im.abs()).min(z.re + 1e-6);
                        }
                    }
                    Err(_) => slack = -1.0,
                }
                if maxroot_eta(&reference, 1e-10 * lead.max(1.0)).is_err() && reference.degree() > Some(0) {
                    slack = -1.0;
                }
                rooted.record(slack);
            }
            Err(_) => paths.fail(),
        }

        let d = rng.random_range(1..=max_size.min(8));
        let m = random_symmetric(&mut rng, d);
        let k = rng.random_range(0..=d);
        let (left, right) = thompson_identity_check(&m, k)?;
        thompson.record(PATH_TOL - left.rel_distance(&right));
    }
    Ok([sandwich, monotone, paths, rooted, thompson].into_iter().map(Tally::finish).collect())
}
