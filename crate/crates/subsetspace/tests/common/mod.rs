//! Oracles and samplers shared by the integration suites. The oracles stay
//! independent of the library routines they check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subsetspace::{FiniteSubset, NormDescriptor, PExponent};

/// Hausdorff distance by the epsilon-neighborhood characterization:
/// the least eps with each set inside the other's closed eps-neighborhood.
/// Candidates are the pairwise distances; the first feasible one wins.
pub fn hausdorff_epsilon_oracle(x: &FiniteSubset, y: &FiniteSubset) -> f64 {
    let contained = |a: &FiniteSubset, b: &FiniteSubset, eps: f64| -> bool {
        a.points()
            .iter()
            .all(|p| b.points().iter().any(|q| p.distance(q).unwrap() <= eps))
    };
    let mut candidates: Vec<f64> = Vec::with_capacity(x.len() * y.len());
    for p in x.points() {
        for q in y.points() {
            candidates.push(p.distance(q).unwrap());
        }
    }
    candidates.sort_by(f64::total_cmp);
    for &eps in &candidates {
        if contained(x, y, eps) && contained(y, x, eps) {
            return eps;
        }
    }
    *candidates.last().expect("nonempty sets")
}

/// Brute-force gap: max over bipartitions of the min cross distance.
pub fn bipartition_gap_oracle(x: &FiniteSubset) -> f64 {
    let n = x.len();
    let pts = x.points();
    let mut best = 0.0f64;
    for mask in 1u64..(1u64 << (n - 1)) {
        let in_b = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
        let mut dist = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                if in_b(i) != in_b(j) {
                    dist = dist.min(pts[i].distance(&pts[j]).unwrap());
                }
            }
        }
        best = best.max(dist);
    }
    best
}

pub const THREE_P: [PExponent; 3] = [
    PExponent::Finite(1.0),
    PExponent::Finite(2.0),
    PExponent::Infinity,
];

pub fn descriptor(p: PExponent, dim: usize) -> NormDescriptor {
    NormDescriptor::new(p, 1.0, dim).unwrap()
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_add(1));
    rng
}

/// Uniform set in the unit box with exactly `cardinality` distinct points.
pub fn box_set(norm: NormDescriptor, cardinality: usize, rng: &mut ChaCha8Rng) -> FiniteSubset {
    loop {
        let rows: Vec<Vec<f64>> = (0..cardinality)
            .map(|_| (0..norm.dim()).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let set = FiniteSubset::from_rows(norm, &rows).unwrap();
        if set.len() == cardinality {
            return set;
        }
    }
}

pub struct Criterion {
    label: &'static str,
    failures: Vec<String>,
    checks: u64,
}

impl Criterion {
    pub fn new(label: &'static str) -> Self {
        Criterion {
            label,
            failures: Vec::new(),
            checks: 0,
        }
    }

    pub fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(detail());
        }
    }

    pub fn finish(self) {
        if self.failures.is_empty() {
            println!("acceptance {}: PASS ({} checks)", self.label, self.checks);
        } else {
            println!(
                "acceptance {}: FAIL ({} checks, first failures: {:?})",
                self.label, self.checks, self.failures
            );
            panic!("acceptance criterion failed: {}", self.label);
        }
    }
}
