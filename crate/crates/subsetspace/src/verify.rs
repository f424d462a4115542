//! Empirical estimators and counterexample fixtures: sampled Lipschitz
//! ratios, the Hölder-bound margin check, spaced pairs, and the hexagon
//! configuration on which pairwise-intersecting balls of X(2) share no point.
//!
//! Every estimate is reproducible: trial k draws from stream k of a seeded
//! ChaCha generator, and the reductions are order-independent, so the
//! parallel and sequential execution modes agree bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::batch::try_fold_trials;
use crate::error::{Error, Result};
use crate::norms::{NormDescriptor, Point};
use crate::subsets::{diameter, hausdorff, FiniteSubset};

/// Sampling regime for pair generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Independent uniform sets in the unit box.
    UniformBox,
    /// A box set paired with a perturbation at a prescribed tiny distance.
    NearCollision,
    /// Sets whose controlling functional sits near partition breakpoints.
    NearBreakpoint,
    /// 80% box, 10% near-collision, 10% near-breakpoint.
    Mixed,
}

/// Which functional the near-breakpoint regime steers, and towards which
/// breakpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BreakpointTarget {
    /// Minimum separation near 1/5 .. 1/4 of the diameter (triple maps).
    SeparationFifth,
    /// dist(x, X(2)) near 1/(3 tau) .. 1/(2 tau) (skeleton maps).
    ThinnessTau { tau: f64 },
    /// No meaningful breakpoint; the regime falls back to the box sampler.
    None,
}

/// Deterministic pair sampler: trial index k draws from stream k.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairSampler {
    pub kind: SamplerKind,
    pub cardinality: usize,
    pub norm: NormDescriptor,
    /// Pair distance scale for the near-collision regime.
    pub near_distance: f64,
    pub breakpoint: BreakpointTarget,
}

impl PairSampler {
    pub fn uniform(norm: NormDescriptor, cardinality: usize) -> Self {
        PairSampler {
            kind: SamplerKind::UniformBox,
            cardinality,
            norm,
            near_distance: 1e-5,
            breakpoint: BreakpointTarget::None,
        }
    }

    pub fn mixed(norm: NormDescriptor, cardinality: usize, breakpoint: BreakpointTarget) -> Self {
        PairSampler {
            kind: SamplerKind::Mixed,
            cardinality,
            norm,
            near_distance: 1e-5,
            breakpoint,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{:?} n={} dim={} p={:?}",
            self.kind,
            self.cardinality,
            self.norm.dim(),
            self.norm.p()
        )
    }

    fn rng_for(&self, seed: u64, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial.wrapping_add(1));
        rng
    }

    fn box_set(&self, rng: &mut ChaCha8Rng) -> FiniteSubset {
        let dim = self.norm.dim();
        loop {
            let rows: Vec<Vec<f64>> = (0..self.cardinality)
                .map(|_| (0..dim).map(|_| rng.random_range(0.0..1.0)).collect())
                .collect();
            let set = FiniteSubset::from_rows(self.norm, &rows).expect("finite rows");
            if set.len() == self.cardinality {
                return set;
            }
        }
    }

    fn perturbed(&self, x: &FiniteSubset, scale: f64, rng: &mut ChaCha8Rng) -> FiniteSubset {
        let rows: Vec<Vec<f64>> = x
            .points()
            .iter()
            .map(|p| {
                p.coords()
                    .iter()
                    .map(|c| c + rng.random_range(-scale..scale))
                    .collect()
            })
            .collect();
        FiniteSubset::from_rows(self.norm, &rows).expect("finite rows")
    }

    fn breakpoint_set(&self, rng: &mut ChaCha8Rng) -> FiniteSubset {
        match self.breakpoint {
            BreakpointTarget::SeparationFifth => {
                // normalized shape {0, delta', 1} + habitat noise, delta' near 1/5 .. 1/4
                let delta = rng.random_range(0.17..0.28);
                let dim = self.norm.dim();
                let scale = rng.random_range(0.5..2.0);
                let shift: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                let mut rows = vec![vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]];
                rows[1][0] = delta;
                rows[2][0] = 1.0;
                for row in rows.iter_mut() {
                    for (k, c) in row.iter_mut().enumerate() {
                        *c = *c * scale + shift[k];
                    }
                }
                FiniteSubset::from_rows(self.norm, &rows).expect("finite rows")
            }
            BreakpointTarget::ThinnessTau { tau } => {
                // two clusters with radius near the thinness breakpoints
                let r = rng.random_range(0.8 / (3.0 * tau)..1.2 / (2.0 * tau));
                let dim = self.norm.dim();
                let n = self.cardinality.max(3);
                let rows: Vec<Vec<f64>> = (0..n)
                    .map(|i| {
                        let anchor = if i % 2 == 0 { 0.0 } else { 1.0 };
                        let mut row: Vec<f64> =
                            (0..dim).map(|_| rng.random_range(-r..r)).collect();
                        row[0] += anchor;
                        row
                    })
                    .collect();
                FiniteSubset::from_rows(self.norm, &rows).expect("finite rows")
            }
            BreakpointTarget::None => self.box_set(rng),
        }
    }

    /// The (x, y) pair for one trial.
    pub fn sample_pair(&self, seed: u64, trial: u64) -> (FiniteSubset, FiniteSubset) {
        let mut rng = self.rng_for(seed, trial);
        let kind = match self.kind {
            SamplerKind::Mixed => match trial % 10 {
                0 => SamplerKind::NearCollision,
                1 => SamplerKind::NearBreakpoint,
                _ => SamplerKind::UniformBox,
            },
            k => k,
        };
        match kind {
            SamplerKind::UniformBox => (self.box_set(&mut rng), self.box_set(&mut rng)),
            SamplerKind::NearCollision => {
                let x = self.box_set(&mut rng);
                let y = self.perturbed(&x, self.near_distance, &mut rng);
                (x, y)
            }
            SamplerKind::NearBreakpoint => {
                let x = self.breakpoint_set(&mut rng);
                let y = self.perturbed(&x, 0.02, &mut rng);
                (x, y)
            }
            SamplerKind::Mixed => unreachable!("resolved above"),
        }
    }

    /// A single set (the x side of the pair sampler).
    pub fn sample_set(&self, seed: u64, trial: u64) -> FiniteSubset {
        self.sample_pair(seed, trial).0
    }
}

/// Result of an empirical Lipschitz sweep.
#[derive(Clone, Debug, Serialize)]
pub struct LipschitzEstimate {
    pub map: String,
    pub trials: u64,
    pub max_ratio: f64,
    #[serde(skip)]
    pub argmax: Option<(FiniteSubset, FiniteSubset)>,
    pub argmax_trial: Option<u64>,
    pub sampler: String,
    pub seed: u64,
}

/// Max over sampled pairs of `d_H(f(x), f(y)) / d_H(x, y)`, skipping pairs
/// closer than 1e-12. Deterministic given the seed; the reduction breaks
/// ratio ties towards the smaller trial index so the parallel and sequential
/// modes agree exactly.
pub fn estimate_lipschitz<F>(
    map_id: &str,
    map: F,
    sampler: &PairSampler,
    trials: u64,
    seed: u64,
) -> Result<LipschitzEstimate>
where
    F: Fn(&FiniteSubset) -> Result<FiniteSubset> + Sync + Send,
{
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial required".into()));
    }
    let eval = |trial: u64| -> Result<Option<(f64, u64)>> {
        let (x, y) = sampler.sample_pair(seed, trial);
        let dxy = hausdorff(&x, &y)?;
        if dxy < 1e-12 {
            return Ok(None);
        }
        let ratio = hausdorff(&map(&x)?, &map(&y)?)? / dxy;
        Ok(Some((ratio, trial)))
    };
    let best = try_fold_trials(trials, eval, |a, b| {
        if (b.0, a.1) > (a.0, b.1) {
            b
        } else {
            a
        }
    })?;
    let (max_ratio, argmax_trial) =
        best.ok_or_else(|| Error::NoData("every sampled pair was degenerate".into()))?;
    Ok(LipschitzEstimate {
        map: map_id.to_string(),
        trials,
        max_ratio,
        argmax: Some(sampler.sample_pair(seed, argmax_trial)),
        argmax_trial: Some(argmax_trial),
        sampler: sampler.describe(),
        seed,
    })
}

/// Right-hand side of the Hölder displacement bound for the collision flow:
/// `n (2n - 1) diam(x ∪ y)^{1 - 1/(2n-1)} d_H(x, y)^{1/(2n-1)}`.
pub fn holder_rhs(n: usize, x: &FiniteSubset, y: &FiniteSubset) -> Result<f64> {
    let nf = n as f64;
    let exponent = 1.0 / (2.0 * nf - 1.0);
    let union = x.union(y)?;
    let d = hausdorff(x, y)?;
    Ok(nf * (2.0 * nf - 1.0) * diameter(&union).powf(1.0 - exponent) * d.powf(exponent))
}

/// Min over sampled pairs of `RHS - d_H(f(x), f(y))` for the Hölder bound;
/// a nonnegative result certifies the bound on the sample.
pub fn check_holder<F>(
    map: F,
    n: usize,
    sampler: &PairSampler,
    trials: u64,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&FiniteSubset) -> Result<FiniteSubset> + Sync + Send,
{
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial required".into()));
    }
    let eval = |trial: u64| -> Result<Option<(f64, u64)>> {
        let (x, y) = sampler.sample_pair(seed, trial);
        if hausdorff(&x, &y)? < 1e-12 {
            return Ok(None);
        }
        let lhs = hausdorff(&map(&x)?, &map(&y)?)?;
        let margin = holder_rhs(n, &x, &y)? - lhs;
        Ok(Some((margin, trial)))
    };
    let worst = try_fold_trials(trials, eval, |a, b| {
        if (b.0, a.1) < (a.0, b.1) {
            b
        } else {
            a
        }
    })?;
    worst
        .map(|(m, _)| m)
        .ok_or_else(|| Error::NoData("every sampled pair was degenerate".into()))
}

/// The spaced-pair fixture in R:
/// `x = {0, m-1, m+1, 2m+1, ..., (n-2)m+1}`,
/// `y = {-1, 1, m, 2m+2, ..., (n-2)m+2}`; their Hausdorff distance is 1 and
/// no set is strictly closer than 1 to both.
pub fn spaced_pair(n: usize, m: f64) -> Result<(FiniteSubset, FiniteSubset)> {
    if n < 3 {
        return Err(Error::InvalidInput(
            "spaced pairs need n >= 3 (X(2) is geodesic)".into(),
        ));
    }
    if !(m > 3.0) {
        return Err(Error::InvalidInput(format!(
            "spaced pairs need m > 3, got {m}"
        )));
    }
    let norm = NormDescriptor::euclidean(1);
    let mut xs = vec![0.0, m - 1.0, m + 1.0];
    let mut ys = vec![-1.0, 1.0, m];
    for i in 4..=n {
        xs.push((i as f64 - 2.0) * m + 1.0);
        ys.push((i as f64 - 2.0) * m + 2.0);
    }
    Ok((
        FiniteSubset::from_scalars(norm, &xs)?,
        FiniteSubset::from_scalars(norm, &ys)?,
    ))
}

/// Smallest midpoint defect `max(d_H(x, z), d_H(z, y))` over sampled z:
/// perturbations of x and y plus uniform sets, cardinality up to `n`. For a
/// spaced pair the defect never drops below d_H(x, y). A sound but
/// necessarily incomplete check of the universal statement.
pub fn spaced_pair_midpoint_defect(
    x: &FiniteSubset,
    y: &FiniteSubset,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let norm = *x.norm_descriptor();
    let dim = norm.dim();
    let d_h = hausdorff(x, y)?;
    let lo = x.points()[0].coords()[0].min(y.points()[0].coords()[0]) - d_h;
    let hi = x
        .points()
        .last()
        .unwrap()
        .coords()
        .iter()
        .chain(y.points().last().unwrap().coords())
        .fold(f64::NEG_INFINITY, |m, v| m.max(*v))
        + d_h;
    let eval = |trial: u64| -> Result<Option<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial.wrapping_add(1));
        let z = match trial % 3 {
            0 | 1 => {
                let base = if trial % 3 == 0 { x } else { y };
                let scale = rng.random_range(0.0..1.5) * d_h;
                let rows: Vec<Vec<f64>> = base
                    .points()
                    .iter()
                    .map(|p| {
                        p.coords()
                            .iter()
                            .map(|c| c + rng.random_range(-scale..scale.max(1e-12)))
                            .collect()
                    })
                    .collect();
                FiniteSubset::from_rows(norm, &rows)?
            }
            _ => {
                let k = rng.random_range(1..=n);
                let rows: Vec<Vec<f64>> = (0..k)
                    .map(|_| (0..dim).map(|_| rng.random_range(lo..hi)).collect())
                    .collect();
                FiniteSubset::from_rows(norm, &rows)?
            }
        };
        let defect = hausdorff(x, &z)?.max(hausdorff(&z, y)?);
        Ok(Some(defect))
    };
    let worst = try_fold_trials(trials, eval, f64::min)?;
    worst.ok_or_else(|| Error::NoData("no midpoint candidates sampled".into()))
}

/// The hexagon fixture: three 2-point sets whose unit-circle points are the
/// vertices of a regular hexagon of side 1, in the order x1 y1 z1 x2 y2 z2.
/// The closed balls of radius 1/2 around them intersect pairwise in X(2) but
/// share no point.
#[derive(Clone, Debug)]
pub struct BipHexagon {
    pub x: FiniteSubset,
    pub y: FiniteSubset,
    pub z: FiniteSubset,
    pub radius: f64,
}

pub fn bip_hexagon() -> BipHexagon {
    let norm = NormDescriptor::euclidean(2);
    let vertex = |k: usize| -> Vec<f64> {
        let angle = std::f64::consts::TAU * k as f64 / 6.0;
        vec![angle.cos(), angle.sin()]
    };
    let pair = |a: usize, b: usize| -> FiniteSubset {
        FiniteSubset::from_rows(norm, &[vertex(a), vertex(b)]).expect("hexagon vertices")
    };
    BipHexagon {
        x: pair(0, 3),
        y: pair(1, 4),
        z: pair(2, 5),
        radius: 0.5,
    }
}

/// Grid verification of the hexagon obstruction.
#[derive(Clone, Debug, Serialize)]
pub struct BipReport {
    pub pairwise: [f64; 3],
    pub pairwise_intersecting: bool,
    pub triple_intersection_found: bool,
    pub grid_points_per_axis: usize,
    pub tolerance: f64,
}

/// Confirms the pairwise Hausdorff distances are at most 1 (so the radius-1/2
/// balls intersect pairwise) and searches a grid for a point covered by three
/// of the six vertex balls of radius 1/2 - tol; finding none certifies the
/// empty triple intersection at grid resolution.
pub fn verify_bip_hexagon(fix: &BipHexagon, grid_points_per_axis: usize, tol: f64) -> Result<BipReport> {
    let pairwise = [
        hausdorff(&fix.x, &fix.y)?,
        hausdorff(&fix.y, &fix.z)?,
        hausdorff(&fix.x, &fix.z)?,
    ];
    let pairwise_intersecting = pairwise.iter().all(|&d| d <= 2.0 * fix.radius + 1e-12);

    let centers: Vec<&Point> = fix
        .x
        .points()
        .iter()
        .chain(fix.y.points())
        .chain(fix.z.points())
        .collect();
    let r_strict = fix.radius - tol;
    let mut found = false;
    let steps = grid_points_per_axis;
    'outer: for i in 0..steps {
        for j in 0..steps {
            let gx = -1.0 + 2.0 * i as f64 / (steps - 1) as f64;
            let gy = -1.0 + 2.0 * j as f64 / (steps - 1) as f64;
            let mut covered = 0;
            for c in &centers {
                let dx = gx - c.coords()[0];
                let dy = gy - c.coords()[1];
                if (dx * dx + dy * dy).sqrt() <= r_strict {
                    covered += 1;
                }
            }
            if covered >= 3 {
                found = true;
                break 'outer;
            }
        }
    }
    Ok(BipReport {
        pairwise,
        pairwise_intersecting,
        triple_intersection_found: found,
        grid_points_per_axis: steps,
        tolerance: tol,
    })
}
