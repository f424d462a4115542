//! Retractions X(n) -> X(k) over a normed ambient space.
//!
//! Four constructions:
//!
//! - the pair average X(2) -> X, 1-Lipschitz;
//! - the interpolated map X(3) -> X(2): on normalized central triples it
//!   blends the close-pair collapse with the full average through a Lipschitz
//!   partition of unity in the minimum separation, then extends homogeneously
//!   (Lipschitz constant 6 * 121 + 5 = 731);
//! - selector-based maps X(n) -> X and the skeleton map X(n) -> X(2), built
//!   on the Steiner point of the convex hull with the thinness predicate
//!   `dist(x, X(2))` and breakpoints 1/(3 tau), 1/(2 tau);
//! - the collision flow X(n) -> X(n-1): integrate du_i/dt = -J_i(u) with
//!   J_i(x) = sum_{j != i} (x_i - x_j)/||x_i - x_j|| until the minimum
//!   separation crosses the merge tolerance, then merge.

use crate::error::{Error, Result};
use crate::hull::{hull_membership_residual, steiner_point};
use crate::norms::{NormDescriptor, Point};
use crate::subsets::{diameter, dist_to_x2, two_cluster_decomposition, FiniteSubset};

/// Piecewise-linear partition of unity: phi1 = 1 below `t_low`, 0 above
/// `t_high`, affine in between; phi1 + phi2 = 1 everywhere and both are
/// Lipschitz with constant 1/(t_high - t_low).
#[derive(Clone, Copy, Debug)]
pub struct PartitionOfUnity {
    t_low: f64,
    t_high: f64,
}

impl PartitionOfUnity {
    pub fn new(t_low: f64, t_high: f64) -> Result<Self> {
        if !(t_low.is_finite() && t_high.is_finite() && t_low < t_high) {
            return Err(Error::InvalidInput(format!(
                "breakpoints must satisfy t_low < t_high, got {t_low}, {t_high}"
            )));
        }
        Ok(PartitionOfUnity { t_low, t_high })
    }

    /// Breakpoints 1/5 and 1/4 used by the X(3) interpolation.
    pub fn interpolation_3() -> Self {
        PartitionOfUnity {
            t_low: 0.2,
            t_high: 0.25,
        }
    }

    /// Breakpoints 1/(3 tau) and 1/(2 tau) used by the skeleton map.
    pub fn skeleton(tau: f64) -> Result<Self> {
        PartitionOfUnity::new(1.0 / (3.0 * tau), 1.0 / (2.0 * tau))
    }

    pub fn breakpoints(&self) -> (f64, f64) {
        (self.t_low, self.t_high)
    }

    pub fn phi1(&self, t: f64) -> f64 {
        ((self.t_high - t) / (self.t_high - self.t_low)).clamp(0.0, 1.0)
    }

    pub fn phi2(&self, t: f64) -> f64 {
        1.0 - self.phi1(t)
    }
}

fn average(points: &[&Point]) -> Point {
    let norm = *points[0].norm_descriptor();
    let dim = norm.dim();
    let mut coords = vec![0.0; dim];
    for p in points {
        for (c, v) in coords.iter_mut().zip(p.coords()) {
            *c += v;
        }
    }
    for c in coords.iter_mut() {
        *c /= points.len() as f64;
    }
    Point::new(coords, norm).expect("finite average")
}

fn subset_average(x: &FiniteSubset) -> Point {
    let refs: Vec<&Point> = x.points().iter().collect();
    average(&refs)
}

/// The 1-Lipschitz retraction X(2) -> X: a pair maps to its average, a
/// singleton to itself.
pub fn retract_pair_average(x: &FiniteSubset) -> Result<FiniteSubset> {
    if x.len() > 2 {
        return Err(Error::InvalidInput(format!(
            "pair average needs cardinality <= 2, got {}",
            x.len()
        )));
    }
    x.norm_descriptor().require_plain("retract_pair_average")?;
    if x.len() == 1 {
        return Ok(x.clone());
    }
    Ok(FiniteSubset::singleton(subset_average(x)))
}

fn require_central_normalized(x: &FiniteSubset, tol: f64) -> Result<()> {
    let central = x
        .points()
        .iter()
        .any(|p| p.coords().iter().all(|c| c.abs() <= tol));
    if !central {
        return Err(Error::InvalidInput("element is not central (0 not in x)".into()));
    }
    if (diameter(x) - 1.0).abs() > tol {
        return Err(Error::InvalidInput(format!(
            "element is not normalized: diam = {}",
            diameter(x)
        )));
    }
    Ok(())
}

/// Labels a 3-point set so that d(x1, x2) <= d(x2, x3) <= d(x1, x3) = diam;
/// ties resolve lexicographically through the canonical point order.
fn label_triple(x: &FiniteSubset) -> (Point, Point, Point) {
    let pts = x.points();
    let mut close = (0usize, 1usize, f64::INFINITY);
    for i in 0..3 {
        for j in (i + 1)..3 {
            let d = pts[i].distance_unchecked(&pts[j]);
            if d < close.2 {
                close = (i, j, d);
            }
        }
    }
    let (i, j, _) = close;
    let k = 3 - i - j;
    let di = pts[i].distance_unchecked(&pts[k]);
    let dj = pts[j].distance_unchecked(&pts[k]);
    // x1 is the member of the close pair farther from the vertex
    if di > dj {
        (pts[i].clone(), pts[j].clone(), pts[k].clone())
    } else if dj > di {
        (pts[j].clone(), pts[i].clone(), pts[k].clone())
    } else {
        (pts[i].clone(), pts[j].clone(), pts[k].clone())
    }
}

/// Interpolation map on normalized central elements of X(3): collapses the
/// close pair when the separation is at most 1/5, averages everything when it
/// is at least 1/4, and blends the two by Minkowski combination in between.
/// Fixes elements of X(2).
pub fn interpolation_map_3(x: &FiniteSubset) -> Result<FiniteSubset> {
    x.norm_descriptor().require_plain("interpolation_map_3")?;
    if x.len() > 3 {
        return Err(Error::InvalidInput(format!(
            "interpolation map needs cardinality <= 3, got {}",
            x.len()
        )));
    }
    require_central_normalized(x, 1e-9)?;
    if x.len() <= 2 {
        return Ok(x.clone());
    }
    let (x1, x2, x3) = label_triple(x);
    let delta = x1.distance_unchecked(&x2);
    let pou = PartitionOfUnity::interpolation_3();
    let phi1 = pou.phi1(delta);
    let phi2 = pou.phi2(delta);

    let close_mid = average(&[&x1, &x2]);
    let avg = subset_average(x);

    // phi1 {mid, x3} + phi2 {avg}: Minkowski sum of the scaled sets
    let combine = |a: &Point, b: &Point| -> Point {
        let coords = a
            .coords()
            .iter()
            .zip(b.coords())
            .map(|(u, v)| phi1 * u + phi2 * v)
            .collect();
        Point::new(coords, *a.norm_descriptor()).expect("finite combination")
    };
    FiniteSubset::new(vec![combine(&close_mid, &avg), combine(&x3, &avg)])
}

/// Canonical normalization x = t * x0 + v with v the lexicographically
/// smallest point and t = diam(x); x0 is central and normalized.
fn normalize(x: &FiniteSubset) -> Result<(FiniteSubset, f64, Vec<f64>)> {
    let v = x.points()[0].coords().to_vec();
    let t = diameter(x);
    debug_assert!(t > 0.0);
    let norm = *x.norm_descriptor();
    let points = x
        .points()
        .iter()
        .map(|p| {
            let coords = p
                .coords()
                .iter()
                .zip(&v)
                .map(|(c, vc)| (c - vc) / t)
                .collect();
            Point::new(coords, norm)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((FiniteSubset::new(points)?, t, v))
}

fn scale_shift(x: &FiniteSubset, t: f64, v: &[f64]) -> Result<FiniteSubset> {
    let norm = *x.norm_descriptor();
    let points = x
        .points()
        .iter()
        .map(|p| {
            let coords = p
                .coords()
                .iter()
                .zip(v)
                .map(|(c, vc)| t * c + vc)
                .collect();
            Point::new(coords, norm)
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteSubset::new(points)
}

/// The Lipschitz retraction X(3) -> X(2): homogeneous extension of the
/// interpolation map under the canonical normalization. Identity on X(2),
/// output contained in the convex hull of the input.
pub fn retract_3_to_2(x: &FiniteSubset) -> Result<FiniteSubset> {
    x.norm_descriptor().require_plain("retract_3_to_2")?;
    if x.len() > 3 {
        return Err(Error::InvalidInput(format!(
            "retract_3_to_2 needs cardinality <= 3, got {}",
            x.len()
        )));
    }
    if x.len() <= 2 {
        return Ok(x.clone());
    }
    let (x0, t, v) = normalize(x)?;
    let r0 = interpolation_map_3(&x0)?;
    scale_shift(&r0, t, &v)
}

/// Options for the Steiner-point selector's Monte Carlo branch (dimension 3
/// and up); dimensions 1 and 2 are exact and ignore them.
#[derive(Clone, Copy, Debug)]
pub struct SelectorOptions {
    pub samples: u64,
    pub seed: u64,
}

impl Default for SelectorOptions {
    fn default() -> Self {
        SelectorOptions {
            samples: 100_000,
            seed: 0x5e1ec707,
        }
    }
}

/// A point of Conv(x): the Steiner point of the hull. Exact midpoint in
/// dimension 1, exterior-angle weighted hull average in dimension 2, seeded
/// sphere-average of support points beyond.
pub fn selector(x: &FiniteSubset, opts: &SelectorOptions) -> Result<Point> {
    x.norm_descriptor().require_plain("selector")?;
    if x.len() == 1 {
        return Ok(x.points()[0].clone());
    }
    let rows = x.coord_rows();
    let coords = steiner_point(&rows, x.norm_descriptor().dim(), opts.samples, opts.seed);
    Point::new(coords, *x.norm_descriptor())
}

/// The selector retraction X(n) -> X: `{selector(Conv x)}`; identity on
/// singletons.
pub fn retract_n_to_1(x: &FiniteSubset, opts: &SelectorOptions) -> Result<FiniteSubset> {
    if x.len() == 1 {
        return Ok(x.clone());
    }
    Ok(FiniteSubset::singleton(selector(x, opts)?))
}

/// Cardinality limit inherited from the exact `dist_to_x2` enumeration.
pub const RETRACT_N_TO_2_LIMIT: usize = crate::subsets::DIST_TO_X2_LIMIT;

/// The skeleton retraction X(n) -> X(2) with parameter `tau > 6`: on 2-thin
/// normalized inputs it selects a point in each cluster of the
/// (2/tau, 1 - 4/tau)-decomposition, far from thinness it collapses to the
/// selector point, and a partition of unity in dist(x, X(2)) with
/// breakpoints 1/(3 tau), 1/(2 tau) blends the regimes. Identity on X(2).
pub fn retract_n_to_2(x: &FiniteSubset, tau: f64, opts: &SelectorOptions) -> Result<FiniteSubset> {
    if !(tau > 6.0) {
        return Err(Error::InvalidInput(format!(
            "skeleton parameter must exceed 6, got {tau}"
        )));
    }
    x.norm_descriptor().require_plain("retract_n_to_2")?;
    if x.len() <= 2 {
        return Ok(x.clone());
    }
    if x.len() > RETRACT_N_TO_2_LIMIT {
        return Err(Error::SizeLimit {
            got: x.len(),
            limit: RETRACT_N_TO_2_LIMIT,
        });
    }
    let (x0, t, v) = normalize(x)?;
    let (thinness, _) = dist_to_x2(&x0)?;
    let pou = PartitionOfUnity::skeleton(tau)?;
    let phi1 = pou.phi1(thinness);
    let phi2 = pou.phi2(thinness);

    let r2 = if phi2 > 0.0 {
        Some(selector(&x0, opts)?)
    } else {
        None
    };
    let r1 = if phi1 > 0.0 {
        let (a, b) = two_cluster_decomposition(&x0, 2.0 / tau, 1.0 - 4.0 / tau)?
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "no two-cluster decomposition although dist(x, X(2)) = {thinness} < 1/(2 tau)"
                ))
            })?;
        Some((selector(&a, opts)?, selector(&b, opts)?))
    } else {
        None
    };

    let r0 = match (r1, r2) {
        (Some((sa, sb)), None) => FiniteSubset::new(vec![sa, sb])?,
        (None, Some(s)) => FiniteSubset::singleton(s),
        (Some((sa, sb)), Some(s)) => {
            let norm = *x0.norm_descriptor();
            let combine = |a: &Point| -> Point {
                let coords = a
                    .coords()
                    .iter()
                    .zip(s.coords())
                    .map(|(u, w)| phi1 * u + phi2 * w)
                    .collect();
                Point::new(coords, norm).expect("finite combination")
            };
            FiniteSubset::new(vec![combine(&sa), combine(&sb)])?
        }
        (None, None) => unreachable!("phi1 + phi2 = 1"),
    };
    scale_shift(&r0, t, &v)
}

/// The collision-flow vector field -J on a configuration of distinct points:
/// `-J_i = -sum_{j != i} (u_i - u_j) / ||u_i - u_j||`. Every component has
/// norm at most n - 1 and the components sum to zero.
pub fn flow_field(config: &[Point]) -> Result<Vec<Point>> {
    if config.is_empty() {
        return Err(Error::InvalidInput("empty configuration".into()));
    }
    let norm = *config[0].norm_descriptor();
    for p in config {
        norm.require_same(p.norm_descriptor())?;
    }
    norm.require_plain("flow_field")?;
    let n = config.len();
    let d = norm.dim();
    let mut flat = vec![0.0; n * d];
    for (i, p) in config.iter().enumerate() {
        flat[i * d..(i + 1) * d].copy_from_slice(p.coords());
    }
    let mut out = vec![0.0; n * d];
    if !eval_neg_field(&flat, n, d, &norm, &mut out) {
        return Err(Error::SingularField);
    }
    out.chunks(d)
        .map(|c| Point::new(c.to_vec(), norm))
        .collect()
}

/// Writes -J(state) into `out`; false when two points coincide exactly.
fn eval_neg_field(state: &[f64], n: usize, d: usize, norm: &NormDescriptor, out: &mut [f64]) -> bool {
    out.fill(0.0);
    let mut stack = [0.0f64; 8];
    let mut heap;
    let diff: &mut [f64] = if d <= 8 {
        &mut stack[..d]
    } else {
        heap = vec![0.0; d];
        &mut heap
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let (pi, pj) = (&state[i * d..(i + 1) * d], &state[j * d..(j + 1) * d]);
            for k in 0..d {
                diff[k] = pi[k] - pj[k];
            }
            let len = norm.norm_of(diff);
            if len == 0.0 {
                return false;
            }
            for k in 0..d {
                let unit = diff[k] / len;
                out[i * d + k] -= unit;
                out[j * d + k] += unit;
            }
        }
    }
    true
}

fn min_pairwise_flat(state: &[f64], n: usize, d: usize, norm: &NormDescriptor) -> f64 {
    let mut best = f64::INFINITY;
    let mut stack = [0.0f64; 8];
    let mut heap;
    let diff: &mut [f64] = if d <= 8 {
        &mut stack[..d]
    } else {
        heap = vec![0.0; d];
        &mut heap
    };
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..d {
                diff[k] = state[i * d + k] - state[j * d + k];
            }
            best = best.min(norm.norm_of(diff));
        }
    }
    best
}

/// Options for [`flow_retract`].
#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    /// Relative tolerance of the embedded-pair step controller.
    pub rk_tol: f64,
    /// Separation threshold that stops the flow; defaults to
    /// 1e-6 * delta(x) when unset.
    pub merge_tol: Option<f64>,
    pub max_steps: usize,
    /// Optional cap on the step size, for densely sampled trajectories.
    pub max_step: Option<f64>,
    pub record_trajectory: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            rk_tol: 1e-9,
            merge_tol: None,
            max_steps: 100_000,
            max_step: None,
            record_trajectory: true,
        }
    }
}

/// Outcome of the collision flow: the sampled trajectory, the collision time
/// estimate, and the merged output set (strictly fewer than n points).
#[derive(Clone, Debug)]
pub struct FlowResult {
    pub trajectory: Vec<(f64, Vec<Point>)>,
    pub collision_time: f64,
    pub output: FiniteSubset,
    pub merge_tolerance: f64,
}

/// Dormand-Prince 5(4) coefficients.
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B_ERR: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct Dp45 {
    n: usize,
    d: usize,
    norm: NormDescriptor,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
}

impl Dp45 {
    fn new(n: usize, d: usize, norm: NormDescriptor) -> Self {
        let len = n * d;
        Dp45 {
            n,
            d,
            norm,
            k: std::array::from_fn(|_| vec![0.0; len]),
            stage: vec![0.0; len],
        }
    }

    /// One trial step of size h from `u`; writes the 5th-order result into
    /// `out` and returns the scaled error estimate, or None when a stage hits
    /// a singular configuration.
    fn step(&mut self, u: &[f64], h: f64, out: &mut [f64], rk_tol: f64) -> Option<f64> {
        let len = u.len();
        if !eval_neg_field(u, self.n, self.d, &self.norm, &mut self.k[0]) {
            return None;
        }
        for s in 0..6 {
            for i in 0..len {
                let mut acc = 0.0;
                for (j, a) in DP_A[s].iter().enumerate().take(s + 1) {
                    acc += a * self.k[j][i];
                }
                self.stage[i] = u[i] + h * acc;
            }
            let (head, tail) = self.k.split_at_mut(s + 1);
            let _ = head;
            if !eval_neg_field(&self.stage, self.n, self.d, &self.norm, &mut tail[0]) {
                return None;
            }
        }
        // stage 6 of DP_A is the 5th-order combination itself
        out.copy_from_slice(&self.stage);
        let mut err = 0.0f64;
        for i in 0..len {
            let mut e = 0.0;
            for (j, b) in DP_B_ERR.iter().enumerate() {
                e += b * self.k[j][i];
            }
            e *= h;
            let scale = rk_tol + rk_tol * u[i].abs().max(out[i].abs());
            err = err.max((e / scale).abs());
        }
        Some(err)
    }
}

/// The collision-flow retraction X(n) -> X(n-1).
///
/// Inputs on a lower stratum return unchanged with collision time zero.
/// Otherwise the flow integrates until the minimum separation falls to the
/// merge tolerance, the crossing is bracketed by bisection inside the last
/// step, and single-linkage clusters at the threshold merge into their
/// averages.
pub fn flow_retract(x: &FiniteSubset, ambient_n: usize, opts: &FlowOptions) -> Result<FlowResult> {
    if ambient_n < 2 {
        return Err(Error::InvalidInput(format!(
            "ambient cardinality must be at least 2, got {ambient_n}"
        )));
    }
    if x.len() > ambient_n {
        return Err(Error::InvalidInput(format!(
            "cardinality {} exceeds ambient bound {ambient_n}",
            x.len()
        )));
    }
    x.norm_descriptor().require_plain("flow_retract")?;
    if x.len() < ambient_n {
        // lower stratum is fixed by the retraction
        return Ok(FlowResult {
            trajectory: vec![(0.0, x.points().to_vec())],
            collision_time: 0.0,
            output: x.clone(),
            merge_tolerance: opts.merge_tol.unwrap_or(0.0),
        });
    }

    let norm = *x.norm_descriptor();
    let n = x.len();
    let d = norm.dim();
    let mut u = vec![0.0; n * d];
    for (i, p) in x.points().iter().enumerate() {
        u[i * d..(i + 1) * d].copy_from_slice(p.coords());
    }
    let delta0 = min_pairwise_flat(&u, n, d, &norm);
    debug_assert!(delta0 > 0.0);
    let merge_tol = opts.merge_tol.unwrap_or(1e-6 * delta0);
    if !(merge_tol > 0.0 && merge_tol < delta0) {
        return Err(Error::InvalidInput(format!(
            "merge tolerance {merge_tol} must lie in (0, delta(x) = {delta0})"
        )));
    }
    // the separation shrinks at rate at least 2, so the crossing happens by
    // (delta0 - merge_tol) / 2; allow slack for the controller
    let max_time = 0.5 * delta0 * (1.0 + 1e-6) + merge_tol;

    let mut solver = Dp45::new(n, d, norm);
    let mut trajectory: Vec<(f64, Vec<Point>)> = Vec::new();
    let record = |traj: &mut Vec<(f64, Vec<Point>)>, t: f64, state: &[f64]| {
        let pts = state
            .chunks(d)
            .map(|c| Point::new(c.to_vec(), norm).expect("finite state"))
            .collect();
        traj.push((t, pts));
    };
    if opts.record_trajectory {
        record(&mut trajectory, 0.0, &u);
    }

    // Every pairwise distance decreases at a rate between 2 and 2(n-1)
    // along the flow, so the separation is strictly decreasing and a step of
    // at most (sep - merge_tol) / (2(n-1)) cannot jump past the threshold.
    // The stopping band below is then reached geometrically. The band is
    // widened by the coordinate resolution: separations cannot be resolved
    // below one ulp of the positions.
    let rate_max = 2.0 * (n as f64 - 1.0);
    let pos_scale = u.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let stop_band = merge_tol * (1.0 + 1e-6) + 1e-15 * pos_scale;
    let mut t = 0.0f64;
    let mut h = (delta0 / (20.0 * (n as f64 - 1.0))).min(max_time / 4.0);
    let mut u_next = vec![0.0; n * d];
    let mut steps = 0usize;
    let (collision_time, u_final) = loop {
        let sep = min_pairwise_flat(&u, n, d, &norm);
        if sep <= stop_band {
            break (t, u.clone());
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::IntegrationFailure(format!(
                "no collision within {} steps (t = {t}, delta = {sep})",
                opts.max_steps
            )));
        }
        if t > max_time {
            return Err(Error::IntegrationFailure(format!(
                "no collision by t = {t} although delta(x)/2 = {}",
                0.5 * delta0
            )));
        }
        let cap = (sep - merge_tol) / rate_max;
        let h_try = h
            .min(cap)
            .min(opts.max_step.unwrap_or(f64::INFINITY))
            .min(max_time * 1.01 - t);
        if h_try * rate_max < 1e-16 * pos_scale {
            // collision resolved to floating-point resolution
            break (t, u.clone());
        }
        match solver.step(&u, h_try, &mut u_next, opts.rk_tol) {
            None => {
                // a stage fell onto a singular configuration; shrink
                h = h_try * 0.25;
                continue;
            }
            Some(err) if err > 1.0 => {
                h = h_try * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                continue;
            }
            Some(err) => {
                u.copy_from_slice(&u_next);
                t += h_try;
                if opts.record_trajectory {
                    record(&mut trajectory, t, &u);
                }
                h = h_try * (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            }
        }
    };

    let output = merge_clusters(&u_final, n, d, &norm, stop_band * (1.0 + 1e-3))?;
    if output.len() >= n {
        return Err(Error::IntegrationFailure(format!(
            "merge produced {} points from {n}; separation {} vs tolerance {merge_tol}",
            output.len(),
            min_pairwise_flat(&u_final, n, d, &norm)
        )));
    }
    Ok(FlowResult {
        trajectory,
        collision_time,
        output,
        merge_tolerance: merge_tol,
    })
}

/// Single-linkage clusters at the threshold, replaced by their averages.
fn merge_clusters(
    state: &[f64],
    n: usize,
    d: usize,
    norm: &NormDescriptor,
    threshold: f64,
) -> Result<FiniteSubset> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let mut diff = vec![0.0; d];
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..d {
                diff[k] = state[i * d + k] - state[j * d + k];
            }
            if norm.norm_of(&diff) <= threshold {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut points: Vec<Point> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if seen.contains(&root) {
            continue;
        }
        seen.push(root);
        let members: Vec<usize> = (0..n).filter(|&j| find(&mut parent, j) == root).collect();
        let mut coords = vec![0.0; d];
        for &j in &members {
            for k in 0..d {
                coords[k] += state[j * d + k];
            }
        }
        for c in coords.iter_mut() {
            *c /= members.len() as f64;
        }
        points.push(Point::new(coords, *norm)?);
    }
    FiniteSubset::new(points)
}

/// Exact two-point flow: `u_i(t) = x_i - J_i(x) t` with constant field, valid
/// until the collision at t = ||x1 - x2|| / 2. Oracle for the integrator.
pub fn flow_closed_form_n2(x: &FiniteSubset, t: f64) -> Result<Vec<Point>> {
    if x.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "closed form needs exactly 2 points, got {}",
            x.len()
        )));
    }
    x.norm_descriptor().require_plain("flow_closed_form_n2")?;
    let (a, b) = (&x.points()[0], &x.points()[1]);
    let half_life = 0.5 * a.distance_unchecked(b);
    if !(0.0..=half_life + 1e-12).contains(&t) {
        return Err(Error::Domain(format!(
            "time {t} outside [0, {half_life}] (collision horizon)"
        )));
    }
    let unit = a.unit_direction(b)?;
    let norm = *x.norm_descriptor();
    let shift = |p: &Point, sign: f64| -> Result<Point> {
        let coords = p
            .coords()
            .iter()
            .zip(unit.coords())
            .map(|(c, u)| c + sign * t * u)
            .collect();
        Point::new(coords, norm)
    };
    Ok(vec![shift(a, -1.0)?, shift(b, 1.0)?])
}

/// Euclidean distance from `q` to Conv(x); the convex-hull invariance checks
/// run through this. Support enumeration is exponential, so the generator
/// count is capped.
pub fn hull_residual(q: &Point, x: &FiniteSubset) -> Result<f64> {
    q.norm_descriptor().require_same(x.norm_descriptor())?;
    if x.len() > 16 {
        return Err(Error::SizeLimit {
            got: x.len(),
            limit: 16,
        });
    }
    let rows = x.coord_rows();
    Ok(hull_membership_residual(
        q.coords(),
        &rows,
        x.norm_descriptor().dim(),
    ))
}
