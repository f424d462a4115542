//! Quasigeodesic and geodesic construction in X(n).
//!
//! A path is stored symbolically as one or two legs, each a bundle of
//! straight-line component segments driven by a complete relation; sampling
//! at a parameter collects the segment points into a canonical subset. The
//! Hausdorff distance of samples is then exact, so speed checks are limited
//! only by grid resolution.

use crate::error::{Error, Result};
use crate::norms::{Point, DEFAULT_TOL};
use crate::relations::{proximal_complete_relation, proximal_split, reduce, CompleteRelation};
use crate::subsets::{hausdorff, FiniteSubset};

#[derive(Clone, Debug)]
struct PathLeg {
    t0: f64,
    t1: f64,
    segments: Vec<(Point, Point)>,
}

/// A path t -> Γ(t) in X(n) made of per-pair straight-line components.
#[derive(Clone, Debug)]
pub struct SubsetPath {
    legs: Vec<PathLeg>,
    cardinality_bound: usize,
}

impl SubsetPath {
    fn single_leg(segments: Vec<(Point, Point)>, cardinality_bound: usize) -> Self {
        SubsetPath {
            legs: vec![PathLeg {
                t0: 0.0,
                t1: 1.0,
                segments,
            }],
            cardinality_bound,
        }
    }

    fn constant(x: &FiniteSubset) -> Self {
        let segments = x
            .points()
            .iter()
            .map(|p| (p.clone(), p.clone()))
            .collect();
        SubsetPath::single_leg(segments, x.len())
    }

    /// Configuration at parameter `t` in [0, 1], as a canonical subset.
    pub fn sample(&self, t: f64) -> Result<FiniteSubset> {
        if !(-1e-12..=1.0 + 1e-12).contains(&t) {
            return Err(Error::Domain(format!("path parameter {t} outside [0, 1]")));
        }
        let t = t.clamp(0.0, 1.0);
        let leg = self
            .legs
            .iter()
            .find(|l| t <= l.t1)
            .unwrap_or_else(|| self.legs.last().expect("nonempty paths"));
        let s = if leg.t1 > leg.t0 {
            ((t - leg.t0) / (leg.t1 - leg.t0)).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let points = leg
            .segments
            .iter()
            .map(|(a, b)| a.lerp(b, s))
            .collect::<Result<Vec<_>>>()?;
        FiniteSubset::new(points)
    }

    pub fn cardinality_bound(&self) -> usize {
        self.cardinality_bound
    }

    /// `(Γ(0), Γ(1))`.
    pub fn endpoints(&self) -> Result<(FiniteSubset, FiniteSubset)> {
        Ok((self.sample(0.0)?, self.sample(1.0)?))
    }
}

fn segments_from_relation(r: &CompleteRelation) -> Vec<(Point, Point)> {
    r.pairs()
        .iter()
        .map(|&(i, j)| (r.left().points()[i].clone(), r.right().points()[j].clone()))
        .collect()
}

/// Straight-line path driven by a complete relation whose pairs all sit
/// within `lambda` times the endpoint Hausdorff distance.
pub fn quasigeodesic_from_relation(r: &CompleteRelation, lambda: f64) -> Result<SubsetPath> {
    if lambda < 1.0 {
        return Err(Error::InvalidInput(format!(
            "quasigeodesic constant must be >= 1, got {lambda}"
        )));
    }
    r.left().norm_descriptor().require_plain("quasigeodesic")?;
    let d_h = r.endpoint_hausdorff();
    let bound = lambda * d_h + DEFAULT_TOL;
    for &(i, j) in r.pairs() {
        let dist = r.left().points()[i].distance_unchecked(&r.right().points()[j]);
        if dist > bound {
            return Err(Error::NotALambdaRelation {
                i,
                j,
                dist,
                bound,
            });
        }
    }
    Ok(SubsetPath::single_leg(
        segments_from_relation(r),
        r.len(),
    ))
}

/// The 2-quasigeodesic from x to y through the midpoint set z = x'' ∪ y'
/// produced by the proximal split. Each half runs at parameter speed 2, so
/// the whole path has speed at most 2 d_H(x, y) and length at most
/// 2 d_H(x, y); the sample cardinality never exceeds max(|x|, |y|).
pub fn two_quasiconvex_path(x: &FiniteSubset, y: &FiniteSubset) -> Result<SubsetPath> {
    x.norm_descriptor().require_same(y.norm_descriptor())?;
    x.norm_descriptor().require_plain("two_quasiconvex_path")?;
    if x == y {
        return Ok(SubsetPath::constant(x));
    }
    let split = proximal_split(x, y)?;

    // z = x or z = y collapses the construction to a single proximal leg,
    // which is already a geodesic
    if split.g_pairs.is_empty() || split.f_pairs.is_empty() {
        let pairs = if split.g_pairs.is_empty() {
            &split.f_pairs
        } else {
            &split.g_pairs
        };
        let segments = pairs
            .iter()
            .map(|&(i, j)| (x.points()[i].clone(), y.points()[j].clone()))
            .collect();
        return Ok(SubsetPath::single_leg(segments, x.len().max(y.len())));
    }

    // leg 1: x -> z; mapped lefts travel to their images, image lefts stay
    let mut leg1: Vec<(Point, Point)> = split
        .f_pairs
        .iter()
        .map(|&(i, j)| (x.points()[i].clone(), y.points()[j].clone()))
        .collect();
    for &i in &split.x_image {
        leg1.push((x.points()[i].clone(), x.points()[i].clone()));
    }

    // leg 2: z -> y; image rights stay, mapped rights depart from their images
    let mut leg2: Vec<(Point, Point)> = split
        .y_image
        .iter()
        .map(|&j| (y.points()[j].clone(), y.points()[j].clone()))
        .collect();
    for &(i, j) in &split.g_pairs {
        leg2.push((x.points()[i].clone(), y.points()[j].clone()));
    }

    Ok(SubsetPath {
        legs: vec![
            PathLeg {
                t0: 0.0,
                t1: 0.5,
                segments: leg1,
            },
            PathLeg {
                t0: 0.5,
                t1: 1.0,
                segments: leg2,
            },
        ],
        cardinality_bound: x.len().max(y.len()),
    })
}

/// A geodesic between x and y in the larger stratum
/// X(max(|x|, |y|, |x| + |y| - 2)), built from the reduced proximal relation:
/// every component runs at speed at most d_H(x, y).
pub fn geodesic_in_larger_stratum(x: &FiniteSubset, y: &FiniteSubset) -> Result<SubsetPath> {
    x.norm_descriptor().require_same(y.norm_descriptor())?;
    x.norm_descriptor().require_plain("geodesic_in_larger_stratum")?;
    let bound = (x.len() + y.len())
        .saturating_sub(2)
        .max(x.len())
        .max(y.len());
    if x == y {
        let mut path = SubsetPath::constant(x);
        path.cardinality_bound = bound;
        return Ok(path);
    }
    let reduced = reduce(&proximal_complete_relation(x, y)?);
    debug_assert!(reduced.len() <= bound);
    let mut path = SubsetPath::single_leg(segments_from_relation(&reduced), bound);
    path.cardinality_bound = bound;
    Ok(path)
}

/// Max normalized speed over a uniform grid:
/// `max d_H(Γ(s), Γ(t)) / (|s - t| d_H(Γ(0), Γ(1)))` over grid pairs.
///
/// By the triangle inequality the ratio of any grid pair is bounded by the
/// largest adjacent-pair ratio, and adjacent pairs are themselves grid pairs,
/// so scanning adjacent pairs computes the max over all grid pairs exactly.
pub fn path_speed_profile(path: &SubsetPath, grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(Error::InvalidInput(format!(
            "speed profile needs a grid of at least 2 points, got {grid}"
        )));
    }
    let (start, end) = path.endpoints()?;
    let total = hausdorff(&start, &end)?;
    if total <= 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let step = 1.0 / (grid - 1) as f64;
    let mut max_ratio = 0.0f64;
    let mut prev = start;
    for k in 1..grid {
        let cur = path.sample(k as f64 * step)?;
        let d = hausdorff(&prev, &cur)?;
        max_ratio = max_ratio.max(d / (step * total));
        prev = cur;
    }
    Ok(max_ratio)
}
