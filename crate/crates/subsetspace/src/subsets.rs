//! The space X(n) of nonempty finite subsets with at most n points, metrized
//! by Hausdorff distance, together with its basic functionals: diameter,
//! minimum separation, gap, and the cluster decompositions built on them.
//!
//! A [`FiniteSubset`] is stored deduplicated (exact coordinate equality) in
//! lexicographic coordinate order, so set equality is sequence equality and
//! `hausdorff(x, y) == 0` exactly when `x == y`.
//!
//! The gap here measures set distance between complementary parts. The
//! variant that measures the Hausdorff distance between the parts is not
//! continuous in d_H (splitting off a near-duplicate point makes it jump by
//! the cluster spread), so no operation computes it.

use crate::center::{chebyshev_center, covering_radius};
use crate::error::{Error, Result};
use crate::norms::{NormDescriptor, Point};

/// A nonempty finite subset of the ambient space, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSubset {
    points: Vec<Point>,
    norm: NormDescriptor,
}

impl FiniteSubset {
    /// Builds the canonical representation: sorts lexicographically and drops
    /// exact duplicates. All points must share one descriptor.
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidInput("a finite subset must be nonempty".into()));
        };
        let norm = *first.norm_descriptor();
        for p in &points {
            norm.require_same(p.norm_descriptor())?;
        }
        points.sort_by(|a, b| a.lex_cmp(b));
        points.dedup_by(|a, b| a == b);
        Ok(FiniteSubset { points, norm })
    }

    /// Convenience constructor from raw coordinate rows.
    pub fn from_rows(norm: NormDescriptor, rows: &[Vec<f64>]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::new(r.clone(), norm))
            .collect::<Result<Vec<_>>>()?;
        FiniteSubset::new(points)
    }

    /// One-dimensional helper used pervasively in tests and fixtures.
    pub fn from_scalars(norm: NormDescriptor, values: &[f64]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = values.iter().map(|v| vec![*v]).collect();
        FiniteSubset::from_rows(norm, &rows)
    }

    pub fn singleton(p: Point) -> Self {
        let norm = *p.norm_descriptor();
        FiniteSubset { points: vec![p], norm }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn norm_descriptor(&self) -> &NormDescriptor {
        &self.norm
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.iter().any(|q| q == p)
    }

    pub fn union(&self, other: &FiniteSubset) -> Result<FiniteSubset> {
        self.norm.require_same(&other.norm)?;
        let mut pts = self.points.clone();
        pts.extend(other.points.iter().cloned());
        FiniteSubset::new(pts)
    }

    /// The same subset viewed in the snowflaked metric d^epsilon.
    pub fn snowflaked(&self, epsilon: f64) -> Result<FiniteSubset> {
        let norm = self.norm.snowflaked(epsilon)?;
        let points = self
            .points
            .iter()
            .map(|p| Point::new(p.coords().to_vec(), norm))
            .collect::<Result<Vec<_>>>()?;
        FiniteSubset::new(points)
    }

    pub(crate) fn coord_rows(&self) -> Vec<&[f64]> {
        self.points.iter().map(|p| p.coords()).collect()
    }
}

fn require_common(x: &FiniteSubset, y: &FiniteSubset) -> Result<()> {
    x.norm_descriptor().require_same(y.norm_descriptor())
}

/// Hausdorff distance by the max-min representation
/// `max(max_i min_j d(x_i, y_j), max_j min_i d(x_i, y_j))`.
pub fn hausdorff(x: &FiniteSubset, y: &FiniteSubset) -> Result<f64> {
    require_common(x, y)?;
    Ok(hausdorff_unchecked(x, y))
}

pub(crate) fn hausdorff_unchecked(x: &FiniteSubset, y: &FiniteSubset) -> f64 {
    let mut over_x = 0.0f64;
    let mut mins_y = vec![f64::INFINITY; y.len()];
    for xi in x.points() {
        let mut min = f64::INFINITY;
        for (j, yj) in y.points().iter().enumerate() {
            let d = xi.distance_unchecked(yj);
            if d < min {
                min = d;
            }
            if d < mins_y[j] {
                mins_y[j] = d;
            }
        }
        if min > over_x {
            over_x = min;
        }
    }
    let over_y = mins_y.iter().fold(0.0f64, |m, v| m.max(*v));
    over_x.max(over_y)
}

/// Hausdorff distance on X(2) via the closed two-matching form
/// `min(max(d(x1,y1), d(x2,y2)), max(d(x1,y2), d(x2,y1)))`.
///
/// Singletons are padded by repeating their point.
pub fn hausdorff_pairs(x: &FiniteSubset, y: &FiniteSubset) -> Result<f64> {
    require_common(x, y)?;
    if x.len() > 2 || y.len() > 2 {
        return Err(Error::InvalidInput(format!(
            "hausdorff_pairs needs cardinality <= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (x1, x2) = (&x.points()[0], x.points().last().unwrap());
    let (y1, y2) = (&y.points()[0], y.points().last().unwrap());
    let straight = x1
        .distance_unchecked(y1)
        .max(x2.distance_unchecked(y2));
    let crossed = x1
        .distance_unchecked(y2)
        .max(x2.distance_unchecked(y1));
    Ok(straight.min(crossed))
}

/// Largest pairwise distance; zero on singletons.
pub fn diameter(x: &FiniteSubset) -> f64 {
    let pts = x.points();
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.max(pts[i].distance_unchecked(&pts[j]));
        }
    }
    best
}

/// Minimum separation of `x` viewed as an element of X(n): the least pairwise
/// distance when `|x| = n`, and zero on the lower strata.
pub fn min_separation(x: &FiniteSubset, n: usize) -> Result<f64> {
    if x.len() > n {
        return Err(Error::InvalidInput(format!(
            "cardinality {} exceeds ambient bound {n}",
            x.len()
        )));
    }
    if x.len() < n {
        return Ok(0.0);
    }
    Ok(total_min_separation(x))
}

/// Least pairwise distance regardless of ambient cardinality; zero on
/// singletons by convention.
pub fn total_min_separation(x: &FiniteSubset) -> f64 {
    min_pairwise(&x.coord_rows(), x.norm_descriptor())
}

pub(crate) fn min_pairwise(rows: &[&[f64]], norm: &NormDescriptor) -> f64 {
    if rows.len() < 2 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut diff = vec![0.0; norm.dim()];
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            for (k, d) in diff.iter_mut().enumerate() {
                *d = rows[i][k] - rows[j][k];
            }
            best = best.min(norm.metric_of(norm.norm_of(&diff)));
        }
    }
    best
}

/// Pairwise distance matrix in canonical point order.
fn distance_matrix(x: &FiniteSubset) -> Vec<Vec<f64>> {
    let pts = x.points();
    let n = pts.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pts[i].distance_unchecked(&pts[j]);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Gap of a set: the largest distance between two nonempty complementary
/// parts. Computed as the maximum edge of a minimum spanning tree of the
/// complete distance graph (the single-linkage identity); the test suite
/// checks it against the brute-force bipartition value.
pub fn gap(x: &FiniteSubset) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidInput(
            "gap is undefined on singletons (empty bipartition family)".into(),
        ));
    }
    let m = distance_matrix(x);
    Ok(mst_max_edge(&m))
}

fn mst_max_edge(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j));
        }
    }
    edges.sort_by(|&(a, b), &(c, d)| m[a][b].total_cmp(&m[c][d]).then(a.cmp(&c)).then(b.cmp(&d)));
    let mut dsu = Dsu::new(n);
    let mut max_edge = 0.0f64;
    let mut used = 0;
    for (i, j) in edges {
        if dsu.union(i, j) {
            max_edge = max_edge.max(m[i][j]);
            used += 1;
            if used == n - 1 {
                break;
            }
        }
    }
    max_edge
}

/// A bipartition realizing the gap whose parts have gaps no larger than it.
///
/// Follows the equivalence-class construction: classes are chains of points
/// at distance strictly below the gap, the class graph carries an edge where
/// two classes sit at distance exactly the gap, and removing one spanning
/// tree edge splits the set. When several tree edges qualify, the one with
/// the lexicographically smallest endpoint pair goes.
pub fn gap_reducing_decomposition(x: &FiniteSubset) -> Result<(FiniteSubset, FiniteSubset)> {
    if x.len() < 2 {
        return Err(Error::InvalidInput(
            "gap decomposition is undefined on singletons".into(),
        ));
    }
    let n = x.len();
    let m = distance_matrix(x);
    let rho = mst_max_edge(&m);

    // equivalence classes: chains of steps shorter than rho
    let mut dsu = Dsu::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if m[i][j] < rho {
                dsu.union(i, j);
            }
        }
    }
    let mut class_of = vec![0usize; n];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..n {
        let root = dsu.find(i);
        if let Some(pos) = reps.iter().position(|&r| r == root) {
            class_of[i] = pos;
        } else {
            class_of[i] = reps.len();
            reps.push(root);
        }
    }
    let classes = reps.len();

    // class graph: edges exactly at distance rho, in lexicographic order of
    // the representative pair
    let mut class_dist = vec![vec![f64::INFINITY; classes]; classes];
    for i in 0..n {
        for j in (i + 1)..n {
            let (ci, cj) = (class_of[i], class_of[j]);
            if ci != cj {
                let d = m[i][j];
                if d < class_dist[ci][cj] {
                    class_dist[ci][cj] = d;
                    class_dist[cj][ci] = d;
                }
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for a in 0..classes {
        for b in (a + 1)..classes {
            if class_dist[a][b] == rho {
                edges.push((a, b));
            }
        }
    }
    edges.sort_by_key(|&(a, b)| (reps[a].min(reps[b]), reps[a].max(reps[b])));

    // spanning tree by Kruskal over those edges; classes at distance rho
    // keep the class graph connected
    let mut tree_dsu = Dsu::new(classes);
    let mut tree: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in &edges {
        if tree_dsu.union(a, b) {
            tree.push((a, b));
        }
    }
    if tree.len() != classes - 1 {
        return Err(Error::InvalidInput(
            "class graph disconnected; inconsistent distance data".into(),
        ));
    }
    let removed = tree[0];

    let mut side_dsu = Dsu::new(classes);
    for &(a, b) in tree.iter().skip(1) {
        side_dsu.union(a, b);
    }
    let side0 = side_dsu.find(removed.0);
    let mut part_a: Vec<Point> = Vec::new();
    let mut part_b: Vec<Point> = Vec::new();
    for (i, p) in x.points().iter().enumerate() {
        if side_dsu.find(class_of[i]) == side0 {
            part_a.push(p.clone());
        } else {
            part_b.push(p.clone());
        }
    }
    let a = FiniteSubset::new(part_a)?;
    let b = FiniteSubset::new(part_b)?;
    // return the part holding the lexicographically smallest point first
    if a.points()[0].lex_cmp(&b.points()[0]) == std::cmp::Ordering::Less {
        Ok((a, b))
    } else {
        Ok((b, a))
    }
}

/// Distance between two sets, `min over cross pairs`.
pub fn set_distance(a: &FiniteSubset, b: &FiniteSubset) -> Result<f64> {
    require_common(a, b)?;
    let mut best = f64::INFINITY;
    for p in a.points() {
        for q in b.points() {
            best = best.min(p.distance_unchecked(q));
        }
    }
    Ok(best)
}

/// Pairs each point of `x` with a unique point of `y` within Hausdorff
/// distance, available when one side's minimum separation exceeds twice the
/// Hausdorff distance (the covering balls are then disjoint).
///
/// Returns `out` with `out[i] = j` meaning `x_i <-> y_j`.
pub fn match_points(x: &FiniteSubset, y: &FiniteSubset) -> Result<Vec<usize>> {
    require_common(x, y)?;
    if x.len() != y.len() {
        return Err(Error::NoMatchingGuarantee(format!(
            "cardinalities differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    let rho = hausdorff_unchecked(x, y);
    let from_x = total_min_separation(x) > 2.0 * rho;
    let from_y = total_min_separation(y) > 2.0 * rho;
    if !from_x && !from_y {
        return Err(Error::NoMatchingGuarantee(format!(
            "neither side separates: delta(x) = {}, delta(y) = {}, 2 d_H = {}",
            total_min_separation(x),
            total_min_separation(y),
            2.0 * rho
        )));
    }
    let assign = |from: &FiniteSubset, to: &FiniteSubset| -> Result<Vec<usize>> {
        let mut used = vec![false; n];
        let mut out = vec![usize::MAX; n];
        for (i, p) in from.points().iter().enumerate() {
            let mut found = None;
            for (j, q) in to.points().iter().enumerate() {
                if p.distance_unchecked(q) <= rho {
                    found = Some(j);
                    break;
                }
            }
            let j = found.ok_or_else(|| {
                Error::NoMatchingGuarantee("no partner within Hausdorff distance".into())
            })?;
            if used[j] {
                return Err(Error::NoMatchingGuarantee(
                    "partner collision; separation hypothesis violated numerically".into(),
                ));
            }
            used[j] = true;
            out[i] = j;
        }
        Ok(out)
    };
    if from_x {
        assign(x, y)
    } else {
        let back = assign(y, x)?;
        let mut out = vec![usize::MAX; n];
        for (j, i) in back.into_iter().enumerate() {
            out[i] = j;
        }
        Ok(out)
    }
}

/// Two-cluster (alpha, beta)-decomposition: both parts of diameter at most
/// alpha, at distance at least beta. `None` when no bipartition qualifies;
/// unique up to swapping when `alpha < beta`.
pub fn two_cluster_decomposition(
    x: &FiniteSubset,
    alpha: f64,
    beta: f64,
) -> Result<Option<(FiniteSubset, FiniteSubset)>> {
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::InvalidInput(format!(
            "cluster parameters must be positive, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let n = x.len();
    if n > 32 {
        // bipartition enumeration is exponential
        return Err(Error::SizeLimit { got: n, limit: 32 });
    }
    if n < 2 {
        return Ok(None);
    }
    let m = distance_matrix(x);
    for mask in 1u64..(1u64 << (n - 1)) {
        // point 0 always lives in part A
        let in_b = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
        let mut diam_a = 0.0f64;
        let mut diam_b = 0.0f64;
        let mut dist_ab = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                match (in_b(i), in_b(j)) {
                    (false, false) => diam_a = diam_a.max(m[i][j]),
                    (true, true) => diam_b = diam_b.max(m[i][j]),
                    _ => dist_ab = dist_ab.min(m[i][j]),
                }
            }
        }
        if diam_a <= alpha && diam_b <= alpha && dist_ab >= beta {
            let (mut va, mut vb) = (Vec::new(), Vec::new());
            for (i, p) in x.points().iter().enumerate() {
                if in_b(i) {
                    vb.push(p.clone());
                } else {
                    va.push(p.clone());
                }
            }
            return Ok(Some((FiniteSubset::new(va)?, FiniteSubset::new(vb)?)));
        }
    }
    Ok(None)
}

/// Hausdorff distance from `x` to the next lower stratum X(|x|-1), with the
/// witness that attains it: the closest pair replaced by its midpoint. The
/// value is half the minimum separation.
pub fn dist_to_lower_stratum(x: &FiniteSubset) -> Result<(f64, FiniteSubset)> {
    if x.len() < 2 {
        return Err(Error::InvalidInput(
            "no lower stratum below singletons".into(),
        ));
    }
    x.norm_descriptor().require_plain("dist_to_lower_stratum")?;
    let pts = x.points();
    let mut best = (0usize, 1usize, f64::INFINITY);
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let d = pts[i].distance_unchecked(&pts[j]);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    let (i, j, delta) = best;
    let mid = pts[i].lerp(&pts[j], 0.5)?;
    let mut witness: Vec<Point> = pts
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i && *k != j)
        .map(|(_, p)| p.clone())
        .collect();
    witness.push(mid);
    Ok((0.5 * delta, FiniteSubset::new(witness)?))
}

/// Exact-enumeration cardinality limit for [`dist_to_x2`].
pub const DIST_TO_X2_LIMIT: usize = 12;

/// Hausdorff distance from `x` to the stratum X(2), with a witness pair.
///
/// Exact for `|x| <= 12` by enumerating bipartitions and taking each part's
/// Chebyshev radius under the ambient norm; the best bipartition's centers
/// form the witness.
pub fn dist_to_x2(x: &FiniteSubset) -> Result<(f64, FiniteSubset)> {
    x.norm_descriptor().require_plain("dist_to_x2")?;
    let n = x.len();
    if n > DIST_TO_X2_LIMIT {
        return Err(Error::SizeLimit {
            got: n,
            limit: DIST_TO_X2_LIMIT,
        });
    }
    if n <= 2 {
        return Ok((0.0, x.clone()));
    }
    let norm = *x.norm_descriptor();
    let rows = x.coord_rows();
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for mask in 1u64..(1u64 << (n - 1)) {
        let in_b = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
        let part_a: Vec<&[f64]> = (0..n).filter(|&i| !in_b(i)).map(|i| rows[i]).collect();
        let part_b: Vec<&[f64]> = (0..n).filter(|&i| in_b(i)).map(|i| rows[i]).collect();
        let (ca, ra) = chebyshev_center(&part_a, &norm)?;
        let (cb, rb) = chebyshev_center(&part_b, &norm)?;
        let cost = ra.max(rb);
        if best.as_ref().is_none_or(|(b, _, _)| cost < *b) {
            best = Some((cost, ca, cb));
        }
    }
    let (value, ca, cb) = best.expect("n >= 3 enumerates at least one bipartition");
    let witness = FiniteSubset::new(vec![
        Point::new(ca, norm)?,
        Point::new(cb, norm)?,
    ])?;
    Ok((value, witness))
}

/// Chebyshev center and covering radius of the whole set under its norm.
pub fn enclosing_center(x: &FiniteSubset) -> Result<(Point, f64)> {
    let norm = *x.norm_descriptor();
    let rows = x.coord_rows();
    let (c, r) = chebyshev_center(&rows, &norm)?;
    debug_assert!((covering_radius(&c, &rows, &norm) - r).abs() <= 1e-12 * (1.0 + r));
    Ok((Point::new(c, norm)?, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::PExponent;

    fn line(values: &[f64]) -> FiniteSubset {
        FiniteSubset::from_scalars(NormDescriptor::euclidean(1), values).unwrap()
    }

    #[test]
    fn canonical_order_and_dedup() {
        let x = line(&[3.0, 0.0, 3.0, 1.0]);
        let coords: Vec<f64> = x.points().iter().map(|p| p.coords()[0]).collect();
        assert_eq!(coords, vec![0.0, 1.0, 3.0]);
        assert_eq!(x, line(&[0.0, 1.0, 3.0]));
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff(&line(&[0.0]), &line(&[5.0])).unwrap(), 5.0);
        assert_eq!(hausdorff(&line(&[0.0, 3.0]), &line(&[1.0])).unwrap(), 2.0);
        // spaced pair with m = 5, n = 4
        let x = line(&[0.0, 4.0, 6.0, 11.0]);
        let y = line(&[-1.0, 1.0, 5.0, 12.0]);
        assert_eq!(hausdorff(&x, &y).unwrap(), 1.0);
        assert_eq!(hausdorff(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_pairs_examples() {
        assert_eq!(
            hausdorff_pairs(&line(&[0.0, 10.0]), &line(&[1.0, 9.0])).unwrap(),
            1.0
        );
        assert_eq!(
            hausdorff_pairs(&line(&[0.0, 1.0]), &line(&[0.0, 1.0])).unwrap(),
            0.0
        );
        assert_eq!(
            hausdorff_pairs(&line(&[0.0]), &line(&[0.0, 2.0])).unwrap(),
            2.0
        );
        assert!(hausdorff_pairs(&line(&[0.0, 1.0, 2.0]), &line(&[0.0])).is_err());
    }

    #[test]
    fn hausdorff_pairs_agrees_with_general_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let n2 = NormDescriptor::euclidean(2);
        for _ in 0..500 {
            let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.random_range(1..=2);
                let rows: Vec<Vec<f64>> = (0..k)
                    .map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
                    .collect();
                FiniteSubset::from_rows(n2, &rows).unwrap()
            };
            let (x, y) = (sample(&mut rng), sample(&mut rng));
            assert_eq!(
                hausdorff_pairs(&x, &y).unwrap(),
                hausdorff(&x, &y).unwrap()
            );
        }
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&line(&[0.0, 3.0, 7.0])), 7.0);
        let n2 = NormDescriptor::euclidean(2);
        let single = FiniteSubset::from_rows(n2, &[vec![1.0, 1.0]]).unwrap();
        assert_eq!(diameter(&single), 0.0);
        assert_eq!(diameter(&line(&[0.0, 4.0, 6.0, 11.0])), 11.0);
    }

    #[test]
    fn separation_examples() {
        assert_eq!(min_separation(&line(&[0.0, 4.0, 6.0, 11.0]), 4).unwrap(), 2.0);
        assert_eq!(min_separation(&line(&[0.0, 4.0]), 3).unwrap(), 0.0);
        assert_eq!(total_min_separation(&line(&[0.0, 4.0])), 4.0);
        assert!(min_separation(&line(&[0.0, 4.0]), 1).is_err());
    }

    #[test]
    fn gap_examples() {
        assert_eq!(gap(&line(&[0.0, 1.0, 10.0, 11.0])).unwrap(), 9.0);
        assert_eq!(gap(&line(&[0.0, 5.0])).unwrap(), 5.0);
        assert_eq!(gap(&line(&[0.0, 1.0, 2.0, 3.0])).unwrap(), 1.0);
        assert!(gap(&line(&[7.0])).is_err());
    }

    fn brute_force_gap(x: &FiniteSubset) -> f64 {
        let n = x.len();
        let pts = x.points();
        let mut best = 0.0f64;
        for mask in 1u64..(1u64 << (n - 1)) {
            let in_b = |i: usize| i > 0 && (mask >> (i - 1)) & 1 == 1;
            let mut dist = f64::INFINITY;
            for i in 0..n {
                for j in 0..n {
                    if in_b(i) != in_b(j) {
                        dist = dist.min(pts[i].distance_unchecked(&pts[j]));
                    }
                }
            }
            best = best.max(dist);
        }
        best
    }

    #[test]
    fn gap_matches_bipartition_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n2 = NormDescriptor::euclidean(2);
        for _ in 0..300 {
            let k = rng.random_range(2..=8);
            let rows: Vec<Vec<f64>> = (0..k)
                .map(|_| vec![rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)])
                .collect();
            let x = FiniteSubset::from_rows(n2, &rows).unwrap();
            assert_eq!(gap(&x).unwrap(), brute_force_gap(&x));
        }
    }

    #[test]
    fn gap_reducing_examples() {
        let (a, b) = gap_reducing_decomposition(&line(&[0.0, 1.0, 10.0, 11.0])).unwrap();
        assert_eq!(a, line(&[0.0, 1.0]));
        assert_eq!(b, line(&[10.0, 11.0]));

        let (a, b) = gap_reducing_decomposition(&line(&[0.0, 5.0])).unwrap();
        assert_eq!(a, line(&[0.0]));
        assert_eq!(b, line(&[5.0]));

        let x = line(&[0.0, 1.0, 2.0, 3.0]);
        let (a, b) = gap_reducing_decomposition(&x).unwrap();
        let rho = gap(&x).unwrap();
        assert_eq!(set_distance(&a, &b).unwrap(), rho);
        let sub_gap = |s: &FiniteSubset| if s.len() < 2 { 0.0 } else { gap(s).unwrap() };
        assert!(sub_gap(&a) <= rho && sub_gap(&b) <= rho);
        assert_eq!(a, line(&[0.0]));
        assert_eq!(b, line(&[1.0, 2.0, 3.0]));
    }

    #[test]
    fn match_points_examples() {
        let x = line(&[0.0, 10.0]);
        let y = line(&[0.1, 9.8]);
        let m = match_points(&x, &y).unwrap();
        assert_eq!(m, vec![0, 1]);
        let rho = hausdorff(&x, &y).unwrap();
        for (i, &j) in m.iter().enumerate() {
            assert!(x.points()[i].distance(&y.points()[j]).unwrap() <= rho);
        }

        let same = line(&[1.0, 2.0, 5.0]);
        assert_eq!(match_points(&same, &same).unwrap(), vec![0, 1, 2]);

        let sx = line(&[0.0, 4.0, 6.0, 11.0]);
        let sy = line(&[-1.0, 1.0, 5.0, 12.0]);
        assert!(matches!(
            match_points(&sx, &sy),
            Err(Error::NoMatchingGuarantee(_))
        ));
    }

    #[test]
    fn match_points_from_y_side() {
        // delta(x) small, delta(y) large: the guarantee comes from y
        let x = line(&[0.0, 0.05, 10.0]);
        let y = line(&[0.02, 5.0, 10.01]);
        let rho = hausdorff(&x, &y).unwrap();
        assert!(total_min_separation(&x) <= 2.0 * rho);
        if total_min_separation(&y) > 2.0 * rho {
            let m = match_points(&x, &y).unwrap();
            let mut seen = vec![false; 3];
            for (i, &j) in m.iter().enumerate() {
                assert!(!seen[j]);
                seen[j] = true;
                assert!(x.points()[i].distance(&y.points()[j]).unwrap() <= rho + 1e-12);
            }
        }
    }

    #[test]
    fn two_cluster_examples() {
        let x = line(&[0.0, 0.05, 0.95, 1.0]);
        let (a, b) = two_cluster_decomposition(&x, 0.1, 0.8).unwrap().unwrap();
        assert_eq!(a, line(&[0.0, 0.05]));
        assert_eq!(b, line(&[0.95, 1.0]));

        assert!(two_cluster_decomposition(&line(&[0.0, 0.5, 1.0]), 0.1, 0.8)
            .unwrap()
            .is_none());

        let (a, b) = two_cluster_decomposition(&line(&[0.0, 1.0]), 0.1, 0.5)
            .unwrap()
            .unwrap();
        assert_eq!(a, line(&[0.0]));
        assert_eq!(b, line(&[1.0]));

        assert!(two_cluster_decomposition(&line(&[0.0, 1.0]), -0.1, 0.5).is_err());
    }

    #[test]
    fn lower_stratum_examples() {
        let (v, w) = dist_to_lower_stratum(&line(&[0.0, 4.0, 6.0, 11.0])).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(w, line(&[0.0, 5.0, 11.0]));
        assert_eq!(hausdorff(&line(&[0.0, 4.0, 6.0, 11.0]), &w).unwrap(), v);

        let (v, w) = dist_to_lower_stratum(&line(&[0.0, 2.0])).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(w, line(&[1.0]));

        let (v, w) = dist_to_lower_stratum(&line(&[0.0, 1.0, 10.0])).unwrap();
        assert_eq!(v, 0.5);
        assert_eq!(w, line(&[0.5, 10.0]));

        assert!(dist_to_lower_stratum(&line(&[3.0])).is_err());
    }

    #[test]
    fn dist_to_x2_examples() {
        let (v, w) = dist_to_x2(&line(&[0.0, 0.05, 0.95, 1.0])).unwrap();
        assert!((v - 0.025).abs() < 1e-15);
        assert_eq!(w, line(&[0.025, 0.975]));

        let x2 = line(&[0.0, 1.0]);
        let (v, w) = dist_to_x2(&x2).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(w, x2);

        let (v, w) = dist_to_x2(&line(&[0.0, 0.5, 1.0])).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        assert!(w == line(&[0.25, 1.0]) || w == line(&[0.0, 0.75]));

        let big: Vec<f64> = (0..13).map(|i| i as f64).collect();
        assert!(matches!(
            dist_to_x2(&line(&big)),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn dist_to_x2_witness_attains_value() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for p in [PExponent::Finite(2.0), PExponent::Infinity] {
            let norm = NormDescriptor::new(p, 1.0, 2).unwrap();
            for _ in 0..60 {
                let k = rng.random_range(3..=6);
                let rows: Vec<Vec<f64>> = (0..k)
                    .map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
                    .collect();
                let x = FiniteSubset::from_rows(norm, &rows).unwrap();
                let (v, w) = dist_to_x2(&x).unwrap();
                let d = hausdorff(&x, &w).unwrap();
                assert!(d <= v + 1e-9, "witness misses value: {d} vs {v}");
            }
        }
    }

    #[test]
    fn enclosing_center_examples() {
        let (c, r) = enclosing_center(&line(&[0.0, 1.0, 4.0])).unwrap();
        assert_eq!(c.coords(), &[2.0]);
        assert_eq!(r, 2.0);
        let ninf = NormDescriptor::max_norm(2);
        let x = FiniteSubset::from_rows(ninf, &[vec![0.0, 0.0], vec![2.0, 6.0]]).unwrap();
        let (c, r) = enclosing_center(&x).unwrap();
        assert_eq!(c.coords(), &[1.0, 3.0]);
        assert_eq!(r, 3.0);
    }

    #[test]
    fn snowflake_commutes_with_hausdorff() {
        let x = line(&[0.0, 0.3, 2.0]);
        let y = line(&[0.1, 1.4]);
        for eps in [0.5, 1.0 / 3.0] {
            let xs = x.snowflaked(eps).unwrap();
            let ys = y.snowflaked(eps).unwrap();
            let lhs = hausdorff(&xs, &ys).unwrap();
            let rhs = hausdorff(&x, &y).unwrap().powf(eps);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn union_and_factorization() {
        let a = line(&[0.0, 1.0]);
        let b = line(&[5.0]);
        let c = line(&[0.2, 1.1]);
        let d = line(&[5.3]);
        let lhs = hausdorff(&a.union(&b).unwrap(), &c.union(&d).unwrap()).unwrap();
        let rhs = hausdorff(&a, &c).unwrap().max(hausdorff(&b, &d).unwrap());
        assert!(lhs <= rhs + 1e-12);
    }

    #[test]
    fn factorization_and_diameter_estimates_sampled() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let n2 = NormDescriptor::euclidean(2);
        for _ in 0..1_000 {
            let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.random_range(1..=5);
                let rows: Vec<Vec<f64>> = (0..k)
                    .map(|_| vec![rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)])
                    .collect();
                FiniteSubset::from_rows(n2, &rows).unwrap()
            };
            let (a, b) = (sample(&mut rng), sample(&mut rng));
            let (c, d) = (sample(&mut rng), sample(&mut rng));
            // d_H(A u B, C u D) <= max(d_H(A, C), d_H(B, D))
            let lhs = hausdorff(&a.union(&b).unwrap(), &c.union(&d).unwrap()).unwrap();
            let rhs = hausdorff(&a, &c).unwrap().max(hausdorff(&b, &d).unwrap());
            assert!(lhs <= rhs + 1e-12);
            // d_H(A, B) <= max(diam A, diam B) + dist(A, B)
            let bound = diameter(&a).max(diameter(&b)) + set_distance(&a, &b).unwrap();
            assert!(hausdorff(&a, &b).unwrap() <= bound + 1e-12);
            // diam(A u B) <= min(diam A, diam B) + 2 d_H(A, B)
            let union_diam = diameter(&a.union(&b).unwrap());
            let bound =
                diameter(&a).min(diameter(&b)) + 2.0 * hausdorff(&a, &b).unwrap();
            assert!(union_diam <= bound + 1e-12);
        }
    }
}
