//! Complete and proximal relations between finite subsets.
//!
//! A relation pairs indices of two subsets; it is complete when every index
//! on both sides appears, proximal when every pair sits within Hausdorff
//! distance, and reduced when no pair can be dropped without losing
//! completeness. Reduced complete relations split into a left-functional
//! part, a bijective part, and a right-functional part, which is what the
//! path constructions consume.

use crate::error::{Error, Result};
use crate::norms::DEFAULT_TOL;
use crate::subsets::{hausdorff_unchecked, FiniteSubset};

/// A set of index pairs between two finite subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct CompleteRelation {
    left: FiniteSubset,
    right: FiniteSubset,
    pairs: Vec<(usize, usize)>,
}

/// The three-way split of a reduced complete relation.
///
/// `left_functional` holds pairs (a, f(a)) where several lefts share a right,
/// `bijective` the one-to-one pairs, and `right_functional` pairs (g(b), b)
/// where several rights share a left.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDecomposition {
    pub left_functional: Vec<(usize, usize)>,
    pub bijective: Vec<(usize, usize)>,
    pub right_functional: Vec<(usize, usize)>,
}

/// The subset split induced by a reduced proximal relation:
/// `x = x' ⊔ x''` and `y = y' ⊔ y''` with `y' = f(x')` and `x'' = g(y'')`.
#[derive(Clone, Debug)]
pub struct ProximalSplit {
    /// Indices into x mapped functionally into y (x').
    pub x_mapped: Vec<usize>,
    /// Indices into x that are images of y'' under g (x'').
    pub x_image: Vec<usize>,
    /// Indices into y that are images of x' under f (y').
    pub y_image: Vec<usize>,
    /// Indices into y mapped functionally into x (y'').
    pub y_mapped: Vec<usize>,
    /// The pairs of f: x' -> y' followed by those of g: y'' -> x''
    /// (stored as (left index, right index) in both cases).
    pub f_pairs: Vec<(usize, usize)>,
    pub g_pairs: Vec<(usize, usize)>,
}

impl CompleteRelation {
    /// Builds a relation after validating completeness of the given pairs.
    pub fn new(
        left: FiniteSubset,
        right: FiniteSubset,
        mut pairs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        left.norm_descriptor().require_same(right.norm_descriptor())?;
        pairs.sort_unstable();
        pairs.dedup();
        for &(i, j) in &pairs {
            if i >= left.len() || j >= right.len() {
                return Err(Error::InvalidInput(format!(
                    "pair ({i}, {j}) out of range for sizes {} x {}",
                    left.len(),
                    right.len()
                )));
            }
        }
        let rel = CompleteRelation { left, right, pairs };
        if !rel.is_complete() {
            return Err(Error::InvalidInput(
                "relation is not complete on both sides".into(),
            ));
        }
        Ok(rel)
    }

    pub fn left(&self) -> &FiniteSubset {
        &self.left
    }

    pub fn right(&self) -> &FiniteSubset {
        &self.right
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn covers(pairs: &[(usize, usize)], left_len: usize, right_len: usize) -> bool {
        let mut l = vec![false; left_len];
        let mut r = vec![false; right_len];
        for &(i, j) in pairs {
            l[i] = true;
            r[j] = true;
        }
        l.into_iter().all(|b| b) && r.into_iter().all(|b| b)
    }

    pub fn is_complete(&self) -> bool {
        Self::covers(&self.pairs, self.left.len(), self.right.len())
    }

    /// Max pair distance; the relation is proximal when this does not exceed
    /// the Hausdorff distance of the endpoints.
    pub fn max_pair_distance(&self) -> f64 {
        self.pairs
            .iter()
            .map(|&(i, j)| self.left.points()[i].distance_unchecked(&self.right.points()[j]))
            .fold(0.0, f64::max)
    }

    pub fn endpoint_hausdorff(&self) -> f64 {
        hausdorff_unchecked(&self.left, &self.right)
    }

    pub fn is_proximal(&self, tol: f64) -> bool {
        self.max_pair_distance() <= self.endpoint_hausdorff() + tol
    }

    fn left_order(&self, j: usize) -> usize {
        self.pairs.iter().filter(|&&(_, b)| b == j).count()
    }

    fn right_order(&self, i: usize) -> usize {
        self.pairs.iter().filter(|&&(a, _)| a == i).count()
    }

    /// A pair is essential when dropping it breaks completeness, i.e. it is
    /// the only pair at its left index or at its right index.
    pub fn is_essential(&self, pair: (usize, usize)) -> bool {
        self.right_order(pair.0) == 1 || self.left_order(pair.1) == 1
    }

    pub fn is_reduced(&self) -> bool {
        self.pairs.iter().all(|&p| self.is_essential(p))
    }
}

/// The nearest-point proximal complete relation:
/// `{(i, argmin_j d(x_i, y_j))} ∪ {(argmin_i d(x_i, y_j), j)}`,
/// with argmin ties broken by the smallest index.
pub fn proximal_complete_relation(
    x: &FiniteSubset,
    y: &FiniteSubset,
) -> Result<CompleteRelation> {
    x.norm_descriptor().require_same(y.norm_descriptor())?;
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(x.len() + y.len());
    for (i, p) in x.points().iter().enumerate() {
        let j = y
            .points()
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| p.distance_unchecked(a).total_cmp(&p.distance_unchecked(b)))
            .map(|(j, _)| j)
            .expect("nonempty");
        pairs.push((i, j));
    }
    for (j, q) in y.points().iter().enumerate() {
        let i = x
            .points()
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| q.distance_unchecked(a).total_cmp(&q.distance_unchecked(b)))
            .map(|(i, _)| i)
            .expect("nonempty");
        pairs.push((i, j));
    }
    CompleteRelation::new(x.clone(), y.clone(), pairs)
}

/// Reduces a complete relation by repeatedly deleting the first inessential
/// pair in lexicographic order. Preserves completeness, hence proximality.
pub fn reduce(r: &CompleteRelation) -> CompleteRelation {
    let mut pairs = r.pairs.clone();
    loop {
        let mut removed = false;
        for idx in 0..pairs.len() {
            let (i, j) = pairs[idx];
            let right_order = pairs.iter().filter(|&&(a, _)| a == i).count();
            let left_order = pairs.iter().filter(|&&(_, b)| b == j).count();
            if right_order > 1 && left_order > 1 {
                pairs.remove(idx);
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
    }
    CompleteRelation {
        left: r.left.clone(),
        right: r.right.clone(),
        pairs,
    }
}

/// Splits a reduced complete relation into its left-functional, bijective,
/// and right-functional parts.
pub fn decompose_reduced(r: &CompleteRelation) -> Result<ReducedDecomposition> {
    let mut out = ReducedDecomposition {
        left_functional: Vec::new(),
        bijective: Vec::new(),
        right_functional: Vec::new(),
    };
    for &(i, j) in &r.pairs {
        let right_order = r.right_order(i);
        let left_order = r.left_order(j);
        match (right_order == 1, left_order == 1) {
            (true, true) => out.bijective.push((i, j)),
            (true, false) => out.left_functional.push((i, j)),
            (false, true) => out.right_functional.push((i, j)),
            (false, false) => return Err(Error::NotReduced(i, j)),
        }
    }
    Ok(out)
}

/// The split `x = x' ⊔ g(y'')`, `y = f(x') ⊔ y''` induced by reducing the
/// nearest-point proximal relation. The bijective part folds into f.
pub fn proximal_split(x: &FiniteSubset, y: &FiniteSubset) -> Result<ProximalSplit> {
    let reduced = reduce(&proximal_complete_relation(x, y)?);
    debug_assert!(reduced.is_proximal(DEFAULT_TOL));
    let parts = decompose_reduced(&reduced)?;

    let mut f_pairs = parts.left_functional.clone();
    f_pairs.extend_from_slice(&parts.bijective);
    f_pairs.sort_unstable();
    let g_pairs = parts.right_functional.clone();

    let mut split = ProximalSplit {
        x_mapped: f_pairs.iter().map(|&(i, _)| i).collect(),
        x_image: g_pairs.iter().map(|&(i, _)| i).collect(),
        y_image: f_pairs.iter().map(|&(_, j)| j).collect(),
        y_mapped: g_pairs.iter().map(|&(_, j)| j).collect(),
        f_pairs,
        g_pairs,
    };
    for v in [
        &mut split.x_mapped,
        &mut split.x_image,
        &mut split.y_image,
        &mut split.y_mapped,
    ] {
        v.sort_unstable();
        v.dedup();
    }
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::NormDescriptor;

    fn line(values: &[f64]) -> FiniteSubset {
        FiniteSubset::from_scalars(NormDescriptor::euclidean(1), values).unwrap()
    }

    #[test]
    fn nearest_point_relation_examples() {
        let r = proximal_complete_relation(&line(&[0.0, 1.0]), &line(&[0.0, 1.0])).unwrap();
        assert_eq!(r.pairs(), &[(0, 0), (1, 1)]);
        assert!(r.is_proximal(0.0));

        let r = proximal_complete_relation(&line(&[0.0]), &line(&[1.0, 2.0])).unwrap();
        assert_eq!(r.pairs(), &[(0, 0), (0, 1)]);
    }

    #[test]
    fn nearest_point_relation_separated_clusters() {
        // x = {-1, 1, 7.5}, y = {-1.5, 5, 7}: the clusters force every pair
        let x = line(&[-1.0, 1.0, 7.5]);
        let y = line(&[-1.5, 5.0, 7.0]);
        let r = proximal_complete_relation(&x, &y).unwrap();
        assert_eq!(r.pairs(), &[(0, 0), (1, 0), (2, 1), (2, 2)]);
        assert_eq!(r.endpoint_hausdorff(), 2.5);
        assert!(r.is_proximal(1e-12));
    }

    #[test]
    fn reduce_full_product_to_bijection() {
        let x = line(&[0.0, 1.0]);
        let r = CompleteRelation::new(
            x.clone(),
            x.clone(),
            vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        )
        .unwrap();
        let reduced = reduce(&r);
        assert!(reduced.is_reduced());
        assert!(reduced.is_complete());
        assert_eq!(reduced.len(), 2);
        // every surviving pair is essential: deleting any one breaks completeness
        for k in 0..reduced.len() {
            let mut pairs = reduced.pairs().to_vec();
            pairs.remove(k);
            assert!(!CompleteRelation::covers(&pairs, 2, 2));
        }
    }

    #[test]
    fn reduce_keeps_already_reduced() {
        let r = proximal_complete_relation(&line(&[0.0]), &line(&[1.0, 2.0])).unwrap();
        let reduced = reduce(&r);
        assert_eq!(reduced.pairs(), r.pairs());
    }

    #[test]
    fn decompose_examples() {
        let x = line(&[0.0, 1.0]);
        let bij = CompleteRelation::new(x.clone(), x.clone(), vec![(0, 0), (1, 1)]).unwrap();
        let d = decompose_reduced(&bij).unwrap();
        assert_eq!(d.bijective.len(), 2);
        assert!(d.left_functional.is_empty() && d.right_functional.is_empty());

        let fan = CompleteRelation::new(
            line(&[0.0]),
            line(&[1.0, 2.0]),
            vec![(0, 0), (0, 1)],
        )
        .unwrap();
        let d = decompose_reduced(&fan).unwrap();
        assert!(d.bijective.is_empty() && d.left_functional.is_empty());
        assert_eq!(d.right_functional, vec![(0, 0), (0, 1)]);

        let x = line(&[-1.0, 1.0, 7.5]);
        let y = line(&[-1.5, 5.0, 7.0]);
        let r = reduce(&proximal_complete_relation(&x, &y).unwrap());
        let d = decompose_reduced(&r).unwrap();
        assert_eq!(d.left_functional, vec![(0, 0), (1, 0)]);
        assert_eq!(d.right_functional, vec![(2, 1), (2, 2)]);
        assert!(d.bijective.is_empty());
    }

    #[test]
    fn decompose_rejects_unreduced() {
        let x = line(&[0.0, 1.0]);
        let full = CompleteRelation::new(
            x.clone(),
            x.clone(),
            vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        )
        .unwrap();
        assert!(matches!(
            decompose_reduced(&full),
            Err(Error::NotReduced(_, _))
        ));
    }

    #[test]
    fn proximal_split_examples() {
        let s = proximal_split(&line(&[0.0]), &line(&[5.0])).unwrap();
        assert_eq!(s.x_mapped, vec![0]);
        assert_eq!(s.y_image, vec![0]);
        assert!(s.x_image.is_empty() && s.y_mapped.is_empty());

        let s = proximal_split(&line(&[0.0]), &line(&[1.0, 2.0])).unwrap();
        assert!(s.x_mapped.is_empty() && s.y_image.is_empty());
        assert_eq!(s.x_image, vec![0]);
        assert_eq!(s.y_mapped, vec![0, 1]);

        let x = line(&[0.0, 10.0]);
        let y = line(&[0.1, 9.8]);
        let s = proximal_split(&x, &y).unwrap();
        assert_eq!(s.f_pairs, vec![(0, 0), (1, 1)]);
        assert!(s.g_pairs.is_empty());
        let matching = crate::subsets::match_points(&x, &y).unwrap();
        assert_eq!(matching, vec![0, 1]);
    }

    #[test]
    fn reduced_size_bound_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let n2 = NormDescriptor::euclidean(2);
        for _ in 0..1_000 {
            let nx = rng.random_range(1..=8);
            let ny = rng.random_range(1..=8);
            let rows = |k: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<f64>> {
                (0..k)
                    .map(|_| vec![rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)])
                    .collect()
            };
            let x = FiniteSubset::from_rows(n2, &rows(nx, &mut rng)).unwrap();
            let y = FiniteSubset::from_rows(n2, &rows(ny, &mut rng)).unwrap();
            let r = proximal_complete_relation(&x, &y).unwrap();
            assert!(r.is_proximal(1e-12));
            let reduced = reduce(&r);
            assert!(reduced.is_complete());
            assert!(reduced.is_reduced());
            assert!(reduced.is_proximal(1e-12));
            let bound = (x.len() + y.len())
                .saturating_sub(2)
                .max(x.len())
                .max(y.len());
            assert!(
                reduced.len() <= bound,
                "reduced size {} exceeds bound for |x| = {}, |y| = {}",
                reduced.len(),
                x.len(),
                y.len()
            );
            // essentiality, exhaustively
            for k in 0..reduced.len() {
                let mut pairs = reduced.pairs().to_vec();
                pairs.remove(k);
                assert!(!CompleteRelation::covers(&pairs, x.len(), y.len()));
            }
        }
    }
}
