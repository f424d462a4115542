//! The ambient normed space: p-norms on R^d and the snowflake metric d^epsilon.
//!
//! A [`NormDescriptor`] fixes the exponent p in [1, inf], the snowflake
//! exponent epsilon in (0, 1], and the dimension. Every [`Point`] carries its
//! descriptor, and binary operations insist that both operands agree on it.
//! With epsilon = 1 the metric is the plain p-norm distance; with epsilon < 1
//! it is d(a, b)^epsilon, which satisfies the L^{1/epsilon} inequality
//! d(a,c)^{1/eps} <= d(a,b)^{1/eps} + d(b,c)^{1/eps} instead of the triangle
//! inequality alone.

use std::cmp::Ordering;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Absolute tolerance used by degeneracy predicates throughout the crate.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Exponent of a p-norm; `Infinity` is the max-norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Infinity,
}

impl PExponent {
    pub fn as_f64(&self) -> f64 {
        match self {
            PExponent::Finite(p) => *p,
            PExponent::Infinity => f64::INFINITY,
        }
    }
}

/// Descriptor of the ambient metric: `||.||_p` raised to `epsilon`, on R^dim.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormDescriptor {
    p: PExponent,
    epsilon: f64,
    dim: usize,
}

impl NormDescriptor {
    pub fn new(p: PExponent, epsilon: f64, dim: usize) -> Result<Self> {
        if let PExponent::Finite(v) = p {
            if !v.is_finite() || v < 1.0 {
                return Err(Error::InvalidInput(format!("p must be >= 1, got {v}")));
            }
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "snowflake exponent must lie in (0, 1], got {epsilon}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        Ok(NormDescriptor { p, epsilon, dim })
    }

    /// Euclidean norm on R^dim.
    pub fn euclidean(dim: usize) -> Self {
        NormDescriptor::new(PExponent::Finite(2.0), 1.0, dim).expect("valid descriptor")
    }

    pub fn p_norm(p: f64, dim: usize) -> Result<Self> {
        NormDescriptor::new(PExponent::Finite(p), 1.0, dim)
    }

    pub fn max_norm(dim: usize) -> Self {
        NormDescriptor::new(PExponent::Infinity, 1.0, dim).expect("valid descriptor")
    }

    /// Same norm with the metric replaced by d^epsilon.
    pub fn snowflaked(&self, epsilon: f64) -> Result<Self> {
        NormDescriptor::new(self.p, epsilon, self.dim)
    }

    pub fn p(&self) -> PExponent {
        self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True when epsilon = 1, i.e. the metric is the plain norm distance.
    pub fn is_plain(&self) -> bool {
        self.epsilon == 1.0
    }

    pub(crate) fn require_plain(&self, what: &'static str) -> Result<()> {
        if self.is_plain() {
            Ok(())
        } else {
            Err(Error::SnowflakeUnsupported {
                what,
                epsilon: self.epsilon,
            })
        }
    }

    pub(crate) fn require_same(&self, other: &NormDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    /// `||v||_p` of a coordinate difference, before the snowflake exponent.
    ///
    /// Large entries are factored out for non-integer p so the power sum
    /// cannot overflow.
    pub(crate) fn norm_of(&self, diff: &[f64]) -> f64 {
        match self.p {
            PExponent::Infinity => diff.iter().fold(0.0, |m, v| m.max(v.abs())),
            PExponent::Finite(p) if p == 1.0 => diff.iter().map(|v| v.abs()).sum(),
            PExponent::Finite(p) if p == 2.0 => {
                diff.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            PExponent::Finite(p) => {
                let max = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if max == 0.0 {
                    return 0.0;
                }
                let sum: f64 = diff.iter().map(|v| (v.abs() / max).powf(p)).sum();
                max * sum.powf(1.0 / p)
            }
        }
    }

    /// Applies the snowflake exponent to a plain norm value.
    pub(crate) fn metric_of(&self, raw_norm: f64) -> f64 {
        if self.epsilon == 1.0 {
            raw_norm
        } else {
            raw_norm.powf(self.epsilon)
        }
    }
}

impl Serialize for NormDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            p: PRepr<'a>,
            epsilon: f64,
            dim: usize,
        }
        #[derive(Serialize)]
        #[serde(untagged)]
        enum PRepr<'a> {
            Num(f64),
            Str(&'a str),
        }
        let p = match self.p {
            PExponent::Finite(v) => PRepr::Num(v),
            PExponent::Infinity => PRepr::Str("inf"),
        };
        Repr {
            p,
            epsilon: self.epsilon,
            dim: self.dim,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NormDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            p: PRepr,
            #[serde(default = "one")]
            epsilon: f64,
            dim: usize,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum PRepr {
            Num(f64),
            Str(String),
        }
        fn one() -> f64 {
            1.0
        }
        let repr = Repr::deserialize(deserializer)?;
        let p = match repr.p {
            PRepr::Num(v) => PExponent::Finite(v),
            PRepr::Str(s) if s == "inf" => PExponent::Infinity,
            PRepr::Str(s) => {
                return Err(D::Error::custom(format!("unknown p exponent {s:?}")));
            }
        };
        NormDescriptor::new(p, repr.epsilon, repr.dim)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// A point of the ambient space, tagged with its norm descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
    norm: NormDescriptor,
}

impl Point {
    pub fn new(coords: Vec<f64>, norm: NormDescriptor) -> Result<Self> {
        if coords.len() != norm.dim() {
            return Err(Error::DimensionMismatch {
                expected: norm.dim(),
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Point { coords, norm })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm_descriptor(&self) -> &NormDescriptor {
        &self.norm
    }

    /// Metric distance `||a - b||_p ^ epsilon`.
    pub fn distance(&self, other: &Point) -> Result<f64> {
        self.norm.require_same(&other.norm)?;
        Ok(self.distance_unchecked(other))
    }

    pub(crate) fn distance_unchecked(&self, other: &Point) -> f64 {
        let diff: Vec<f64> = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        self.norm.metric_of(self.norm.norm_of(&diff))
    }

    /// The straight-line segment point `(1-t) a + t b`.
    ///
    /// Only defined for the plain metric: a snowflake admits no rectifiable
    /// curves, so segments are not geodesics there.
    pub fn lerp(&self, other: &Point, t: f64) -> Result<Point> {
        self.norm.require_same(&other.norm)?;
        self.norm.require_plain("lerp")?;
        if !(-1e-12..=1.0 + 1e-12).contains(&t) {
            return Err(Error::Domain(format!("lerp parameter {t} outside [0, 1]")));
        }
        let t = t.clamp(0.0, 1.0);
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect();
        Ok(Point {
            coords,
            norm: self.norm,
        })
    }

    /// Radial projection `(a - b) / ||a - b||`, a unit vector of the norm.
    pub fn unit_direction(&self, other: &Point) -> Result<Point> {
        self.norm.require_same(&other.norm)?;
        self.norm.require_plain("unit_direction")?;
        let diff: Vec<f64> = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        let len = self.norm.norm_of(&diff);
        if len == 0.0 {
            return Err(Error::SingularDirection);
        }
        Ok(Point {
            coords: diff.iter().map(|v| v / len).collect(),
            norm: self.norm,
        })
    }

    /// Total order on coordinate vectors; ties the canonical ordering of
    /// subsets to plain lexicographic comparison.
    pub(crate) fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.coords.iter().zip(&other.coords) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(coords: &[f64], norm: NormDescriptor) -> Point {
        Point::new(coords.to_vec(), norm).unwrap()
    }

    #[test]
    fn pythagorean_distance() {
        let n = NormDescriptor::euclidean(2);
        let a = pt(&[0.0, 0.0], n);
        let b = pt(&[3.0, 4.0], n);
        assert_eq!(a.distance(&b).unwrap(), 5.0);
    }

    #[test]
    fn max_norm_distance() {
        let n = NormDescriptor::max_norm(2);
        let a = pt(&[0.0, 0.0], n);
        let b = pt(&[3.0, 4.0], n);
        assert_eq!(a.distance(&b).unwrap(), 4.0);
    }

    #[test]
    fn snowflake_distance() {
        let n = NormDescriptor::euclidean(1).snowflaked(0.5).unwrap();
        let a = pt(&[0.0], n);
        let b = pt(&[4.0], n);
        assert_eq!(a.distance(&b).unwrap(), 2.0);
    }

    #[test]
    fn distance_symmetric_zero_iff_equal() {
        let n = NormDescriptor::p_norm(3.0, 2).unwrap();
        let a = pt(&[1.0, -2.0], n);
        let b = pt(&[0.5, 7.0], n);
        assert_eq!(a.distance(&b).unwrap(), b.distance(&a).unwrap());
        assert_eq!(a.distance(&a).unwrap(), 0.0);
        assert!(a.distance(&b).unwrap() > 0.0);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let n = NormDescriptor::euclidean(2);
        assert!(matches!(
            Point::new(vec![1.0], n),
            Err(Error::DimensionMismatch { .. })
        ));
        let m = NormDescriptor::euclidean(3);
        let a = pt(&[0.0, 0.0], n);
        let b = pt(&[1.0, 1.0, 1.0], m);
        assert!(matches!(a.distance(&b), Err(Error::DescriptorMismatch(_))));
    }

    #[test]
    fn lerp_midpoint_and_endpoints() {
        let n = NormDescriptor::euclidean(1);
        let a = pt(&[0.0], n);
        let b = pt(&[2.0], n);
        assert_eq!(a.lerp(&b, 0.5).unwrap().coords(), &[1.0]);
        assert_eq!(a.lerp(&b, 0.0).unwrap(), a);
        assert_eq!(a.lerp(&b, 1.0).unwrap(), b);

        let n2 = NormDescriptor::euclidean(2);
        let c = pt(&[1.0, 1.0], n2);
        assert_eq!(c.lerp(&c, 0.3).unwrap(), c);
        let d = pt(&[0.0, 0.0], n2);
        let e = pt(&[4.0, 0.0], n2);
        assert_eq!(d.lerp(&e, 0.25).unwrap().coords(), &[1.0, 0.0]);
    }

    #[test]
    fn lerp_rejected_on_snowflake() {
        let n = NormDescriptor::euclidean(1).snowflaked(0.5).unwrap();
        let a = pt(&[0.0], n);
        let b = pt(&[1.0], n);
        assert!(matches!(
            a.lerp(&b, 0.5),
            Err(Error::SnowflakeUnsupported { .. })
        ));
    }

    #[test]
    fn unit_direction_examples() {
        let n1 = NormDescriptor::euclidean(1);
        let a = pt(&[2.0], n1);
        let b = pt(&[0.0], n1);
        assert_eq!(a.unit_direction(&b).unwrap().coords(), &[1.0]);

        let n2 = NormDescriptor::euclidean(2);
        let c = pt(&[0.0, 3.0], n2);
        let o = pt(&[0.0, 0.0], n2);
        assert_eq!(c.unit_direction(&o).unwrap().coords(), &[0.0, 1.0]);

        let l1 = NormDescriptor::p_norm(1.0, 2).unwrap();
        let d = pt(&[1.0, 1.0], l1);
        let o1 = pt(&[0.0, 0.0], l1);
        assert_eq!(d.unit_direction(&o1).unwrap().coords(), &[0.5, 0.5]);

        assert!(matches!(
            o.unit_direction(&o),
            Err(Error::SingularDirection)
        ));
    }

    #[test]
    fn descriptor_validation() {
        assert!(NormDescriptor::p_norm(0.5, 2).is_err());
        assert!(NormDescriptor::euclidean(2).snowflaked(0.0).is_err());
        assert!(NormDescriptor::euclidean(2).snowflaked(1.5).is_err());
        assert!(NormDescriptor::new(PExponent::Finite(2.0), 1.0, 0).is_err());
    }

    #[test]
    fn descriptor_json_round_trip() {
        let n = NormDescriptor::p_norm(2.0, 3).unwrap().snowflaked(0.5).unwrap();
        let s = serde_json::to_string(&n).unwrap();
        assert_eq!(s, r#"{"p":2.0,"epsilon":0.5,"dim":3}"#);
        let back: NormDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, n);

        let inf: NormDescriptor = serde_json::from_str(r#"{"p":"inf","epsilon":1.0,"dim":2}"#).unwrap();
        assert_eq!(inf.p(), PExponent::Infinity);
        assert!(serde_json::from_str::<NormDescriptor>(r#"{"p":0.2,"epsilon":1.0,"dim":2}"#).is_err());
    }

    #[test]
    fn metric_inequalities_bulk() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let descriptors = [
            NormDescriptor::p_norm(1.0, 3).unwrap(),
            NormDescriptor::euclidean(3),
            NormDescriptor::max_norm(3),
        ];
        for norm in descriptors {
            for _ in 0..10_000 {
                let mut sample = || {
                    let coords: Vec<f64> = (0..3).map(|_| rng.random_range(-1e3..1e3)).collect();
                    Point::new(coords, norm).unwrap()
                };
                let (a, b, c) = (sample(), sample(), sample());
                let (ab, bc, ac) = (
                    a.distance_unchecked(&b),
                    b.distance_unchecked(&c),
                    a.distance_unchecked(&c),
                );
                assert!(ac <= ab + bc + 1e-12 * (1.0 + ab + bc));
                if a != b {
                    let u = a.unit_direction(&b).unwrap();
                    assert!((norm.norm_of(u.coords()) - 1.0).abs() <= 1e-12);
                }
            }
        }
        // the snowflake d^{1/p'} satisfies the power-sum inequality
        for pprime in [2.0, 3.0] {
            let norm = NormDescriptor::euclidean(2).snowflaked(1.0 / pprime).unwrap();
            for _ in 0..10_000 {
                let mut sample = || {
                    let coords: Vec<f64> = (0..2).map(|_| rng.random_range(-1e3..1e3)).collect();
                    Point::new(coords, norm).unwrap()
                };
                let (a, b, c) = (sample(), sample(), sample());
                let lhs = a.distance_unchecked(&c).powf(pprime);
                let rhs =
                    a.distance_unchecked(&b).powf(pprime) + b.distance_unchecked(&c).powf(pprime);
                assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
            }
        }
    }

    fn arb_coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1e3..1e3f64, dim)
    }

    proptest! {
        #[test]
        fn triangle_inequality_plain(
            a in arb_coords(3), b in arb_coords(3), c in arb_coords(3),
            p in prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)],
        ) {
            let norm = if p.is_finite() {
                NormDescriptor::p_norm(p, 3).unwrap()
            } else {
                NormDescriptor::max_norm(3)
            };
            let (a, b, c) = (pt(&a, norm), pt(&b, norm), pt(&c, norm));
            let (ab, bc, ac) = (
                a.distance(&b).unwrap(),
                b.distance(&c).unwrap(),
                a.distance(&c).unwrap(),
            );
            prop_assert!(ac <= ab + bc + 1e-12 * (1.0 + ab + bc));
        }

        #[test]
        fn snowflake_power_inequality(
            a in arb_coords(2), b in arb_coords(2), c in arb_coords(2),
            pprime in 1.5..4.0f64,
        ) {
            let norm = NormDescriptor::euclidean(2).snowflaked(1.0 / pprime).unwrap();
            let (a, b, c) = (pt(&a, norm), pt(&b, norm), pt(&c, norm));
            let (ab, bc, ac) = (
                a.distance(&b).unwrap(),
                b.distance(&c).unwrap(),
                a.distance(&c).unwrap(),
            );
            let lhs = ac.powf(pprime);
            let rhs = ab.powf(pprime) + bc.powf(pprime);
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn unit_direction_has_norm_one(
            a in arb_coords(3), b in arb_coords(3),
            p in prop_oneof![Just(1.0), Just(2.0), Just(3.5), Just(f64::INFINITY)],
        ) {
            let norm = if p.is_finite() {
                NormDescriptor::p_norm(p, 3).unwrap()
            } else {
                NormDescriptor::max_norm(3)
            };
            let (a, b) = (pt(&a, norm), pt(&b, norm));
            prop_assume!(a != b);
            let u = a.unit_direction(&b).unwrap();
            let len = norm.norm_of(u.coords());
            prop_assert!((len - 1.0).abs() <= 1e-12);
        }
    }
}
