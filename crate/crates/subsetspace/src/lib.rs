//! Metric geometry of finite subset spaces X(n) over normed spaces.
//!
//! The space X(n) collects the nonempty subsets of at most n points of an
//! ambient normed space, metrized by Hausdorff distance. This crate provides:
//!
//! - the ambient space: p-norms on R^d and their snowflakes ([`norms`]);
//! - X(n) itself with its functionals: Hausdorff distance, diameter, minimum
//!   separation, gap, and cluster decompositions ([`subsets`]);
//! - complete/proximal relations between finite sets and their reduction
//!   ([`relations`]);
//! - quasigeodesic and geodesic construction from relations ([`paths`]);
//! - retractions X(n) -> X(k): the pair average, the interpolated map on
//!   X(3), selector-based maps, and the gradient-flow collision retraction
//!   ([`retract`]);
//! - empirical Lipschitz/Hölder estimators and counterexample fixtures
//!   ([`verify`]).
//!
//! Monte Carlo sweeps run data-parallel on rayon by default; build with
//! `--no-default-features` for the sequential fallback.

pub mod batch;
mod center;
pub mod error;
mod hull;
pub mod norms;
pub mod paths;
pub mod relations;
pub mod retract;
pub mod subsets;
pub mod verify;

pub use error::{Error, Result};
pub use norms::{NormDescriptor, PExponent, Point, DEFAULT_TOL};
pub use paths::{
    geodesic_in_larger_stratum, path_speed_profile, quasigeodesic_from_relation,
    two_quasiconvex_path, SubsetPath,
};
pub use relations::{
    decompose_reduced, proximal_complete_relation, proximal_split, reduce, CompleteRelation,
};
pub use retract::{
    flow_closed_form_n2, flow_field, flow_retract, hull_residual, interpolation_map_3,
    retract_3_to_2, retract_n_to_1, retract_n_to_2, retract_pair_average, selector, FlowOptions,
    FlowResult, PartitionOfUnity, SelectorOptions,
};
pub use subsets::{
    diameter, dist_to_lower_stratum, dist_to_x2, gap, gap_reducing_decomposition, hausdorff,
    hausdorff_pairs, match_points, min_separation, set_distance, total_min_separation,
    two_cluster_decomposition, FiniteSubset,
};
pub use verify::{
    bip_hexagon, check_holder, estimate_lipschitz, holder_rhs, spaced_pair,
    spaced_pair_midpoint_defect, verify_bip_hexagon, BipHexagon, BipReport, BreakpointTarget,
    LipschitzEstimate, PairSampler, SamplerKind,
};
