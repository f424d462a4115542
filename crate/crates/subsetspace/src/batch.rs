//! Trial-batch execution: data-parallel on rayon when the `parallel` feature
//! is enabled, plain iteration otherwise.
//!
//! Reductions must be order-independent (max/min with index tie-breaks) so
//! both execution modes return identical results for the same seed.

use crate::error::Result;

/// Folds the surviving outcomes of `trials` independent evaluations.
///
/// `eval` maps a trial index to `Ok(Some(outcome))`, `Ok(None)` for a skipped
/// trial, or an error that aborts the whole batch. `better` combines two
/// outcomes and must be associative and commutative.
#[cfg(feature = "parallel")]
pub fn try_fold_trials<R, E, F>(trials: u64, eval: E, better: F) -> Result<Option<R>>
where
    R: Send,
    E: Fn(u64) -> Result<Option<R>> + Sync + Send,
    F: Fn(R, R) -> R + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(eval)
        .try_reduce(|| None, |a, b| Ok(merge(a, b, &better)))
}

#[cfg(not(feature = "parallel"))]
pub fn try_fold_trials<R, E, F>(trials: u64, eval: E, better: F) -> Result<Option<R>>
where
    R: Send,
    E: Fn(u64) -> Result<Option<R>> + Sync + Send,
    F: Fn(R, R) -> R + Sync + Send,
{
    try_fold_trials_seq(trials, eval, better)
}

/// Sequential twin of [`try_fold_trials`], kept unconditionally for the
/// benchmark suite and for determinism cross-checks.
pub fn try_fold_trials_seq<R, E, F>(trials: u64, eval: E, better: F) -> Result<Option<R>>
where
    E: Fn(u64) -> Result<Option<R>>,
    F: Fn(R, R) -> R,
{
    let mut acc: Option<R> = None;
    for t in 0..trials {
        acc = merge(acc, eval(t)?, &better);
    }
    Ok(acc)
}

fn merge<R>(a: Option<R>, b: Option<R>, better: &impl Fn(R, R) -> R) -> Option<R> {
    match (a, b) {
        (Some(a), Some(b)) => Some(better(a, b)),
        (Some(a), None) => Some(a),
        (None, b) => b,
    }
}
