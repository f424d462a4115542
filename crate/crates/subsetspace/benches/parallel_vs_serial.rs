//! Data-parallel trial sweeps vs the sequential fallback.
//!
//! With the default `parallel` feature the first variant runs on rayon; with
//! `--no-default-features` both variants are sequential and should coincide.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use subsetspace::batch::{try_fold_trials, try_fold_trials_seq};
use subsetspace::retract::FlowOptions;
use subsetspace::verify::PairSampler;
use subsetspace::{flow_retract, hausdorff, holder_rhs, retract_pair_average, NormDescriptor};

fn lipschitz_trial(sampler: &PairSampler, t: u64) -> subsetspace::Result<Option<f64>> {
    let (x, y) = sampler.sample_pair(7, t);
    let d = hausdorff(&x, &y)?;
    if d < 1e-12 {
        return Ok(None);
    }
    let ratio = hausdorff(&retract_pair_average(&x)?, &retract_pair_average(&y)?)? / d;
    Ok(Some(ratio))
}

fn holder_trial(sampler: &PairSampler, t: u64) -> subsetspace::Result<Option<f64>> {
    let opts = FlowOptions {
        record_trajectory: false,
        ..FlowOptions::default()
    };
    let (x, y) = sampler.sample_pair(11, t);
    let d = hausdorff(&x, &y)?;
    if d < 1e-12 {
        return Ok(None);
    }
    let rx = flow_retract(&x, x.len(), &opts)?.output;
    let ry = flow_retract(&y, y.len(), &opts)?.output;
    Ok(Some(holder_rhs(x.len(), &x, &y)? - hausdorff(&rx, &ry)?))
}

fn bench_lipschitz_sweep(c: &mut Criterion) {
    let sampler = PairSampler::uniform(NormDescriptor::euclidean(2), 2);
    let trials = 4_000u64;
    let mut group = c.benchmark_group("lipschitz_sweep_retract2");
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let out = try_fold_trials(black_box(trials), |t| lipschitz_trial(&sampler, t), f64::max)
                .unwrap();
            black_box(out)
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let out =
                try_fold_trials_seq(black_box(trials), |t| lipschitz_trial(&sampler, t), f64::max)
                    .unwrap();
            black_box(out)
        })
    });
    group.finish();
}

fn bench_holder_sweep(c: &mut Criterion) {
    let sampler = PairSampler::uniform(NormDescriptor::euclidean(2), 3);
    let trials = 200u64;
    let mut group = c.benchmark_group("holder_sweep_flow_n3");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let out = try_fold_trials(black_box(trials), |t| holder_trial(&sampler, t), f64::min)
                .unwrap();
            black_box(out)
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let out =
                try_fold_trials_seq(black_box(trials), |t| holder_trial(&sampler, t), f64::min)
                    .unwrap();
            black_box(out)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_lipschitz_sweep, bench_holder_sweep);
criterion_main!(benches);
