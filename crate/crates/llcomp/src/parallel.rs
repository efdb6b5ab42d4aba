//! Parallel drivers over the per-triangle functions of the core crate.
//!
//! Each triangle uses its own random stream and outcomes are merged in
//! triangle order, so results are identical for every worker count.

use rayon::prelude::*;

use llcomp_core::certify::{
    evaluate_triangle, fit_samples, merge_outcomes, sample_triangle, sampling_counts, CertifyError, Direction,
    KScanRow, Region, SampleConfig, SampledTriangle, TriangleOutcome, Verdict,
};
use llcomp_core::models::ModelParams;
use llcomp_core::spaces::SpaceInstance;

/// Environment variable bounding the number of worker threads.
pub const THREADS_ENV: &str = "LLCOMP_THREADS";

/// Worker count from `LLCOMP_THREADS`, defaulting to the machine parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run_in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Samples all triangles of a run in parallel. Errors are reported for the
/// lowest failing triangle id, as in the sequential sampler.
pub fn sample_triangles(
    space: &SpaceInstance,
    region: &Region,
    k: &ModelParams,
    cfg: &SampleConfig,
    threads: usize,
) -> Result<Vec<SampledTriangle>, CertifyError> {
    cfg.validate()?;
    let results: Vec<Result<Option<SampledTriangle>, CertifyError>> = run_in_pool(threads, || {
        (0..cfg.total_triangles())
            .into_par_iter()
            .map(|id| sample_triangle(space, region, k, cfg, id))
            .collect()
    });
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        if let Some(t) = r? {
            out.push(t);
        }
    }
    Ok(out)
}

pub fn evaluate_all(
    space: &SpaceInstance,
    k: &ModelParams,
    samples: &[SampledTriangle],
    cfg: &SampleConfig,
    threads: usize,
) -> Vec<TriangleOutcome> {
    run_in_pool(threads, || {
        samples
            .par_iter()
            .map(|s| evaluate_triangle(space, k, s, cfg))
            .collect()
    })
}

/// Parallel counterpart of `certify_bound`; also returns the sample.
pub fn certify_bound(
    space: &SpaceInstance,
    region: &Region,
    k: &ModelParams,
    direction: Direction,
    cfg: &SampleConfig,
    threads: usize,
) -> Result<(Verdict, Vec<SampledTriangle>), CertifyError> {
    let samples = sample_triangles(space, region, k, cfg, threads)?;
    let outcomes = evaluate_all(space, k, &samples, cfg, threads);
    let verdict = merge_outcomes(direction, k, cfg, &outcomes, sampling_counts(&samples, cfg), |_| true);
    Ok((verdict, samples))
}

/// Parallel counterpart of `k_scan`.
pub fn k_scan(
    space: &SpaceInstance,
    region: &Region,
    ks: &[f64],
    cfg: &SampleConfig,
    threads: usize,
) -> Result<Vec<KScanRow>, CertifyError> {
    let samples = sample_triangles(space, region, &ModelParams::flat(), cfg, threads)?;
    let mut rows = Vec::with_capacity(ks.len());
    for &kv in ks {
        let k = ModelParams::new(kv)?;
        let (fitted, rescaled) = fit_samples(space, &k, &samples, cfg)?;
        let outcomes = evaluate_all(space, &k, &fitted, cfg, threads);
        let extra = sampling_counts(&fitted, cfg);
        rows.push(KScanRow {
            k: kv,
            below: merge_outcomes(Direction::Below, &k, cfg, &outcomes, extra, |_| true),
            above: merge_outcomes(Direction::Above, &k, cfg, &outcomes, extra, |_| true),
            rescaled,
        });
    }
    Ok(rows)
}
