//! Parallel ensemble drivers. Members run on the current rayon pool and
//! results are gathered in ensemble order, so output never depends on
//! scheduling.

use nicholson_core::analysis::{
    aggregate, decay_log, persistence_series, persistence_threshold, summarize_attraction, tail_min,
    validate_attraction, AttractionParams, AttractionReport, GuidingSeries, PersistenceEstimate, PersistenceParams,
};
use nicholson_core::conditions::{ConditionReport, PeriodicBounds};
use nicholson_core::periodic::{find_periodic_orbit, OrbitOptions, PeriodicOrbitResult};
use nicholson_core::{HistoryFunction, HistoryGrid, ModelSpec, Result};
use rayon::prelude::*;

/// Maps `f` over `items` in parallel; the first error by index wins.
pub fn ordered<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> Result<U> + Sync + Send) -> Result<Vec<U>> {
    let results: Vec<Result<U>> = items.par_iter().map(f).collect();
    results.into_iter().collect()
}

pub fn persistence_members(
    spec: &ModelSpec,
    histories: &[HistoryFunction],
    params: &PersistenceParams,
) -> Result<Vec<GuidingSeries>> {
    ordered(histories, |h| persistence_series(spec, h, params))
}

pub fn estimate_persistence(
    spec: &ModelSpec,
    report: &ConditionReport,
    histories: &[HistoryFunction],
    params: &PersistenceParams,
) -> Result<(PersistenceEstimate, Vec<GuidingSeries>)> {
    let threshold = persistence_threshold(report)?;
    let series = persistence_members(spec, histories, params)?;
    let tails = series.iter().map(|s| tail_min(s, params.cutoff())).collect();
    Ok((aggregate(params, threshold, tails), series))
}

pub fn verify_zero_attraction(
    spec: &ModelSpec,
    report: &ConditionReport,
    histories: &[HistoryFunction],
    params: &AttractionParams,
) -> Result<AttractionReport> {
    validate_attraction(report, params)?;
    let logs = ordered(histories, |h| decay_log(spec, h, params))?;
    Ok(summarize_attraction(logs, params.tol))
}

/// One orbit search per `(λ, initial grid)` pair, in that nesting order.
pub fn orbit_searches(
    spec: &ModelSpec,
    bounds: &PeriodicBounds,
    initial: &[HistoryGrid],
    lambdas: &[f64],
    options: &OrbitOptions,
) -> Vec<Result<PeriodicOrbitResult>> {
    let jobs: Vec<(f64, &HistoryGrid)> = lambdas.iter().flat_map(|&l| initial.iter().map(move |g| (l, g))).collect();
    jobs.par_iter()
        .map(|&(lambda, grid)| {
            let opts = OrbitOptions { lambda, ..*options };
            find_periodic_orbit(spec, bounds, grid, &opts)
        })
        .collect()
}
