//! Ensemble tests of persistence and zero attraction through the guiding
//! functions `v = min_i x_i` and `u = max_i x_i`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::{ConditionReport, Hypothesis};
use crate::error::{Error, Result};
use crate::history::HistoryFunction;
use crate::integrator::{integrate, IntegrateOptions, Trajectory};
use crate::model::{ModelSpec, INV_E};

/// Per-node `u` (max) and `v` (min) of the state components.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidingSeries {
    pub times: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl GuidingSeries {
    /// From row-major `states` (`dim` values per time).
    pub fn from_states(times: &[f64], states: &[f64], dim: usize) -> Result<Self> {
        if dim == 0 || states.len() != times.len() * dim {
            return Err(Error::Dimension { expected: times.len() * dim, found: states.len() });
        }
        let mut u = Vec::with_capacity(times.len());
        let mut v = Vec::with_capacity(times.len());
        for row in states.chunks_exact(dim) {
            u.push(row.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            v.push(row.iter().copied().fold(f64::INFINITY, f64::min));
        }
        Ok(GuidingSeries { times: times.to_vec(), u, v })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub fn guiding_series(traj: &Trajectory) -> GuidingSeries {
    let n = traj.dim();
    let mut states = Vec::with_capacity(traj.len() * n);
    for k in 0..traj.len() {
        states.extend_from_slice(traj.state(k));
    }
    GuidingSeries::from_states(traj.times(), &states, n).expect("trajectory rows have dim entries")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistenceParams {
    pub horizon: f64,
    /// Fraction of the horizon discarded as transient.
    pub transient: f64,
    pub step: f64,
    pub lambda: f64,
}

impl PersistenceParams {
    pub fn new(horizon: f64, step: f64) -> Self {
        PersistenceParams { horizon, transient: 0.5, step, lambda: 1.0 }
    }

    pub fn cutoff(&self) -> f64 {
        self.transient * self.horizon
    }

    fn validate(&self, spec: &ModelSpec) -> Result<()> {
        let scale = spec.period().max(spec.max_delay());
        if !(self.horizon >= 50.0 * scale) {
            return Err(Error::Precondition(alloc::format!(
                "horizon {} is shorter than 50 * max(T, tau*) = {}",
                self.horizon,
                50.0 * scale
            )));
        }
        if !(self.transient > 0.0 && self.transient < 1.0) {
            return Err(Error::InvalidParameter { name: "transient", value: self.transient });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceEstimate {
    pub cutoff: f64,
    pub horizon: f64,
    pub threshold: f64,
    /// One entry per ensemble member, in ensemble order.
    pub tail_infima: Vec<f64>,
    pub ensemble_min: f64,
    pub persistent: bool,
}

/// `min v(t)` over mesh nodes with `t ≥ cutoff`.
pub fn tail_min(series: &GuidingSeries, cutoff: f64) -> f64 {
    series.times.iter().zip(&series.v).filter(|(t, _)| **t >= cutoff).map(|(_, v)| *v).fold(f64::INFINITY, f64::min)
}

/// Integrates one member and returns its guiding series.
pub fn persistence_series(
    spec: &ModelSpec,
    history: &HistoryFunction,
    params: &PersistenceParams,
) -> Result<GuidingSeries> {
    params.validate(spec)?;
    if !history.is_positive() {
        return Err(Error::Precondition("persistence requires strictly positive initial data".into()));
    }
    let opts = IntegrateOptions::new(params.step).with_lambda(params.lambda);
    let traj = integrate(spec, history, params.horizon, opts)?;
    Ok(guiding_series(&traj))
}

/// Integrates one member and returns the tail infimum of `v`.
pub fn tail_infimum(spec: &ModelSpec, history: &HistoryFunction, params: &PersistenceParams) -> Result<f64> {
    Ok(tail_min(&persistence_series(spec, history, params)?, params.cutoff()))
}

/// Combines per-member tail infima; the result does not depend on member order
/// beyond the order of `tail_infima` itself.
pub fn aggregate(params: &PersistenceParams, threshold: f64, tail_infima: Vec<f64>) -> PersistenceEstimate {
    let ensemble_min = tail_infima.iter().copied().fold(f64::INFINITY, f64::min);
    PersistenceEstimate {
        cutoff: params.cutoff(),
        horizon: params.horizon,
        threshold,
        persistent: !tail_infima.is_empty() && ensemble_min > threshold,
        tail_infima,
        ensemble_min,
    }
}

/// Non-triviality threshold carried by a passing persistence report.
pub fn persistence_threshold(report: &ConditionReport) -> Result<f64> {
    if !report.hypothesis.is_persistence() || !report.passed() {
        return Err(Error::Precondition("persistence condition does not pass".into()));
    }
    report.constants.r0.ok_or_else(|| Error::Precondition("persistence report carries no threshold".into()))
}

/// Sequential ensemble estimate; see the std crate for the parallel driver.
pub fn estimate_persistence(
    spec: &ModelSpec,
    report: &ConditionReport,
    histories: &[HistoryFunction],
    params: &PersistenceParams,
) -> Result<PersistenceEstimate> {
    let threshold = persistence_threshold(report)?;
    if histories.is_empty() {
        return Err(Error::Precondition("empty ensemble".into()));
    }
    let tails = histories.iter().map(|h| tail_infimum(spec, h, params)).collect::<Result<Vec<_>>>()?;
    Ok(aggregate(params, threshold, tails))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionParams {
    pub horizon: f64,
    pub tol: f64,
    pub step: f64,
}

/// `u` along one trajectory, with the critical-point landmark audit.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayLog {
    /// `(t, u(t))` at `t = τ*·2^k` and at the horizon.
    pub checkpoints: Vec<(f64, f64)>,
    pub final_u: f64,
    pub landmarks: usize,
    pub landmark_violations: usize,
    /// Largest `u(t₀) − e⁻¹` over landmarks (may be negative).
    pub worst_landmark_excess: f64,
    pub series: GuidingSeries,
}

impl DecayLog {
    pub fn attracted(&self, tol: f64) -> bool {
        self.final_u < tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttractionReport {
    pub logs: Vec<DecayLog>,
    pub attracted: bool,
    pub landmarks_hold: bool,
}

/// Audits `u` from `series`: every node past `tau_max` whose forward
/// difference is nonnegative must satisfy `u ≤ e⁻¹ + 10h`.
pub fn audit_decay(series: GuidingSeries, tau_max: f64, step: f64) -> DecayLog {
    let limit = INV_E + 10.0 * step;
    let mut landmarks = 0;
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..series.len().saturating_sub(1) {
        if series.times[k] <= tau_max || series.u[k + 1] < series.u[k] {
            continue;
        }
        landmarks += 1;
        worst = worst.max(series.u[k] - INV_E);
        if series.u[k] > limit {
            violations += 1;
        }
    }
    let end = series.times.last().copied().unwrap_or(0.0);
    let mut checkpoints = Vec::new();
    let mut mark = tau_max;
    while mark < end {
        checkpoints.push((mark, u_at(&series, mark)));
        mark *= 2.0;
    }
    let final_u = series.u.last().copied().unwrap_or(0.0);
    checkpoints.push((end, final_u));
    DecayLog { checkpoints, final_u, landmarks, landmark_violations: violations, worst_landmark_excess: worst, series }
}

// value at the last node not after t
fn u_at(series: &GuidingSeries, t: f64) -> f64 {
    let idx = series.times.partition_point(|&s| s <= t).saturating_sub(1);
    series.u[idx]
}

pub fn decay_log(spec: &ModelSpec, history: &HistoryFunction, params: &AttractionParams) -> Result<DecayLog> {
    let traj = integrate(spec, history, params.horizon, IntegrateOptions::new(params.step))?;
    Ok(audit_decay(guiding_series(&traj), spec.max_delay(), params.step))
}

/// Checks that `report` is a passing zero-attraction report and `tol > 0`.
pub fn validate_attraction(report: &ConditionReport, params: &AttractionParams) -> Result<()> {
    if report.hypothesis != Hypothesis::ZeroAttractor || !report.passed() {
        return Err(Error::Precondition("zero-attraction condition does not pass".into()));
    }
    if !(params.tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: params.tol });
    }
    Ok(())
}

pub fn verify_zero_attraction(
    spec: &ModelSpec,
    report: &ConditionReport,
    histories: &[HistoryFunction],
    params: &AttractionParams,
) -> Result<AttractionReport> {
    validate_attraction(report, params)?;
    let logs = histories.iter().map(|h| decay_log(spec, h, params)).collect::<Result<Vec<_>>>()?;
    Ok(summarize_attraction(logs, params.tol))
}

pub fn summarize_attraction(logs: Vec<DecayLog>, tol: f64) -> AttractionReport {
    AttractionReport {
        attracted: logs.iter().all(|l| l.attracted(tol)),
        landmarks_hold: logs.iter().all(|l| l.landmark_violations == 0),
        logs,
    }
}

/// `count` constant histories with entries log-uniform in `[low, high]`.
pub fn random_constant_histories(
    dim: usize,
    count: usize,
    low: f64,
    high: f64,
    seed: u64,
) -> Result<Vec<HistoryFunction>> {
    if !(low > 0.0 && high >= low && high.is_finite()) {
        return Err(Error::InvalidParameter { name: "history range", value: low });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (libm::log(low), libm::log(high));
    (0..count)
        .map(|_| {
            let state: Vec<f64> =
                (0..dim).map(|_| if a == b { low } else { libm::exp(rng.random_range(a..b)) }).collect();
            HistoryFunction::constant(&state)
        })
        .collect()
}
