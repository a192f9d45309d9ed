//! Quantitative certificates for the persistence, dissipativity and
//! zero-attraction hypotheses.
//!
//! "For all t" conditions are evaluated on a uniform grid over one period.
//! A grid minimum only certifies the condition when it exceeds the largest
//! possible dip between grid points, `L · T / grid`, where `L` bounds the
//! time-Lipschitz constant of the tested expression from the Fourier
//! coefficients. Positive margins below that slack are reported as
//! [`Verdict::Inconclusive`]. Margins of exactly zero fail.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::ModelSpec;

pub const MIN_GRID: usize = 64;
pub const DEFAULT_ETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Scalar persistence `G⁰ < (1 − δ) Σ p_j` (with `Σ p_j ≥ c`).
    ScalarPersistence,
    /// Lower production bound `Σ_j p_{i,j} ≥ c > 0`.
    ProductionFloor,
    /// System persistence `G⁰_i < (1 − δ)(Σ b₀ + Σ p)`.
    SystemPersistence,
    /// Dissipativity `G_{i,∞} > Σ b^∞ + β`.
    Dissipativity,
    /// Zero attraction `G_i/x_i ≥ Σ b_{i,l}/x_l + Σ p`.
    ZeroAttractor,
}

impl Hypothesis {
    pub fn id(&self) -> &'static str {
        match self {
            Hypothesis::ScalarPersistence => "H0-scalar",
            Hypothesis::ProductionFloor => "P-INF",
            Hypothesis::SystemPersistence => "H0-SYS",
            Hypothesis::Dissipativity => "PER",
            Hypothesis::ZeroAttractor => "ATTR",
        }
    }

    pub fn is_persistence(&self) -> bool {
        matches!(self, Hypothesis::ScalarPersistence | Hypothesis::SystemPersistence)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Positive grid margin that the Lipschitz slack cannot certify.
    Inconclusive,
}

/// Witnessing constants. Entries that a check does not produce stay `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Constants {
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub beta: Option<f64>,
    pub k0: f64,
    pub p_star: f64,
    /// Upper a priori bound `R₀`.
    pub upper: Option<f64>,
    /// Lower a priori bound `ε₀`.
    pub eps0: Option<f64>,
    /// Non-triviality threshold `ε₀ / 2`, the constructive stand-in for `r₀`.
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub hypothesis: Hypothesis,
    pub verdict: Verdict,
    /// Grid minimum of right-hand side minus left-hand side.
    pub margin: f64,
    /// `L · T / grid` for the margin expression.
    pub slack: f64,
    pub constants: Constants,
    pub grid: usize,
    /// Worst raw-inequality slack over random spot samples (zero-attraction only).
    pub spot_margin: Option<f64>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < MIN_GRID {
        return Err(Error::InvalidParameter { name: "grid", value: grid as f64 });
    }
    Ok(())
}

/// `k`-th grid time; `grid_time(2k, 2g) == grid_time(k, g)` bit for bit.
fn grid_time(period: f64, grid: usize, k: usize) -> f64 {
    (k as f64 * period) / grid as f64
}

fn grid_min(spec: &ModelSpec, grid: usize, mut eval: impl FnMut(usize, f64) -> f64) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..grid {
        let t = grid_time(spec.period(), grid, k);
        for i in 0..spec.dim() {
            best = best.min(eval(i, t));
        }
    }
    best
}

fn classify(margin: f64, slack: f64) -> Verdict {
    if !(margin > 0.0) {
        Verdict::Fail
    } else if margin <= slack {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

fn worst(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    }
}

/// `c = min_{i,t} Σ_j p_{i,j}(t)` on the grid, with its Lipschitz slack.
pub fn production_floor(spec: &ModelSpec, grid: usize) -> (f64, f64) {
    let c = grid_min(spec, grid, |i, t| spec.species()[i].total_production(t));
    let lip = spec.species().iter().map(|sp| sp.production_lipschitz()).fold(0.0, f64::max);
    (c, lip * spec.period() / grid as f64)
}

/// Grid margin of the persistence inequality for a given `δ`, with its slack.
pub fn persistence_margin(spec: &ModelSpec, delta: f64, grid: usize) -> (f64, f64) {
    let margin = grid_min(spec, grid, |i, t| {
        let sp = &spec.species()[i];
        let inflow: f64 = spec.inflows(i).map(|(_, b)| b.slope_zero(t)).sum();
        (1.0 - delta) * (inflow + sp.total_production(t)) - sp.loss_slope_zero(t)
    });
    let lip = (0..spec.dim())
        .map(|i| {
            let sp = &spec.species()[i];
            let inflow: f64 = spec.inflows(i).map(|(_, b)| b.slope_lipschitz()).sum();
            (1.0 - delta) * (inflow + sp.production_lipschitz()) + sp.loss_lipschitz()
        })
        .fold(0.0, f64::max);
    (margin, lip * spec.period() / grid as f64)
}

/// Persistence check; reduces to the scalar condition pair when `N = 1`.
pub fn check_persistence(spec: &ModelSpec, delta: f64, grid: usize) -> Result<ConditionReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    check_grid(grid)?;
    let (margin, slack) = persistence_margin(spec, delta, grid);
    let (c, c_slack) = production_floor(spec, grid);
    let verdict = worst(classify(margin, slack), classify(c, c_slack));
    let hypothesis = if spec.dim() == 1 { Hypothesis::ScalarPersistence } else { Hypothesis::SystemPersistence };
    let mut constants = Constants {
        delta: Some(delta),
        c: Some(c.max(0.0)),
        k0: spec.slope_upper_bound(),
        p_star: spec.production_peak(),
        ..Constants::default()
    };
    if margin > 0.0 && constants.p_star > 0.0 {
        let eps0 = lower_bound(spec, margin, delta, DEFAULT_ETA).eps0;
        constants.eps0 = Some(eps0);
        constants.r0 = Some(eps0 / 2.0);
    }
    Ok(ConditionReport { hypothesis, verdict, margin, slack, constants, grid, spot_margin: None })
}

/// Largest `δ` (to `tol`) for which the persistence margin stays positive,
/// by bisection on `(0, 1)`. `None` if even `δ → 0` fails.
pub fn max_feasible_delta(spec: &ModelSpec, grid: usize, tol: f64) -> Option<f64> {
    let margin = |d: f64| persistence_margin(spec, d, grid).0;
    let (mut lo, mut hi) = (0.0, 1.0);
    if !(margin(tol.min(0.5) * 1e-3) > 0.0) {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if margin(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Dissipativity check: `β = min_{i,t} G_{i,∞}(t) − Σ_l b^∞_{i,l}(t)`.
pub fn check_dissipativity(spec: &ModelSpec, grid: usize) -> Result<ConditionReport> {
    check_grid(grid)?;
    let margin = grid_min(spec, grid, |i, t| {
        let outflow: f64 = spec.inflows(i).map(|(_, b)| b.slope_inf(t)).sum();
        spec.species()[i].loss_slope_inf(t) - outflow
    });
    let lip = (0..spec.dim())
        .map(|i| {
            let inflow: f64 = spec.inflows(i).map(|(_, b)| b.slope_lipschitz()).sum();
            spec.species()[i].loss_lipschitz() + inflow
        })
        .fold(0.0, f64::max);
    let slack = lip * spec.period() / grid as f64;
    let beta = margin.max(0.0);
    let p_star = spec.production_peak();
    let mut constants = Constants { beta: Some(beta), k0: spec.slope_upper_bound(), p_star, ..Constants::default() };
    if beta > 0.0 {
        constants.upper = Some(upper_bound(spec, beta, DEFAULT_ETA).r0);
    }
    Ok(ConditionReport {
        hypothesis: Hypothesis::Dissipativity,
        verdict: classify(margin, slack),
        margin,
        slack,
        constants,
        grid,
        spot_margin: None,
    })
}

/// Zero-attraction check.
///
/// The slope certificate uses `inf_x G_i/x − Σ_l sup_x b_{i,l}/x − Σ_j p_{i,j}`
/// on the grid; the raw inequality is additionally spot-checked at
/// `spot_samples` random `(t, x)` with `x` log-uniform in `(1e-4, 1e4)^N`.
pub fn check_zero_attractor(spec: &ModelSpec, grid: usize, spot_samples: usize, seed: u64) -> Result<ConditionReport> {
    check_grid(grid)?;
    let margin = grid_min(spec, grid, |i, t| {
        let sp = &spec.species()[i];
        let inflow: f64 = spec.inflows(i).map(|(_, b)| b.max_slope(t)).sum();
        sp.loss_min_slope(t) - inflow - sp.total_production(t)
    });
    let lip = (0..spec.dim())
        .map(|i| {
            let sp = &spec.species()[i];
            let inflow: f64 = spec.inflows(i).map(|(_, b)| b.slope_lipschitz()).sum();
            sp.loss_lipschitz() + inflow + sp.production_lipschitz()
        })
        .fold(0.0, f64::max);
    let slack = lip * spec.period() / grid as f64;
    let (c, c_slack) = production_floor(spec, grid);

    let spot = spot_check_attraction(spec, spot_samples, seed);
    let mut verdict = worst(classify(margin, slack), classify(c, c_slack));
    if spot < 0.0 {
        verdict = Verdict::Fail;
    }
    let constants = Constants {
        c: Some(c.max(0.0)),
        k0: spec.slope_upper_bound(),
        p_star: spec.production_peak(),
        ..Constants::default()
    };
    Ok(ConditionReport {
        hypothesis: Hypothesis::ZeroAttractor,
        verdict,
        margin,
        slack,
        constants,
        grid,
        spot_margin: Some(spot),
    })
}

/// Minimum over samples and species of `G_i/x_i − Σ b_{i,l}/x_l − Σ p_{i,j}`.
pub fn spot_check_attraction(spec: &ModelSpec, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.dim();
    let mut x: Vec<f64> = alloc::vec![0.0; n];
    let mut worst = f64::INFINITY;
    let (lo, hi) = (libm::log(1e-4), libm::log(1e4));
    for _ in 0..samples {
        let t = rng.random::<f64>() * spec.period();
        for xi in x.iter_mut() {
            *xi = libm::exp(rng.random_range(lo..hi));
        }
        for (i, sp) in spec.species().iter().enumerate() {
            let inflow: f64 = spec.inflows(i).map(|(l, b)| b.value(t, x[l]) / x[l]).sum();
            let slack = sp.loss(t, x[i]) / x[i] - inflow - sp.total_production(t);
            worst = worst.min(slack);
        }
    }
    worst
}

/// The a priori box `[ε₀, R₀]^N` for periodic solutions of `x' = λ Φ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicBounds {
    pub p_star: f64,
    pub beta: f64,
    /// Slack in the persistence inequality, capped at `(1 − δ) p*`.
    pub gamma: f64,
    /// State beyond which every slope is within `η` of its value at infinity.
    pub r_tilde: f64,
    /// State below which every slope is within `η` of its value at zero (may be `∞`).
    pub eps_tilde: f64,
    /// Upper bound `R₀ = max(R̃, p*/(eβ))`.
    pub r0: f64,
    /// Lower bound `ε₀ = min(ε̃, −ln(1 − γ/p*))`.
    pub eps0: f64,
    pub eta: f64,
}

impl PeriodicBounds {
    /// `ε₀ / 2`, the threshold separating non-trivial orbits from zero.
    pub fn eps_triv(&self) -> f64 {
        self.eps0 / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.eps0 && x <= self.r0
    }
}

struct Lower {
    gamma: f64,
    eps_tilde: f64,
    eps0: f64,
}

fn lower_bound(spec: &ModelSpec, margin: f64, delta: f64, eta: f64) -> Lower {
    let p_star = spec.production_peak();
    let gap = spec.max_slope_gap();
    let eps_tilde = if gap > 0.0 { eta / gap } else { f64::INFINITY };
    let gamma = margin.min((1.0 - delta) * p_star);
    let eps0 = eps_tilde.min(-libm::log(1.0 - gamma / p_star));
    Lower { gamma, eps_tilde, eps0 }
}

struct Upper {
    r_tilde: f64,
    r0: f64,
}

fn upper_bound(spec: &ModelSpec, beta: f64, eta: f64) -> Upper {
    let p_star = spec.production_peak();
    let gap = spec.max_slope_gap();
    let r_tilde = (gap / eta - 1.0).max(0.0);
    let r0 = r_tilde.max(p_star / (core::f64::consts::E * beta));
    Upper { r_tilde, r0 }
}

/// A priori bounds from passing persistence and dissipativity reports.
pub fn compute_periodic_bounds(
    spec: &ModelSpec,
    persistence: &ConditionReport,
    dissipativity: &ConditionReport,
    eta: f64,
) -> Result<PeriodicBounds> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidParameter { name: "eta", value: eta });
    }
    if !persistence.hypothesis.is_persistence() || !persistence.passed() {
        return Err(Error::Precondition("persistence condition does not pass".into()));
    }
    if persistence.hypothesis == Hypothesis::ScalarPersistence && spec.dim() != 1 {
        return Err(Error::Precondition("scalar persistence report for a system".into()));
    }
    if dissipativity.hypothesis != Hypothesis::Dissipativity || !dissipativity.passed() {
        return Err(Error::Precondition("dissipativity condition does not pass".into()));
    }
    let delta =
        persistence.constants.delta.ok_or_else(|| Error::Precondition("persistence report has no delta".into()))?;
    let beta = dissipativity.margin;
    let lower = lower_bound(spec, persistence.margin, delta, eta);
    let upper = upper_bound(spec, beta, eta);
    Ok(PeriodicBounds {
        p_star: spec.production_peak(),
        beta,
        gamma: lower.gamma,
        r_tilde: upper.r_tilde,
        eps_tilde: lower.eps_tilde,
        r0: upper.r0,
        eps0: lower.eps0,
        eta,
    })
}
