//! Periodic orbits as fixed points of the period map on a sampled history.
//!
//! A history is an `N × m` grid on `[−τ*, 0]`; the map integrates
//! `x' = λ Φ(x)` over one coefficient period and resamples `[T − τ*, T]`
//! at the same relative nodes. Fixed points of this map are the numerical
//! periodic solutions. Damped Picard iteration is tried first; when it
//! stagnates the search switches to Broyden's method seeded with a
//! finite-difference Jacobian.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::conditions::PeriodicBounds;
use crate::error::{Error, Result};
use crate::history::{HistoryFunction, HistoryGrid};
use crate::integrator::{integrate, IntegrateOptions, Trajectory};
use crate::model::ModelSpec;

pub const MIN_MAP_NODES: usize = 8;
pub const MIRANDA_PANELS: usize = 64;
const STAGNATION_WINDOW: usize = 10;
const STAGNATION_RATIO: f64 = 0.99;
const MAX_BACKTRACKS: usize = 8;

/// `max(16, round(τ*/h) + 1)`: one history node per mesh node once the mesh
/// is fine enough.
pub fn default_nodes(tau_max: f64, step: f64) -> usize {
    let per_mesh = libm::round(tau_max / step) as usize + 1;
    per_mesh.max(16)
}

/// One application of the period map.
pub fn poincare_map(spec: &ModelSpec, grid: &HistoryGrid, step: f64, lambda: f64) -> Result<HistoryGrid> {
    let traj = period_trajectory(spec, grid, step, lambda)?;
    resample(spec, &traj, grid.nodes())
}

fn period_trajectory(spec: &ModelSpec, grid: &HistoryGrid, step: f64, lambda: f64) -> Result<Trajectory> {
    if grid.nodes() < MIN_MAP_NODES {
        return Err(Error::InvalidParameter { name: "history nodes", value: grid.nodes() as f64 });
    }
    if grid.dim() != spec.dim() {
        return Err(Error::Dimension { expected: spec.dim(), found: grid.dim() });
    }
    let history = HistoryFunction::SampledGrid(grid.clone());
    integrate(spec, &history, spec.period(), IntegrateOptions::new(step).with_lambda(lambda))
}

fn resample(spec: &ModelSpec, traj: &Trajectory, nodes: usize) -> Result<HistoryGrid> {
    let t_end = spec.period();
    let tau = spec.max_delay();
    let n = spec.dim();
    let mut values = vec![0.0; n * nodes];
    let mut buf = vec![0.0; n];
    let probe = HistoryGrid::constant(tau, nodes, &vec![0.0; n])?;
    for k in 0..nodes {
        traj.query_into(t_end + probe.node_time(k), &mut buf)?;
        for i in 0..n {
            values[i * nodes + k] = buf[i];
        }
    }
    HistoryGrid::new(n, tau, nodes, values)
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| libm::fabs(x - y)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitMethod {
    FixedPoint,
    Broyden,
}

impl OrbitMethod {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitMethod::FixedPoint => "fixed-point",
            OrbitMethod::Broyden => "broyden",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub method: OrbitMethod,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    pub step: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub lambda: f64,
    /// Picard damping `φ ← (1 − θ) φ + θ P(φ)`.
    pub theta: f64,
}

impl OrbitOptions {
    pub fn new(step: f64) -> Self {
        OrbitOptions { step, tol: 1e-10, max_iter: 200, lambda: 1.0, theta: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsVerdict {
    Inside,
    /// Within tolerance of `ε₀` or `R₀`.
    BoundaryWarning,
    Outside,
}

impl BoundsVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            BoundsVerdict::Inside => "inside",
            BoundsVerdict::BoundaryWarning => "boundary-warning",
            BoundsVerdict::Outside => "outside",
        }
    }

    pub fn holds(&self) -> bool {
        !matches!(self, BoundsVerdict::Outside)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbitResult {
    pub grid: HistoryGrid,
    /// `‖P(φ) − φ‖∞` at the returned grid.
    pub residual: f64,
    /// Per-species extremes over one re-integrated period.
    pub orbit_min: Vec<f64>,
    pub orbit_max: Vec<f64>,
    pub iterations: usize,
    /// Method that produced the returned grid.
    pub method: OrbitMethod,
    pub trace: Vec<TraceEntry>,
    pub lambda: f64,
    pub eps_triv: f64,
    pub nontrivial: bool,
    pub bounds: BoundsVerdict,
    /// The orbit over `[0, T]` on the integration mesh.
    pub period: Trajectory,
}

impl PeriodicOrbitResult {
    pub fn success(&self, tol: f64) -> bool {
        self.residual < tol && self.nontrivial
    }
}

struct Search<'a> {
    spec: &'a ModelSpec,
    dim: usize,
    tau: f64,
    nodes: usize,
    step: f64,
    lambda: f64,
}

impl Search<'_> {
    fn grid(&self, z: &[f64]) -> Result<HistoryGrid> {
        HistoryGrid::new(self.dim, self.tau, self.nodes, z.to_vec())
    }

    fn map(&self, z: &[f64]) -> Result<Vec<f64>> {
        let g = poincare_map(self.spec, &self.grid(z)?, self.step, self.lambda)?;
        Ok(g.values().to_vec())
    }

    fn residual(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.map(z)?;
        for (ri, zi) in r.iter_mut().zip(z) {
            *ri -= zi;
        }
        Ok(r)
    }

    fn jacobian(&self, z: &[f64], r: &[f64]) -> Result<DMatrix<f64>> {
        let len = z.len();
        let mut jac = DMatrix::zeros(len, len);
        let mut probe = z.to_vec();
        for j in 0..len {
            let e = 1e-7 * z[j].abs().max(1.0);
            probe[j] = z[j] + e;
            let rp = self.residual(&probe)?;
            for i in 0..len {
                jac[(i, j)] = (rp[i] - r[i]) / e;
            }
            probe[j] = z[j];
        }
        Ok(jac)
    }
}

/// Searches for a fixed point of the period map starting from `initial`.
///
/// `bounds` certifies the hypotheses and supplies the non-triviality
/// threshold `ε₀/2` and the a priori box the orbit is checked against.
pub fn find_periodic_orbit(
    spec: &ModelSpec,
    bounds: &PeriodicBounds,
    initial: &HistoryGrid,
    options: &OrbitOptions,
) -> Result<PeriodicOrbitResult> {
    if !(options.tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: options.tol });
    }
    if !(options.theta > 0.0 && options.theta <= 1.0) {
        return Err(Error::InvalidParameter { name: "theta", value: options.theta });
    }
    let search = Search {
        spec,
        dim: spec.dim(),
        tau: spec.max_delay(),
        nodes: initial.nodes(),
        step: options.step,
        lambda: options.lambda,
    };
    let mut trace = Vec::new();
    let mut best = f64::INFINITY;
    let mut z = initial.values().to_vec();
    let theta = options.theta;

    // damped Picard phase
    let mut fixed = None;
    while trace.len() < options.max_iter {
        let pz = search.map(&z)?;
        let res = sup_distance(&pz, &z);
        trace.push(TraceEntry { method: OrbitMethod::FixedPoint, residual: res });
        best = best.min(res);
        if res < options.tol {
            fixed = Some((z.clone(), res, OrbitMethod::FixedPoint));
            break;
        }
        let k = trace.len();
        if !res.is_finite()
            || (k > STAGNATION_WINDOW
                && too_slow(res, trace[k - 1 - STAGNATION_WINDOW].residual, options.tol, options.max_iter - k))
        {
            break;
        }
        for (zi, pi) in z.iter_mut().zip(&pz) {
            *zi = (1.0 - theta) * *zi + theta * pi;
        }
    }

    if fixed.is_none() && trace.len() < options.max_iter {
        fixed = broyden(&search, &mut z, options, &mut trace, &mut best)?;
    }
    let Some((z, residual, method)) = fixed else {
        return Err(Error::NonConvergence { best_residual: best, iterations: trace.len() });
    };

    let grid = search.grid(&z)?;
    let period = period_trajectory(spec, &grid, options.step, options.lambda)?;
    let (orbit_min, orbit_max) = extremes(&period);
    let eps_triv = bounds.eps_triv();
    let nontrivial = orbit_min.iter().all(|&m| m > eps_triv);
    let verdict = bounds_verdict(&orbit_min, &orbit_max, bounds);
    Ok(PeriodicOrbitResult {
        grid,
        residual,
        orbit_min,
        orbit_max,
        iterations: trace.len(),
        method,
        trace,
        lambda: options.lambda,
        eps_triv,
        nontrivial,
        bounds: verdict,
        period,
    })
}

/// Whether the linear rate observed over the last window stalls, or cannot
/// reach `tol` within `remaining` further iterations.
fn too_slow(res: f64, past: f64, tol: f64, remaining: usize) -> bool {
    let ratio = res / past;
    if ratio > STAGNATION_RATIO {
        return true;
    }
    let needed = STAGNATION_WINDOW as f64 * libm::log(tol / res) / libm::log(ratio);
    needed > remaining as f64
}

type Found = Option<(Vec<f64>, f64, OrbitMethod)>;

fn broyden(
    search: &Search<'_>,
    z: &mut Vec<f64>,
    options: &OrbitOptions,
    trace: &mut Vec<TraceEntry>,
    best: &mut f64,
) -> Result<Found> {
    let mut r = search.residual(z)?;
    let mut res = sup_distance(&r, &vec![0.0; r.len()]);
    let mut jac = search.jacobian(z, &r)?;
    let mut fresh = true;
    while trace.len() < options.max_iter {
        let rhs = -DVector::from_column_slice(&r);
        let Some(step) = jac.clone().lu().solve(&rhs) else {
            if fresh {
                return Err(Error::Singular);
            }
            jac = search.jacobian(z, &r)?;
            fresh = true;
            continue;
        };

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_BACKTRACKS {
            let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(zi, si)| (zi + alpha * si).max(0.0)).collect();
            if let Ok(rt) = search.residual(&trial) {
                let rt_res = sup_distance(&rt, &vec![0.0; rt.len()]);
                if rt_res < res {
                    accepted = Some((trial, rt, rt_res));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((trial, rt, rt_res)) = accepted else {
            if fresh {
                return Ok(None);
            }
            jac = search.jacobian(z, &r)?;
            fresh = true;
            continue;
        };

        let s = DVector::from_iterator(z.len(), trial.iter().zip(z.iter()).map(|(a, b)| a - b));
        let y = DVector::from_iterator(r.len(), rt.iter().zip(&r).map(|(a, b)| a - b));
        let ss = s.dot(&s);
        if ss > 0.0 {
            let update = (y - &jac * &s) * s.transpose() / ss;
            jac += update;
        }
        fresh = false;
        *z = trial;
        r = rt;
        res = rt_res;
        *best = best.min(res);
        trace.push(TraceEntry { method: OrbitMethod::Broyden, residual: res });
        if res < options.tol {
            return Ok(Some((z.clone(), res, OrbitMethod::Broyden)));
        }
    }
    Ok(None)
}

fn extremes(traj: &Trajectory) -> (Vec<f64>, Vec<f64>) {
    let n = traj.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for k in 0..traj.len() {
        for (i, &x) in traj.state(k).iter().enumerate() {
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    (lo, hi)
}

/// Relative tolerance separating a boundary touch from a violation.
pub const BOUNDARY_TOL: f64 = 1e-6;

fn bounds_verdict(lo: &[f64], hi: &[f64], bounds: &PeriodicBounds) -> BoundsVerdict {
    let tol = BOUNDARY_TOL * bounds.r0.max(1.0);
    let min = lo.iter().copied().fold(f64::INFINITY, f64::min);
    let max = hi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min < bounds.eps0 - tol || max > bounds.r0 + tol {
        BoundsVerdict::Outside
    } else if min <= bounds.eps0 + tol || max >= bounds.r0 - tol {
        BoundsVerdict::BoundaryWarning
    } else {
        BoundsVerdict::Inside
    }
}

/// Re-integrates one period from the orbit's grid and checks it against `[ε₀, R₀]`.
pub fn verify_orbit_bounds(
    spec: &ModelSpec,
    result: &PeriodicOrbitResult,
    bounds: &PeriodicBounds,
    step: f64,
) -> Result<BoundsVerdict> {
    let traj = period_trajectory(spec, &result.grid, step, result.lambda)?;
    let (lo, hi) = extremes(&traj);
    Ok(bounds_verdict(&lo, &hi, bounds))
}

/// Largest node-wise change between consecutive periods over `periods`
/// re-integrated periods starting from `grid`.
pub fn period_drift(spec: &ModelSpec, grid: &HistoryGrid, step: f64, lambda: f64, periods: usize) -> Result<f64> {
    let t = spec.period();
    let history = HistoryFunction::SampledGrid(grid.clone());
    let traj = integrate(spec, &history, t * periods as f64, IntegrateOptions::new(step).with_lambda(lambda))?;
    let n = spec.dim();
    let samples = libm::round(t / step).max(1.0) as usize;
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut drift: f64 = 0.0;
    for p in 1..periods {
        for s in 0..=samples {
            let u = t * s as f64 / samples as f64;
            traj.query_into(u + (p - 1) as f64 * t, &mut a)?;
            traj.query_into(u + p as f64 * t, &mut b)?;
            drift = drift.max(sup_distance(&a, &b));
        }
    }
    Ok(drift)
}

/// `g(x) = −(1/T) ∫₀ᵀ Φ(x)(t) dt` at a constant state, by composite Simpson.
pub fn averaged_field(spec: &ModelSpec, x: &[f64], panels: usize) -> Result<Vec<f64>> {
    let n = spec.dim();
    if x.len() != n {
        return Err(Error::Dimension { expected: n, found: x.len() });
    }
    if panels == 0 || !panels.is_multiple_of(2) {
        return Err(Error::InvalidParameter { name: "panels", value: panels as f64 });
    }
    let delayed: Vec<f64> = (0..spec.delays().len()).flat_map(|_| x.iter().copied()).collect();
    let t_end = spec.period();
    let h = t_end / panels as f64;
    let mut acc = vec![0.0; n];
    let mut buf = vec![0.0; n];
    for k in 0..=panels {
        let w = if k == 0 || k == panels {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        spec.evaluate_rhs(k as f64 * h, x, &delayed, &mut buf)?;
        for i in 0..n {
            acc[i] += w * buf[i];
        }
    }
    Ok(acc.iter().map(|a| -a * h / (3.0 * t_end)).collect())
}

/// Worst averaged-field values on the two faces `x_i = ε` and `x_i = R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceMargins {
    pub species: usize,
    /// `max g_i` over the ε-face; must be negative.
    pub low_face_max: f64,
    /// `min g_i` over the R-face; must be positive.
    pub high_face_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MirandaReport {
    pub eps: f64,
    pub r: f64,
    pub face_grid: usize,
    pub faces: Vec<FaceMargins>,
    pub holds: bool,
}

/// Samples `g` on every face of `[ε, R]^N`; the other coordinates run over a
/// `face_grid`-point lattice including both endpoints.
pub fn check_miranda_signs(spec: &ModelSpec, eps: f64, r: f64, face_grid: usize) -> Result<MirandaReport> {
    if !(eps > 0.0 && r > eps && r.is_finite()) {
        return Err(Error::InvalidParameter { name: "eps", value: eps });
    }
    if face_grid < 2 {
        return Err(Error::InvalidParameter { name: "face grid", value: face_grid as f64 });
    }
    let n = spec.dim();
    let level = |k: usize| {
        if k + 1 == face_grid {
            r
        } else {
            eps + (r - eps) * k as f64 / (face_grid - 1) as f64
        }
    };
    let lattice = face_grid.pow(n as u32 - 1);
    let mut faces = Vec::with_capacity(n);
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut low_face_max = f64::NEG_INFINITY;
        let mut high_face_min = f64::INFINITY;
        for idx in 0..lattice {
            let mut rest = idx;
            for (l, xl) in x.iter_mut().enumerate() {
                if l != i {
                    *xl = level(rest % face_grid);
                    rest /= face_grid;
                }
            }
            x[i] = eps;
            low_face_max = low_face_max.max(averaged_field(spec, &x, MIRANDA_PANELS)?[i]);
            x[i] = r;
            high_face_min = high_face_min.min(averaged_field(spec, &x, MIRANDA_PANELS)?[i]);
        }
        faces.push(FaceMargins { species: i, low_face_max, high_face_min });
    }
    let holds = faces.iter().all(|f| f.low_face_max < 0.0 && f.high_face_min > 0.0);
    Ok(MirandaReport { eps, r, face_grid, faces, holds })
}
