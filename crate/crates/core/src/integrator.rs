//! Method-of-steps RK4 integration with cubic Hermite dense output.
//!
//! The step must divide every delay, so the derivative jump at `t = 0` and
//! its images at multiples of each `τ_j` all land on mesh nodes. Delayed
//! arguments at stage times are read from the dense output of segments that
//! are already complete (`h ≤ min τ_j` guarantees they exist).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::history::HistoryFunction;
use crate::model::ModelSpec;

/// A delay vector field `x'(t) = F(t, x(t), x(t − τ_1), …, x(t − τ_k))`.
pub trait DelayField {
    fn dim(&self) -> usize;

    fn delays(&self) -> &[f64];

    /// `delayed` is `k × N` row-major, one row per delay.
    fn eval(&self, t: f64, x: &[f64], delayed: &[f64], out: &mut [f64]) -> Result<()>;

    /// Whether the solution must stay in the nonnegative cone. Nonnegative
    /// fields get step-halving on negative components and zero-clamped queries.
    fn nonnegative(&self) -> bool {
        true
    }
}

impl DelayField for ModelSpec {
    fn dim(&self) -> usize {
        ModelSpec::dim(self)
    }

    fn delays(&self) -> &[f64] {
        ModelSpec::delays(self)
    }

    fn eval(&self, t: f64, x: &[f64], delayed: &[f64], out: &mut [f64]) -> Result<()> {
        self.evaluate_rhs(t, x, delayed, out)
    }
}

/// Relative tolerance for `h | τ_j`.
pub const ALIGNMENT_TOL: f64 = 1e-12;

/// Number of halvings allowed before a positivity failure is reported.
pub const MAX_HALVINGS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub step: f64,
    /// Field scaling `x' = λ F`; `1` integrates the model itself.
    pub lambda: f64,
}

impl IntegrateOptions {
    pub fn new(step: f64) -> Self {
        IntegrateOptions { step, lambda: 1.0 }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
}

/// Checks `h ≤ min τ_j` and that `h` divides each `τ_j`.
pub fn check_step(delays: &[f64], step: f64) -> Result<()> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter { name: "step", value: step });
    }
    for (j, &tau) in delays.iter().enumerate() {
        let ratio = tau / step;
        let whole = libm::round(ratio);
        if whole < 1.0 || libm::fabs(ratio - whole) > ALIGNMENT_TOL * ratio.max(1.0) {
            return Err(Error::MisalignedStep { delay_index: j, delay: tau, step });
        }
    }
    Ok(())
}

/// Dense numerical solution on `[−τ*, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    tau_max: f64,
    clamp: bool,
    history: HistoryFunction,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn history(&self) -> &HistoryFunction {
        &self.history
    }

    /// Mesh nodes `t₀ = 0 < t₁ < …`.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, node: usize) -> &[f64] {
        &self.states[node * self.dim..(node + 1) * self.dim]
    }

    pub fn derivative(&self, node: usize) -> &[f64] {
        &self.derivs[node * self.dim..(node + 1) * self.dim]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least the initial node")
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.times.len() - 1)
    }

    pub fn query_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let end = self.end();
        let slack = 1e-12 * end.abs().max(1.0);
        if t.is_nan() || t < -self.tau_max - slack || t > end + slack {
            return Err(Error::OutOfRange { time: t, start: -self.tau_max, end });
        }
        self.eval_into(t.min(end), out)
    }

    pub fn query(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.query_into(t, &mut out)?;
        Ok(out)
    }

    // no range check; callers guarantee t ∈ [−τ*, end]
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        if t < 0.0 {
            return self.history.value_into(t.max(-self.tau_max), out);
        }
        let last = self.times.len() - 1;
        let idx = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if idx >= last {
            out.copy_from_slice(self.state(last));
            return Ok(());
        }
        let (t0, t1) = (self.times[idx], self.times[idx + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (y0, y1) = (self.state(idx), self.state(idx + 1));
        let (d0, d1) = (self.derivative(idx), self.derivative(idx + 1));
        for i in 0..self.dim {
            let v = h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i];
            out[i] = if self.clamp { v.max(0.0) } else { v };
        }
        Ok(())
    }

    fn push(&mut self, t: f64, x: &[f64], dx: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(x);
        self.derivs.extend_from_slice(dx);
    }
}

struct Workspace {
    delayed: Vec<f64>,
    stage: Vec<f64>,
    k: [Vec<f64>; 4],
    next: Vec<f64>,
    next_deriv: Vec<f64>,
}

/// Integrates `x' = λ F` from `history` up to `horizon`.
pub fn integrate<F: DelayField + ?Sized>(
    field: &F,
    history: &HistoryFunction,
    horizon: f64,
    options: IntegrateOptions,
) -> Result<Trajectory> {
    let n = field.dim();
    let delays = field.delays();
    let step = options.step;
    let lambda = options.lambda;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::InvalidParameter { name: "horizon", value: horizon });
    }
    if !(lambda.is_finite() && (0.0..=1.0).contains(&lambda)) {
        return Err(Error::InvalidParameter { name: "lambda", value: lambda });
    }
    check_step(delays, step)?;
    if history.dim() != n {
        return Err(Error::Dimension { expected: n, found: history.dim() });
    }
    let tau_max = delays.iter().copied().fold(0.0, f64::max);
    if let HistoryFunction::SampledGrid(g) = history {
        if libm::fabs(g.tau_max() - tau_max) > 1e-12 * tau_max {
            return Err(Error::InvalidParameter { name: "history tau_max", value: g.tau_max() });
        }
    }

    let clamp = field.nonnegative();
    let mut traj = Trajectory {
        dim: n,
        tau_max,
        clamp,
        history: history.clone(),
        times: Vec::new(),
        states: Vec::new(),
        derivs: Vec::new(),
    };
    let total_steps = libm::ceil(horizon / step - 1e-9).max(1.0) as usize;
    traj.times.reserve(total_steps + 1);
    traj.states.reserve((total_steps + 1) * n);
    traj.derivs.reserve((total_steps + 1) * n);

    let mut ws = Workspace {
        delayed: vec![0.0; n * delays.len()],
        stage: vec![0.0; n],
        k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        next: vec![0.0; n],
        next_deriv: vec![0.0; n],
    };

    let x0 = history.value(0.0)?;
    let mut dx0 = vec![0.0; n];
    scaled_field(field, &traj, lambda, 0.0, &x0, &mut ws.delayed, &mut dx0)?;
    traj.push(0.0, &x0, &dx0);

    let h_min = step / (1u64 << MAX_HALVINGS) as f64;
    let mut t = 0.0;
    for node in 1..=total_steps {
        let target = if node == total_steps { horizon } else { node as f64 * step };
        let mut sub = target - t;
        while t < target {
            sub = sub.min(target - t);
            match try_step(field, &traj, lambda, t, sub, &mut ws) {
                Ok(()) => {
                    let t_new = if target - (t + sub) <= 1e-12 * target.max(1.0) { target } else { t + sub };
                    traj.push(t_new, &ws.next, &ws.next_deriv);
                    t = t_new;
                }
                Err(StepFailure::Fatal(e)) => return Err(e),
                Err(StepFailure::Negative(component)) => {
                    sub *= 0.5;
                    if sub < h_min {
                        return Err(Error::Positivity { time: t, component });
                    }
                }
            }
        }
    }
    Ok(traj)
}

enum StepFailure {
    Negative(usize),
    Fatal(Error),
}

fn delayed_into<F: DelayField + ?Sized>(field: &F, traj: &Trajectory, t: f64, delayed: &mut [f64]) -> Result<()> {
    let n = field.dim();
    for (j, &tau) in field.delays().iter().enumerate() {
        traj.eval_into(t - tau, &mut delayed[j * n..(j + 1) * n])?;
    }
    Ok(())
}

fn scaled_field<F: DelayField + ?Sized>(
    field: &F,
    traj: &Trajectory,
    lambda: f64,
    t: f64,
    x: &[f64],
    delayed: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    delayed_into(field, traj, t, delayed)?;
    field.eval(t, x, delayed, out)?;
    if lambda != 1.0 {
        out.iter_mut().for_each(|v| *v *= lambda);
    }
    Ok(())
}

fn try_step<F: DelayField + ?Sized>(
    field: &F,
    traj: &Trajectory,
    lambda: f64,
    t: f64,
    h: f64,
    ws: &mut Workspace,
) -> core::result::Result<(), StepFailure> {
    let n = field.dim();
    let last = traj.times.len() - 1;
    let x = traj.state(last);
    ws.k[0].copy_from_slice(traj.derivative(last));

    let classify = |e: Error| match e {
        Error::Domain { component, .. } => StepFailure::Negative(component),
        other => StepFailure::Fatal(other),
    };
    let stage_coeffs = [(0.5, 0usize), (0.5, 1), (1.0, 2)];
    for (s, &(c, prev)) in stage_coeffs.iter().enumerate() {
        for i in 0..n {
            ws.stage[i] = x[i] + c * h * ws.k[prev][i];
        }
        let (_, after) = ws.k.split_at_mut(s + 1);
        scaled_field(field, traj, lambda, t + c * h, &ws.stage, &mut ws.delayed, &mut after[0]).map_err(classify)?;
    }
    for i in 0..n {
        ws.next[i] = x[i] + h / 6.0 * (ws.k[0][i] + 2.0 * ws.k[1][i] + 2.0 * ws.k[2][i] + ws.k[3][i]);
    }
    if ws.next.iter().any(|v| !v.is_finite()) {
        return Err(StepFailure::Fatal(Error::NonFinite { time: t + h }));
    }
    if field.nonnegative() {
        if let Some(i) = ws.next.iter().position(|&v| v < 0.0) {
            return Err(StepFailure::Negative(i));
        }
    }
    // derivative at the new node needs delayed values up to t + h − τ ≤ t, already covered
    scaled_field(field, traj, lambda, t + h, &ws.next, &mut ws.delayed, &mut ws.next_deriv).map_err(classify)?;
    Ok(())
}
