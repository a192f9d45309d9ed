//! CSV and JSON artifacts. Floats in CSV use 17 significant digits so rows
//! round-trip exactly; JSON uses serde_json's shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use nicholson_core::analysis::{DecayLog, GuidingSeries, PersistenceEstimate};
use nicholson_core::conditions::{ConditionReport, PeriodicBounds, Verdict};
use nicholson_core::periodic::{MirandaReport, PeriodicOrbitResult};
use nicholson_core::Trajectory;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Output directory guarding against silent overwrites.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
    force: bool,
}

impl OutputDir {
    pub fn new(root: impl Into<PathBuf>, force: bool) -> Self {
        OutputDir { root: root.into(), force }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Fails if any of `names` exists and `--force` was not given; creates the directory.
    pub fn claim(&self, names: &[String]) -> Result<(), CliError> {
        if !self.force {
            for name in names {
                let p = self.path(name);
                if p.exists() {
                    return Err(CliError::OutputExists(p));
                }
            }
        }
        fs::create_dir_all(&self.root).map_err(|e| CliError::io(&self.root, e))
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = self.path(name);
        fs::write(&p, contents).map_err(|e| CliError::io(p, e))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.dim();
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for k in 0..traj.len() {
        out.push_str(&num(traj.times()[k]));
        for &x in traj.state(k) {
            out.push(',');
            out.push_str(&num(x));
        }
        out.push('\n');
    }
    out
}

pub fn guiding_csv(series: &GuidingSeries) -> String {
    let mut out = String::from("t,u,v\n");
    for k in 0..series.len() {
        let _ = writeln!(out, "{},{},{}", num(series.times[k]), num(series.u[k]), num(series.v[k]));
    }
    out
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub fn report_json(r: &ConditionReport) -> Value {
    let c = &r.constants;
    json!({
        "hypothesis": r.hypothesis.id(),
        "pass": r.passed(),
        "verdict": verdict_name(r.verdict),
        "margin": r.margin,
        "slack": r.slack,
        "constants": {
            "delta": c.delta,
            "c": c.c,
            "beta": c.beta,
            "k0": c.k0,
            "p_star": c.p_star,
            "R0": c.upper,
            "eps0": c.eps0,
            "r0": c.r0,
        },
        "grid": r.grid,
        "spot_margin": r.spot_margin,
    })
}

pub fn bounds_json(b: &PeriodicBounds) -> Value {
    json!({
        "p_star": b.p_star,
        "beta": b.beta,
        "gamma": b.gamma,
        "R_tilde": b.r_tilde,
        "eps_tilde": if b.eps_tilde.is_finite() { Some(b.eps_tilde) } else { None },
        "R0": b.r0,
        "eps0": b.eps0,
        "eps_triv": b.eps_triv(),
        "eta": b.eta,
    })
}

pub fn orbit_json(res: &PeriodicOrbitResult, tol: f64, drift: f64) -> Value {
    json!({
        "lambda": res.lambda,
        "converged": true,
        "success": res.success(tol),
        "residual": res.residual,
        "iterations": res.iterations,
        "method": res.method.name(),
        "nontrivial": res.nontrivial,
        "eps_triv": res.eps_triv,
        "orbit_min": res.orbit_min,
        "orbit_max": res.orbit_max,
        "bounds_verdict": res.bounds.name(),
        "drift_5_periods": drift,
        "nodes": res.grid.nodes(),
        "trace": res.trace.iter().map(|e| json!({"method": e.method.name(), "residual": e.residual})).collect::<Vec<_>>(),
    })
}

pub fn orbit_csv(res: &PeriodicOrbitResult) -> String {
    trajectory_csv(&res.period)
}

pub fn persistence_json(e: &PersistenceEstimate) -> Value {
    json!({
        "cutoff": e.cutoff,
        "horizon": e.horizon,
        "threshold": e.threshold,
        "tail_infima": e.tail_infima,
        "ensemble_min": e.ensemble_min,
        "persistent": e.persistent,
    })
}

pub fn decay_json(log: &DecayLog) -> Value {
    json!({
        "final_u": log.final_u,
        "checkpoints": log.checkpoints.iter().map(|(t, u)| json!([t, u])).collect::<Vec<_>>(),
        "landmarks": log.landmarks,
        "landmark_violations": log.landmark_violations,
        "worst_landmark_excess": if log.landmarks > 0 { Some(log.worst_landmark_excess) } else { None },
    })
}

pub fn miranda_json(m: &MirandaReport) -> Value {
    json!({
        "eps": m.eps,
        "R": m.r,
        "face_grid": m.face_grid,
        "holds": m.holds,
        "faces": m.faces.iter().map(|f| json!({
            "species": f.species + 1,
            "low_face_max": f.low_face_max,
            "high_face_min": f.high_face_min,
        })).collect::<Vec<_>>(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Versions {
    pub nicholson: &'static str,
    #[serde(rename = "nicholson-core")]
    pub core: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Versions { nicholson: env!("CARGO_PKG_VERSION"), core: nicholson_core::VERSION }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub command: &'a str,
    pub versions: Versions,
    pub config: String,
    pub config_sha256: &'a str,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

#[cfg(test)]
mod tests {
    use super::*;
    use nicholson_core::{integrate, HistoryFunction, IntegrateOptions, ModelSpec, PeriodicSignal, RateTerm, Species};

    #[test]
    fn csv_has_header_and_exact_digits() {
        let c = |v| PeriodicSignal::constant(v).unwrap();
        let sp = Species::new(RateTerm::linear(c(1.0)), RateTerm::zero(), vec![c(2.0)]);
        let spec = ModelSpec::new(1.0, vec![1.0], vec![sp.clone(), sp], vec![]).unwrap();
        let traj = integrate(&spec, &HistoryFunction::constant(&[0.3, 0.7]).unwrap(), 1.0, IntegrateOptions::new(0.1))
            .unwrap();
        let csv = trajectory_csv(&traj);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x1,x2"));
        assert_eq!(csv.lines().count(), traj.len() + 1);
        for (k, line) in lines.enumerate() {
            let fields: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert_eq!(fields[0], traj.times()[k]);
            assert_eq!(&fields[1..], traj.state(k));
        }
    }

    #[test]
    fn existing_outputs_need_force() {
        let dir = tempfile::tempdir().unwrap();
        let out = OutputDir::new(dir.path(), false);
        out.claim(&["a.csv".into()]).unwrap();
        out.write("a.csv", "x").unwrap();
        assert!(matches!(out.claim(&["a.csv".into()]), Err(CliError::OutputExists(_))));
        OutputDir::new(dir.path(), true).claim(&["a.csv".into()]).unwrap();
    }
}
