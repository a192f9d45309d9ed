//! Command implementations. Each returns the process exit code; reports are
//! written before a failing verdict is signalled.

use std::path::Path;

use nicholson_core::analysis::{random_constant_histories, AttractionParams, PersistenceParams};
use nicholson_core::conditions::{
    check_dissipativity, check_persistence, check_zero_attractor, compute_periodic_bounds, ConditionReport,
    PeriodicBounds,
};
use nicholson_core::periodic::{check_miranda_signs, default_nodes, period_drift, OrbitOptions};
use nicholson_core::{integrate, Error, HistoryFunction, HistoryGrid, IntegrateOptions};
use serde_json::{json, Value};

use crate::config::{CheckKind, Loaded};
use crate::ensemble;
use crate::error::{CliError, EXIT_NONCONVERGENCE, EXIT_OK, EXIT_POSITIVITY, EXIT_VERDICT};
use crate::output::{self, Manifest, OutputDir, Versions};
use crate::sweep;

pub struct Context<'a> {
    pub loaded: &'a Loaded,
    pub config_path: &'a Path,
    pub out: &'a OutputDir,
    pub seed: u64,
}

impl Context<'_> {
    fn manifest(&self, command: &str, outputs: &[String], exit_code: i32) -> Result<(), CliError> {
        let config = self.config_path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let manifest = Manifest {
            command,
            versions: Versions::current(),
            config,
            config_sha256: &self.loaded.sha256,
            seed: self.seed,
            outputs: outputs.to_vec(),
            exit_code,
        };
        self.out.write_json(&manifest_name(command), &manifest)
    }

    fn claim(&self, command: &str, names: &mut Vec<String>) -> Result<(), CliError> {
        names.push(manifest_name(command));
        self.out.claim(names)?;
        names.pop();
        Ok(())
    }

    fn histories(&self) -> Result<Vec<HistoryFunction>, CliError> {
        let e = &self.loaded.config.ensemble;
        Ok(random_constant_histories(self.loaded.spec.dim(), e.size, e.low, e.high, self.seed)?)
    }
}

pub fn manifest_name(command: &str) -> String {
    format!("{command}_manifest.json")
}

fn verdict_code(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_VERDICT
    }
}

pub fn simulate(ctx: &Context) -> Result<i32, CliError> {
    let cfg = &ctx.loaded.config;
    let spec = &ctx.loaded.spec;
    let state = cfg.history.clone().unwrap_or_else(|| vec![1.0; spec.dim()]);
    if state.len() != spec.dim() {
        return Err(CliError::Config(format!("history has {} entries, model has {} species", state.len(), spec.dim())));
    }
    let history = HistoryFunction::constant(&state)?;
    nicholson_core::integrator::check_step(spec.delays(), cfg.step_for(spec))?;
    let mut names = vec!["trajectory.csv".to_string()];
    ctx.claim("simulate", &mut names)?;
    let opts = IntegrateOptions::new(cfg.step_for(spec)).with_lambda(cfg.lambda);
    match integrate(spec, &history, cfg.horizon_for(spec), opts) {
        Ok(traj) => {
            ctx.out.write("trajectory.csv", &output::trajectory_csv(&traj))?;
            ctx.manifest("simulate", &names, EXIT_OK)?;
            Ok(EXIT_OK)
        }
        Err(e @ Error::Positivity { .. }) => {
            ctx.manifest("simulate", &[], EXIT_POSITIVITY)?;
            Err(e.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn run_check(ctx: &Context, kind: CheckKind) -> Result<ConditionReport, CliError> {
    let cfg = &ctx.loaded.config;
    let spec = &ctx.loaded.spec;
    Ok(match kind {
        CheckKind::Persistence => check_persistence(spec, cfg.delta, cfg.grid)?,
        CheckKind::Dissipativity => check_dissipativity(spec, cfg.grid)?,
        CheckKind::Attractor => check_zero_attractor(spec, cfg.grid, cfg.spot_samples, ctx.seed)?,
    })
}

pub fn check(ctx: &Context) -> Result<i32, CliError> {
    let mut names = vec!["check.json".to_string()];
    ctx.claim("check", &mut names)?;
    let reports = ctx.loaded.config.checks.iter().map(|&k| run_check(ctx, k)).collect::<Result<Vec<_>, _>>()?;
    let all = reports.iter().all(ConditionReport::passed);
    let doc = json!({
        "pass": all,
        "reports": reports.iter().map(output::report_json).collect::<Vec<_>>(),
    });
    ctx.out.write_json("check.json", &doc)?;
    let code = verdict_code(all);
    ctx.manifest("check", &names, code)?;
    Ok(code)
}

pub fn persistence(ctx: &Context) -> Result<i32, CliError> {
    let cfg = &ctx.loaded.config;
    let spec = &ctx.loaded.spec;
    let size = cfg.ensemble.size;
    let mut names = vec!["persistence.json".to_string()];
    names.extend((0..size).map(|k| format!("guiding_{k:03}.csv")));
    ctx.claim("persistence", &mut names)?;

    let report = check_persistence(spec, cfg.delta, cfg.grid)?;
    if !report.passed() {
        let doc = json!({"report": output::report_json(&report), "estimate": Value::Null});
        ctx.out.write_json("persistence.json", &doc)?;
        ctx.manifest("persistence", &names[..1], EXIT_VERDICT)?;
        return Ok(EXIT_VERDICT);
    }
    let params = PersistenceParams {
        horizon: cfg.horizon_for(spec),
        transient: cfg.transient,
        step: cfg.step_for(spec),
        lambda: cfg.lambda,
    };
    let histories = ctx.histories()?;
    let (estimate, series) = match ensemble::estimate_persistence(spec, &report, &histories, &params) {
        Ok(v) => v,
        Err(e @ Error::Positivity { .. }) => {
            ctx.manifest("persistence", &[], EXIT_POSITIVITY)?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    for (k, s) in series.iter().enumerate() {
        ctx.out.write(&format!("guiding_{k:03}.csv"), &output::guiding_csv(s))?;
    }
    let doc = json!({
        "report": output::report_json(&report),
        "estimate": output::persistence_json(&estimate),
    });
    ctx.out.write_json("persistence.json", &doc)?;
    let code = verdict_code(estimate.persistent);
    ctx.manifest("persistence", &names, code)?;
    Ok(code)
}

pub fn attractor(ctx: &Context) -> Result<i32, CliError> {
    let cfg = &ctx.loaded.config;
    let spec = &ctx.loaded.spec;
    let size = cfg.ensemble.size;
    let mut names = vec!["attractor.json".to_string()];
    names.extend((0..size).map(|k| format!("decay_{k:03}.csv")));
    ctx.claim("attractor", &mut names)?;

    let report = check_zero_attractor(spec, cfg.grid, cfg.spot_samples, ctx.seed)?;
    if !report.passed() {
        let doc = json!({"report": output::report_json(&report), "members": Value::Null});
        ctx.out.write_json("attractor.json", &doc)?;
        ctx.manifest("attractor", &names[..1], EXIT_VERDICT)?;
        return Ok(EXIT_VERDICT);
    }
    let params = AttractionParams { horizon: cfg.horizon_for(spec), tol: cfg.attraction_tol, step: cfg.step_for(spec) };
    let histories = ctx.histories()?;
    let result = match ensemble::verify_zero_attraction(spec, &report, &histories, &params) {
        Ok(r) => r,
        Err(e @ Error::Positivity { .. }) => {
            ctx.manifest("attractor", &[], EXIT_POSITIVITY)?;
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    for (k, log) in result.logs.iter().enumerate() {
        ctx.out.write(&format!("decay_{k:03}.csv"), &output::guiding_csv(&log.series))?;
    }
    let doc = json!({
        "report": output::report_json(&report),
        "tol": params.tol,
        "attracted": result.attracted,
        "landmarks_hold": result.landmarks_hold,
        "members": result.logs.iter().map(output::decay_json).collect::<Vec<_>>(),
    });
    ctx.out.write_json("attractor.json", &doc)?;
    let code = verdict_code(result.attracted && result.landmarks_hold);
    ctx.manifest("attractor", &names, code)?;
    Ok(code)
}

/// Persistence and dissipativity reports, and the bounds when both pass.
fn certify(ctx: &Context) -> Result<(ConditionReport, ConditionReport, Option<PeriodicBounds>), CliError> {
    let cfg = &ctx.loaded.config;
    let spec = &ctx.loaded.spec;
    let pers = check_persistence(spec, cfg.delta, cfg.grid)?;
    let diss = check_dissipativity(spec, cfg.grid)?;
    let bounds = match compute_periodic_bounds(spec, &pers, &diss, cfg.eta) {
        Ok(b) => Some(b),
        Err(Error::Precondition(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok((pers, diss, bounds))
}

pub fn periodic(ctx: &Context) -> Result<i32, CliError> {
    let cfg = &ctx.loaded.config;
    let spec = &ctx.loaded.spec;
    let jobs = cfg.orbit.lambdas.len() * cfg.orbit.initial.len();
    let mut names = vec!["periodic.json".to_string()];
    names.extend((0..jobs).map(|k| format!("orbit_{k:03}.csv")));
    ctx.claim("periodic", &mut names)?;

    let (pers, diss, bounds) = certify(ctx)?;
    let reports = vec![output::report_json(&pers), output::report_json(&diss)];
    let Some(bounds) = bounds else {
        let doc = json!({"reports": reports, "bounds": Value::Null, "orbits": []});
        ctx.out.write_json("periodic.json", &doc)?;
        ctx.manifest("periodic", &names[..1], EXIT_VERDICT)?;
        return Ok(EXIT_VERDICT);
    };

    let step = cfg.step_for(spec);
    let nodes = cfg.orbit.nodes.unwrap_or_else(|| default_nodes(spec.max_delay(), step));
    let initial = cfg
        .orbit
        .initial
        .iter()
        .map(|&level| HistoryGrid::constant(spec.max_delay(), nodes, &vec![level; spec.dim()]))
        .collect::<Result<Vec<_>, _>>()?;
    let options =
        OrbitOptions { step, tol: cfg.orbit.tol, max_iter: cfg.orbit.max_iter, lambda: 1.0, theta: cfg.orbit.theta };
    let results = ensemble::orbit_searches(spec, &bounds, &initial, &cfg.orbit.lambdas, &options);

    let mut orbits = Vec::new();
    let mut written = vec![names[0].clone()];
    let mut all_ok = true;
    let mut stalled = false;
    for (k, res) in results.into_iter().enumerate() {
        let lambda = cfg.orbit.lambdas[k / cfg.orbit.initial.len()];
        let level = cfg.orbit.initial[k % cfg.orbit.initial.len()];
        match res {
            Ok(orbit) => {
                let drift = period_drift(spec, &orbit.grid, step, orbit.lambda, 5)?;
                let mut entry = output::orbit_json(&orbit, options.tol, drift);
                entry["initial"] = json!(level);
                all_ok &= orbit.success(options.tol) && orbit.bounds.holds();
                let name = format!("orbit_{k:03}.csv");
                ctx.out.write(&name, &output::orbit_csv(&orbit))?;
                written.push(name);
                orbits.push(entry);
            }
            Err(Error::NonConvergence { best_residual, iterations }) => {
                stalled = true;
                orbits.push(json!({
                    "lambda": lambda,
                    "initial": level,
                    "converged": false,
                    "best_residual": best_residual,
                    "iterations": iterations,
                }));
            }
            Err(e @ Error::Positivity { .. }) => {
                ctx.manifest("periodic", &[], EXIT_POSITIVITY)?;
                return Err(e.into());
            }
            Err(e) => return Err(e.into()),
        }
    }
    let doc = json!({"reports": reports, "bounds": output::bounds_json(&bounds), "orbits": orbits});
    ctx.out.write_json("periodic.json", &doc)?;
    let code = if stalled { EXIT_NONCONVERGENCE } else { verdict_code(all_ok) };
    ctx.manifest("periodic", &written, code)?;
    Ok(code)
}

pub fn miranda(ctx: &Context) -> Result<i32, CliError> {
    let cfg = &ctx.loaded.config;
    let mut names = vec!["miranda.json".to_string()];
    ctx.claim("miranda", &mut names)?;
    let (pers, diss, bounds) = certify(ctx)?;
    let reports = vec![output::report_json(&pers), output::report_json(&diss)];
    let eps = cfg.miranda.eps.or(bounds.map(|b| b.eps0 / 2.0));
    let r = cfg.miranda.r.or(bounds.map(|b| 2.0 * b.r0));
    let (Some(eps), Some(r)) = (eps, r) else {
        let doc = json!({"reports": reports, "bounds": Value::Null, "miranda": Value::Null});
        ctx.out.write_json("miranda.json", &doc)?;
        ctx.manifest("miranda", &names, EXIT_VERDICT)?;
        return Ok(EXIT_VERDICT);
    };
    let report = check_miranda_signs(&ctx.loaded.spec, eps, r, cfg.miranda.face_grid)?;
    let doc = json!({
        "reports": reports,
        "bounds": bounds.as_ref().map(output::bounds_json),
        "miranda": output::miranda_json(&report),
    });
    ctx.out.write_json("miranda.json", &doc)?;
    let code = verdict_code(report.holds);
    ctx.manifest("miranda", &names, code)?;
    Ok(code)
}

pub fn sweep(ctx: &Context) -> Result<i32, CliError> {
    let Some(sweep_cfg) = &ctx.loaded.config.sweep else {
        return Err(CliError::Config("sweep requires a \"sweep\" section".into()));
    };
    // validate ranges and cell models before touching the output directory
    sweep::cells(&ctx.loaded.model_doc, sweep_cfg)?;
    let mut names = vec!["atlas.csv".to_string()];
    ctx.claim("sweep", &mut names)?;
    let histories = ctx.histories()?;
    let results = sweep::run(ctx.loaded, sweep_cfg, &histories, ctx.seed)?;
    ctx.out.write("atlas.csv", &sweep::atlas_csv(sweep_cfg, &results))?;
    let code = if results.iter().any(|r| r.positivity_failure) { EXIT_POSITIVITY } else { EXIT_OK };
    ctx.manifest("sweep", &names, code)?;
    Ok(code)
}
