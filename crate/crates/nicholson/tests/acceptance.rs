//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Run with `cargo test -p nicholson --test acceptance`.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nicholson::config::{CheckKind, SweepConfig, SweepParameter};
use nicholson::ensemble;
use nicholson::sweep;
use nicholson_core::analysis::{random_constant_histories, AttractionParams, PersistenceParams};
use nicholson_core::conditions::{
    check_dissipativity, check_persistence, check_zero_attractor, compute_periodic_bounds, ConditionReport,
};
use nicholson_core::periodic::{
    averaged_field, check_miranda_signs, default_nodes, find_periodic_orbit, verify_orbit_bounds, BoundsVerdict,
    OrbitOptions, MIRANDA_PANELS,
};
use nicholson_core::{
    integrate, Coupling, DelayField, Harmonic, HistoryFunction, HistoryGrid, IntegrateOptions, ModelSpec,
    PeriodicSignal, RateTerm, Result, Species,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 20_240_917;
const DELTA: f64 = 0.25;
const GRID: usize = 256;
const STEP: f64 = 0.05;
const ETA: f64 = 0.1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn constant(v: f64) -> PeriodicSignal {
    PeriodicSignal::constant(v).unwrap()
}

fn scalar(d: f64, p: f64) -> ModelSpec {
    let sp = Species::new(RateTerm::linear(constant(d)), RateTerm::zero(), vec![constant(p)]);
    ModelSpec::new(1.0, vec![1.0], vec![sp], vec![]).unwrap()
}

fn horizon(spec: &ModelSpec) -> f64 {
    200.0 * spec.period().max(spec.max_delay())
}

// ---------------------------------------------------------------------------
// random specs

/// Nonnegative signal with mean in `[lo, hi]` and one harmonic of relative amplitude below `depth`.
fn forced(rng: &mut ChaCha8Rng, period: f64, lo: f64, hi: f64, depth: f64) -> PeriodicSignal {
    let mean = rng.random_range(lo..=hi);
    if rng.random_bool(0.3) {
        return PeriodicSignal::constant(mean).unwrap();
    }
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (c, s) = (phase.cos(), phase.sin());
    let amp = rng.random_range(0.0..depth) * mean / (c.abs() + s.abs());
    let order = rng.random_range(1..=2);
    PeriodicSignal::new(period, mean, vec![Harmonic::new(order, amp * c, amp * s)]).unwrap()
}

fn signal(rng: &mut ChaCha8Rng, period: f64, lo: f64, hi: f64) -> PeriodicSignal {
    forced(rng, period, lo, hi, 0.3)
}

fn scaled(s: &PeriodicSignal, factor: f64) -> PeriodicSignal {
    let h = s.harmonics().iter().map(|h| Harmonic::new(h.order, h.cos * factor, h.sin * factor)).collect();
    PeriodicSignal::new(s.period().unwrap_or(1.0), s.mean() * factor, h).unwrap()
}

fn layout(rng: &mut ChaCha8Rng) -> (usize, f64, Vec<f64>) {
    let n = rng.random_range(1..=3);
    let period = if rng.random_bool(0.5) { 1.0 } else { 2.0 };
    let delays = match rng.random_range(0..3) {
        0 => vec![1.0],
        1 => vec![0.5],
        _ => vec![0.5, 1.0],
    };
    (n, period, delays)
}

fn mortality(rng: &mut ChaCha8Rng, period: f64, lo: f64, hi: f64, saturating: bool) -> (RateTerm, f64) {
    let kinds = if saturating { 3 } else { 2 };
    match rng.random_range(0..kinds) {
        0 => {
            let s = signal(rng, period, lo, hi);
            let floor = s.lower_bound();
            (RateTerm::linear(s), floor)
        }
        1 => {
            let a = signal(rng, period, lo, hi);
            let b = signal(rng, period, lo, hi);
            let floor = a.lower_bound().min(b.lower_bound());
            (RateTerm::slope_interp(a, b), floor)
        }
        _ => {
            let s = signal(rng, period, lo, hi);
            let floor = s.lower_bound();
            (RateTerm::saturating(s), floor)
        }
    }
}

fn couplings(rng: &mut ChaCha8Rng, n: usize, period: f64, hi: f64) -> Vec<Coupling> {
    let mut out = Vec::new();
    for target in 0..n {
        for source in 0..n {
            if target != source && rng.random_bool(0.3) {
                let term = if rng.random_bool(0.5) {
                    RateTerm::linear(signal(rng, period, 0.01, hi))
                } else {
                    RateTerm::slope_interp(signal(rng, period, 0.01, hi), signal(rng, period, 0.01, hi))
                };
                out.push(Coupling { target, source, term });
            }
        }
    }
    out
}

/// Persistent-regime spec: total production 1.5 to 6 times the mortality level.
fn persistent_spec(rng: &mut ChaCha8Rng, saturating: bool) -> ModelSpec {
    let (n, period, delays) = layout(rng);
    let species = (0..n)
        .map(|_| {
            let (d, level) = mortality(rng, period, 0.5, 1.5, saturating);
            let harvest = if rng.random_bool(0.5) {
                RateTerm::saturating(signal(rng, period, 0.0, 0.1 * level))
            } else {
                RateTerm::zero()
            };
            let total = rng.random_range(1.5..6.0) * level.max(0.3);
            let weights: Vec<f64> = delays.iter().map(|_| rng.random_range(0.2..1.0)).collect();
            let wsum: f64 = weights.iter().sum();
            let prod = weights
                .iter()
                .map(|w| {
                    let s = signal(rng, period, 1.0, 1.0);
                    scaled(&s, total * w / wsum)
                })
                .collect();
            Species::new(d, harvest, prod)
        })
        .collect();
    let links = couplings(rng, n, period, 0.2);
    ModelSpec::new(period, delays, species, links).unwrap()
}

/// Extinction-regime spec: total production below 0.9 of the mortality floor, strongly forced.
fn extinction_spec(rng: &mut ChaCha8Rng) -> ModelSpec {
    let (n, period, delays) = layout(rng);
    let species = (0..n)
        .map(|_| {
            let (d, floor) = mortality(rng, period, 1.0, 3.0, false);
            let harvest = if rng.random_bool(0.5) {
                RateTerm::saturating(signal(rng, period, 0.0, 0.2))
            } else {
                RateTerm::zero()
            };
            let total = rng.random_range(0.05..0.9) * floor;
            let k = delays.len() as f64;
            let prod = delays.iter().map(|_| scaled(&forced(rng, period, 1.0, 1.0, 0.9), total / (1.9 * k))).collect();
            Species::new(d, harvest, prod)
        })
        .collect();
    let links = couplings(rng, n, period, 0.1);
    ModelSpec::new(period, delays, species, links).unwrap()
}

fn draw<T>(count: usize, max_tries: usize, mut make: impl FnMut() -> Option<T>) -> (Vec<T>, usize) {
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < max_tries {
        tries += 1;
        if let Some(v) = make() {
            out.push(v);
        }
    }
    (out, tries)
}

struct Certified {
    spec: ModelSpec,
    persistence: ConditionReport,
    dissipativity: ConditionReport,
}

// ---------------------------------------------------------------------------
// criteria

fn terminal_error(h: f64, reference: f64) -> f64 {
    let spec = scalar(1.0, std::f64::consts::E);
    let phi = HistoryFunction::constant(&[1.1]).unwrap();
    let traj = integrate(&spec, &phi, 10.0, IntegrateOptions::new(h)).unwrap();
    (traj.final_state()[0] - reference).abs()
}

fn integrator_order() -> Outcome {
    let spec = scalar(1.0, std::f64::consts::E);
    let phi = HistoryFunction::constant(&[1.1]).unwrap();
    let reference = integrate(&spec, &phi, 10.0, IntegrateOptions::new(1.0 / 320.0)).unwrap().final_state()[0];
    let errs: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|m| terminal_error(1.0 / m, reference)).collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    let pass = ratios.iter().all(|r| (12.0..=20.0).contains(r));
    outcome(
        pass,
        format!(
            "errors {:.2e} {:.2e} {:.2e}, ratios {:.2} {:.2} (expect [12, 20])",
            errs[0], errs[1], errs[2], ratios[0], ratios[1]
        ),
    )
}

/// `x' = −x(t−1)`, not sign-constrained.
struct PureDelay;

impl DelayField for PureDelay {
    fn dim(&self) -> usize {
        1
    }

    fn delays(&self) -> &[f64] {
        &[1.0]
    }

    fn eval(&self, _t: f64, _x: &[f64], delayed: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = -delayed[0];
        Ok(())
    }

    fn nonnegative(&self) -> bool {
        false
    }
}

fn exact_dde() -> Outcome {
    let phi = HistoryFunction::constant(&[1.0]).unwrap();
    let mut worst: f64 = 0.0;
    for h in [0.25, 0.125, 0.1, 0.0625, 0.05, 0.025] {
        let traj = integrate(&PureDelay, &phi, 2.0, IntegrateOptions::new(h)).unwrap();
        let x1 = traj.query(1.0).unwrap()[0];
        let x2 = traj.query(2.0).unwrap()[0];
        worst = worst.max(x1.abs()).max((x2 + 0.5).abs());
    }
    outcome(worst <= 1e-12, format!("max error {worst:.2e} over h in {{1/4, 1/8, 1/10, 1/16, 1/20, 1/40}} (tol 1e-12)"))
}

fn equilibrium_oracle(rng: &mut ChaCha8Rng) -> Outcome {
    let pairs: Vec<(f64, f64)> = (0..5)
        .map(|_| {
            let d0 = rng.random_range(0.5..2.0);
            (d0, d0 * rng.random_range(1.5..20.0))
        })
        .collect();
    let results: Vec<std::result::Result<(f64, &'static str), String>> = pairs
        .par_iter()
        .map(|&(d0, p0)| {
            let spec = scalar(d0, p0);
            let pers = check_persistence(&spec, DELTA, GRID).map_err(|e| e.to_string())?;
            let diss = check_dissipativity(&spec, GRID).map_err(|e| e.to_string())?;
            let bounds = compute_periodic_bounds(&spec, &pers, &diss, ETA).map_err(|e| e.to_string())?;
            let nodes = default_nodes(spec.max_delay(), STEP);
            let initial = HistoryGrid::constant(spec.max_delay(), nodes, &[1.0]).unwrap();
            let res =
                find_periodic_orbit(&spec, &bounds, &initial, &OrbitOptions::new(STEP)).map_err(|e| e.to_string())?;
            let root = (p0 / d0).ln();
            let err = (res.orbit_min[0] - root).abs().max((res.orbit_max[0] - root).abs());
            Ok((err, res.method.name()))
        })
        .collect();
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for ((d0, p0), r) in pairs.iter().zip(&results) {
        match r {
            Ok((err, method)) => {
                worst = worst.max(*err);
                notes.push(format!("p0/d0={:.2}:{method}", p0 / d0));
            }
            Err(e) => {
                worst = f64::INFINITY;
                notes.push(format!("d0={d0:.3} p0={p0:.3}: {e}"));
            }
        }
    }
    outcome(worst < 1e-7, format!("max |x - ln(p0/d0)| = {worst:.2e} (tol 1e-7); {}", notes.join(", ")))
}

fn persistence_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let (specs, tries) = draw(20, 2000, || {
        let spec = persistent_spec(rng, true);
        let r = check_persistence(&spec, DELTA, GRID).ok()?;
        (r.passed() && r.margin > 0.1 && r.constants.c.unwrap_or(0.0) > 0.1).then_some((spec, r))
    });
    if specs.len() < 20 {
        return outcome(false, format!("only {} qualifying specs in {tries} draws", specs.len()));
    }
    let mut violations = 0;
    let mut trajectories = 0;
    let mut closest = f64::INFINITY;
    let mut dims = [0; 3];
    for (k, (spec, report)) in specs.iter().enumerate() {
        dims[spec.dim() - 1] += 1;
        let histories = random_constant_histories(spec.dim(), 10, 0.01, 10.0, SEED + k as u64).unwrap();
        let params = PersistenceParams::new(horizon(spec), STEP);
        match ensemble::estimate_persistence(spec, report, &histories, &params) {
            Ok((est, _)) => {
                trajectories += est.tail_infima.len();
                violations += est.tail_infima.iter().filter(|&&m| m <= est.threshold).count();
                closest = closest.min(est.ensemble_min / est.threshold);
            }
            Err(e) => return outcome(false, format!("spec {k}: {e}")),
        }
    }
    outcome(
        violations == 0,
        format!(
            "{violations} violations over {trajectories} trajectories (N=1/2/3: {}/{}/{}, {tries} draws); min tail/eps_triv = {closest:.2}",
            dims[0], dims[1], dims[2]
        ),
    )
}

fn attractor_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let (specs, tries) = draw(20, 2000, || {
        let spec = extinction_spec(rng);
        let r = check_zero_attractor(&spec, GRID, 1000, SEED).ok()?;
        r.passed().then_some((spec, r))
    });
    if specs.len() < 20 {
        return outcome(false, format!("only {} qualifying specs in {tries} draws", specs.len()));
    }
    let mut unattracted = 0;
    let mut landmarks = 0;
    let mut landmark_violations = 0;
    let mut worst_u: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for (k, (spec, report)) in specs.iter().enumerate() {
        let histories = random_constant_histories(spec.dim(), 10, 0.01, 10.0, SEED + 100 + k as u64).unwrap();
        let params = AttractionParams { horizon: horizon(spec), tol: 1e-6, step: STEP };
        match ensemble::verify_zero_attraction(spec, report, &histories, &params) {
            Ok(rep) => {
                for log in &rep.logs {
                    worst_u = worst_u.max(log.final_u);
                    unattracted += usize::from(log.final_u >= params.tol);
                    landmarks += log.landmarks;
                    landmark_violations += log.landmark_violations;
                    if log.landmarks > 0 {
                        worst_excess = worst_excess.max(log.worst_landmark_excess);
                    }
                }
            }
            Err(e) => return outcome(false, format!("spec {k}: {e}")),
        }
    }
    outcome(
        unattracted == 0 && landmark_violations == 0,
        format!(
            "{unattracted} of 200 above 1e-6 (max u(horizon) {worst_u:.2e}); {landmark_violations} of {landmarks} landmarks violate u <= 1/e + 10h (worst excess {worst_excess:.3})"
        ),
    )
}

fn certified_suite(rng: &mut ChaCha8Rng) -> (Vec<Certified>, usize) {
    draw(12, 4000, || {
        let spec = persistent_spec(rng, false);
        let persistence = check_persistence(&spec, DELTA, GRID).ok()?;
        let dissipativity = check_dissipativity(&spec, GRID).ok()?;
        let ok =
            persistence.passed() && dissipativity.passed() && persistence.margin > 0.05 && dissipativity.margin > 0.05;
        ok.then_some(Certified { spec, persistence, dissipativity })
    })
}

fn orbit_bounds(suite: &[Certified]) -> Outcome {
    let jobs: Vec<(usize, f64)> = (0..suite.len()).flat_map(|k| [0.25, 0.5, 1.0].map(|l| (k, l))).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(k, lambda)| {
            let c = &suite[k];
            let bounds = compute_periodic_bounds(&c.spec, &c.persistence, &c.dissipativity, ETA)?;
            let nodes = default_nodes(c.spec.max_delay(), STEP);
            let initial = HistoryGrid::constant(c.spec.max_delay(), nodes, &vec![1.0; c.spec.dim()])?;
            let opts = OrbitOptions { lambda, ..OrbitOptions::new(STEP) };
            let res = find_periodic_orbit(&c.spec, &bounds, &initial, &opts)?;
            let verdict = verify_orbit_bounds(&c.spec, &res, &bounds, STEP)?;
            let lo = res.orbit_min.iter().copied().fold(f64::INFINITY, f64::min) / bounds.eps0;
            let hi = res.orbit_max.iter().copied().fold(0.0, f64::max) / bounds.r0;
            Ok((verdict, lo, hi))
        })
        .collect::<Vec<Result<_>>>();
    let (mut converged, mut outside, mut warnings, mut failed) = (0, 0, 0, 0);
    let (mut min_lo, mut max_hi) = (f64::INFINITY, 0.0f64);
    for r in &results {
        match r {
            Ok((v, lo, hi)) => {
                converged += 1;
                min_lo = min_lo.min(*lo);
                max_hi = max_hi.max(*hi);
                match v {
                    BoundsVerdict::Outside => outside += 1,
                    BoundsVerdict::BoundaryWarning => warnings += 1,
                    BoundsVerdict::Inside => {}
                }
            }
            Err(e) => {
                failed += 1;
                eprintln!("orbit search: {e}");
            }
        }
    }
    outcome(
        outside == 0 && converged > 0,
        format!(
            "{outside} outside, {warnings} boundary warnings, {converged} converged / {} searches ({failed} not converged) over {} specs; min/eps0 = {min_lo:.2}, max/R0 = {max_hi:.3}",
            jobs.len(),
            suite.len()
        ),
    )
}

fn miranda(suite: &[Certified]) -> Outcome {
    let mut holds = 0;
    for c in suite {
        let bounds = compute_periodic_bounds(&c.spec, &c.persistence, &c.dissipativity, ETA).unwrap();
        if check_miranda_signs(&c.spec, bounds.eps0 / 2.0, 2.0 * bounds.r0, 9).unwrap().holds {
            holds += 1;
        }
    }
    let spec = scalar(1.0, std::f64::consts::E);
    let g01 = averaged_field(&spec, &[0.1], MIRANDA_PANELS).unwrap()[0];
    let g9 = averaged_field(&spec, &[9.0], MIRANDA_PANELS).unwrap()[0];
    let analytic = (g01 + 0.1460).abs() <= 1e-4 && (g9 - 8.9970).abs() <= 1e-4;
    let closed = (g01 - (0.1 - 0.1 * 0.9f64.exp())).abs().max((g9 - (9.0 - 9.0 * (-8.0f64).exp())).abs());
    let example = check_miranda_signs(&spec, 0.1, 9.0, 9).unwrap().holds;
    outcome(
        holds == suite.len() && !suite.is_empty() && analytic && example,
        format!(
            "signs hold for {holds}/{} certified specs; g(0.1) = {g01:.6}, g(9) = {g9:.6} (closed-form gap {closed:.1e})",
            suite.len()
        ),
    )
}

fn sweep_boundary() -> Outcome {
    let model = serde_json::to_value(nicholson::model_json::ModelDoc::from_spec(&scalar(1.0, 1.0))).unwrap();
    let config: nicholson::RunConfig = serde_json::from_value(serde_json::json!({
        "model": model,
        "step": 0.1,
        "delta": 0.01,
        "seed": SEED,
        "ensemble": {"size": 3}
    }))
    .unwrap();
    let loaded = nicholson::Loaded { spec: scalar(1.0, 1.0), model_doc: model, config, sha256: String::new() };
    let sweep_cfg = SweepConfig {
        parameters: vec![SweepParameter {
            pointer: "/species/0/production/0/mean".into(),
            start: 0.5,
            stop: 5.0,
            count: 46,
        }],
        checks: vec![CheckKind::Persistence, CheckKind::Attractor],
        simulate: true,
    };
    let histories = random_constant_histories(1, 3, 0.01, 10.0, SEED).unwrap();
    let cells = match sweep::run(&loaded, &sweep_cfg, &histories, SEED) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let last_zero =
        cells.iter().filter(|c| c.regime() == "zero-attracting").map(|c| c.values[0]).fold(f64::NAN, f64::max);
    let first_persistent =
        cells.iter().filter(|c| c.regime() == "persistent").map(|c| c.values[0]).fold(f64::NAN, f64::min);
    let ordered = cells.iter().all(|c| match c.regime() {
        "zero-attracting" => c.values[0] < 1.0,
        "persistent" => c.values[0] > 1.0,
        _ => (c.values[0] - 1.0).abs() <= 0.1 + 1e-9,
    });
    let width = 0.1 + 1e-9;
    let pass = ordered && (last_zero - 1.0).abs() <= width && (first_persistent - 1.0).abs() <= width;
    outcome(
        pass,
        format!("zero-attracting up to p = {last_zero:.2}, persistent from p = {first_persistent:.2}; cell width 0.1"),
    )
}

fn snapshot(dir: &Path, prefix: &str, out: &mut Vec<(String, Vec<u8>)>) {
    let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for p in entries {
        let name = format!("{prefix}/{}", p.file_name().unwrap().to_string_lossy());
        if p.is_dir() {
            snapshot(&p, &name, out);
        } else {
            out.push((name, fs::read(&p).unwrap()));
        }
    }
}

fn run_all(configs: &Path, out: &Path, threads: &str) -> std::result::Result<Vec<(String, Vec<u8>)>, String> {
    let plan: [(&str, &[&str]); 4] = [
        ("scalar.json", &["simulate", "check", "persistence", "periodic", "miranda"]),
        ("forced_pair.json", &["check", "persistence", "periodic", "miranda"]),
        ("extinction.json", &["check", "attractor"]),
        ("sweep.json", &["sweep"]),
    ];
    for (config, commands) in plan {
        for cmd in commands {
            let status = Command::new(env!("CARGO_BIN_EXE_nicholson"))
                .arg(cmd)
                .arg("--config")
                .arg(configs.join(config))
                .arg("--out")
                .arg(out.join(config.trim_end_matches(".json")))
                .args(["--threads", threads])
                .output()
                .map_err(|e| e.to_string())?;
            if !matches!(status.status.code(), Some(0 | 3)) {
                return Err(format!("{cmd} {config}: {}", String::from_utf8_lossy(&status.stderr)));
            }
        }
    }
    let mut files = Vec::new();
    snapshot(out, "", &mut files);
    Ok(files)
}

fn reproducibility() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (ra, rb) = match (run_all(&configs, a.path(), "1"), run_all(&configs, b.path(), "4")) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    let differing: Vec<&str> = ra.iter().zip(&rb).filter(|(x, y)| x != y).map(|(x, _)| x.0.as_str()).collect();
    let bytes: usize = ra.iter().map(|f| f.1.len()).sum();
    outcome(
        ra.len() == rb.len() && differing.is_empty(),
        format!(
            "{} artifacts ({bytes} bytes) compared across 1 and 4 threads; {} differ {:?}",
            ra.len(),
            differing.len(),
            differing
        ),
    )
}

fn main() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let certified = {
        let mut sub = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
        certified_suite(&mut sub)
    };
    type Criterion<'a> = (&'a str, Box<dyn FnOnce() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("integrator order", Box::new(integrator_order)),
        ("exact delay oracle", Box::new(exact_dde)),
        ("equilibrium oracle", Box::new(|| equilibrium_oracle(&mut ChaCha8Rng::seed_from_u64(SEED + 3)))),
        ("persistence suite", Box::new(|| persistence_suite(&mut rng))),
        ("zero-attractor suite", Box::new(|| attractor_suite(&mut ChaCha8Rng::seed_from_u64(SEED + 5)))),
        ("a priori orbit bounds", Box::new(|| orbit_bounds(&certified.0))),
        ("miranda signs", Box::new(|| miranda(&certified.0))),
        ("sweep boundary", Box::new(sweep_boundary)),
        ("reproducibility", Box::new(reproducibility)),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let o = run();
        failures += usize::from(!o.pass);
        println!(
            "{} [{}] {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("{} of 9 criteria passed in {:.1}s", 9 - failures, started.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
