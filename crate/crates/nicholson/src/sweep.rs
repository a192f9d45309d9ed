//! Parameter atlas over one or two model coefficients.

use nicholson_core::analysis::{decay_log, tail_infimum, AttractionParams, PersistenceParams};
use nicholson_core::conditions::{check_persistence, check_zero_attractor, ConditionReport};
use nicholson_core::{Error, HistoryFunction, ModelSpec};
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{spec_from_value, CheckKind, Loaded, SweepConfig};
use crate::error::CliError;
use crate::output::{num, verdict_name};

#[derive(Debug, Clone)]
pub struct Cell {
    pub values: Vec<f64>,
    pub spec: ModelSpec,
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub values: Vec<f64>,
    pub persistence: Option<ConditionReport>,
    pub attractor: Option<ConditionReport>,
    pub tail_infimum: Option<f64>,
    pub u_horizon: Option<f64>,
    pub positivity_failure: bool,
}

impl CellResult {
    pub fn regime(&self) -> &'static str {
        let p = self.persistence.as_ref().is_some_and(|r| r.passed());
        let a = self.attractor.as_ref().is_some_and(|r| r.passed());
        match (p, a) {
            (true, true) => "both",
            (true, false) => "persistent",
            (false, true) => "zero-attracting",
            (false, false) => "undetermined",
        }
    }
}

/// Expands the parameter grid (first parameter slowest) and builds every cell's model.
pub fn cells(model_doc: &Value, sweep: &SweepConfig) -> Result<Vec<Cell>, CliError> {
    if sweep.parameters.is_empty() || sweep.parameters.len() > 2 {
        return Err(CliError::Config("a sweep takes one or two parameters".into()));
    }
    let axes = sweep.parameters.iter().map(|p| p.values()).collect::<Result<Vec<_>, _>>()?;
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in &axes {
        points = points.into_iter().flat_map(|p| axis.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    points
        .into_iter()
        .map(|values| {
            let mut doc = model_doc.clone();
            for (param, &v) in sweep.parameters.iter().zip(&values) {
                let slot = doc.pointer_mut(&param.pointer).filter(|s| s.is_number()).ok_or_else(|| {
                    CliError::Config(format!("{} does not name a number in the model", param.pointer))
                })?;
                *slot = Value::from(v);
            }
            Ok(Cell { spec: spec_from_value(&doc)?, values })
        })
        .collect()
}

fn run_cell(
    cell: &Cell,
    loaded: &Loaded,
    sweep: &SweepConfig,
    histories: &[HistoryFunction],
    seed: u64,
) -> Result<CellResult, CliError> {
    let cfg = &loaded.config;
    let spec = &cell.spec;
    let persistence = if sweep.checks.contains(&CheckKind::Persistence) {
        Some(check_persistence(spec, cfg.delta, cfg.grid)?)
    } else {
        None
    };
    let attractor = if sweep.checks.contains(&CheckKind::Attractor) {
        Some(check_zero_attractor(spec, cfg.grid, cfg.spot_samples, seed)?)
    } else {
        None
    };
    let mut result = CellResult {
        values: cell.values.clone(),
        persistence,
        attractor,
        tail_infimum: None,
        u_horizon: None,
        positivity_failure: false,
    };
    if sweep.simulate {
        let horizon = cfg.horizon_for(spec);
        let step = cfg.step_for(spec);
        let pparams = PersistenceParams { horizon, transient: cfg.transient, step, lambda: cfg.lambda };
        let aparams = AttractionParams { horizon, tol: cfg.attraction_tol, step };
        let mut tail = f64::INFINITY;
        let mut top: f64 = 0.0;
        for h in histories {
            let outcome = tail_infimum(spec, h, &pparams).and_then(|m| Ok((m, decay_log(spec, h, &aparams)?.final_u)));
            match outcome {
                Ok((m, u)) => {
                    tail = tail.min(m);
                    top = top.max(u);
                }
                Err(Error::Positivity { .. }) => {
                    result.positivity_failure = true;
                    return Ok(result);
                }
                Err(e) => return Err(e.into()),
            }
        }
        result.tail_infimum = Some(tail);
        result.u_horizon = Some(top);
    }
    Ok(result)
}

pub fn run(
    loaded: &Loaded,
    sweep: &SweepConfig,
    histories: &[HistoryFunction],
    seed: u64,
) -> Result<Vec<CellResult>, CliError> {
    let cells = cells(&loaded.model_doc, sweep)?;
    let results: Vec<Result<CellResult, CliError>> =
        cells.par_iter().map(|c| run_cell(c, loaded, sweep, histories, seed)).collect();
    results.into_iter().collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn atlas_csv(sweep: &SweepConfig, results: &[CellResult]) -> String {
    let mut out = String::new();
    for p in &sweep.parameters {
        out.push_str(&p.pointer);
        out.push(',');
    }
    out.push_str(
        "persistence_margin,persistence_verdict,attractor_margin,attractor_verdict,regime,tail_infimum,u_horizon,status\n",
    );
    for r in results {
        let mut fields: Vec<String> = r.values.iter().map(|&v| num(v)).collect();
        for rep in [&r.persistence, &r.attractor] {
            fields.push(opt(rep.as_ref().map(|x| x.margin)));
            fields.push(rep.as_ref().map(|x| verdict_name(x.verdict)).unwrap_or_default().to_string());
        }
        fields.push(r.regime().to_string());
        fields.push(opt(r.tail_infimum));
        fields.push(opt(r.u_horizon));
        fields.push(if r.positivity_failure { "positivity-failure" } else { "ok" }.to_string());
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
