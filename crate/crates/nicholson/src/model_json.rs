//! JSON document format for [`ModelSpec`].
//!
//! ```json
//! {"n": 1, "period": 1.0, "delays": [1.0],
//!  "species": [{"mortality": {"kind": "Linear", "slope": {"mean": 1.0}},
//!               "harvest": {"kind": "Saturating", "cap": {"mean": 0.2, "harmonics": [[1, 0.1, 0.0]]}},
//!               "production": [{"mean": 2.7}]}],
//!  "mutualism": [{"i": 1, "l": 2, "term": {"kind": "SlopeInterp", "zero": {"mean": 0.5}, "infinity": {"mean": 0.1}}}]}
//! ```
//!
//! Species indices in `mutualism` are 1-based; `i` receives the inflow from `l`.

use nicholson_core::{Coupling, Harmonic, ModelSpec, PeriodicSignal, RateTerm, Species};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalDoc {
    pub mean: f64,
    /// `[m, a_m, b_m]` triples.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub harmonics: Vec<(u32, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RateDoc {
    Linear { slope: SignalDoc },
    SlopeInterp { zero: SignalDoc, infinity: SignalDoc },
    Saturating { cap: SignalDoc },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesDoc {
    pub mortality: RateDoc,
    #[serde(default = "zero_rate")]
    pub harvest: RateDoc,
    pub production: Vec<SignalDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutualismDoc {
    pub i: usize,
    pub l: usize,
    pub term: RateDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub n: usize,
    pub period: f64,
    pub delays: Vec<f64>,
    pub species: Vec<SpeciesDoc>,
    #[serde(default)]
    pub mutualism: Vec<MutualismDoc>,
}

fn zero_rate() -> RateDoc {
    RateDoc::Linear { slope: SignalDoc { mean: 0.0, harmonics: Vec::new() } }
}

impl SignalDoc {
    fn to_signal(&self, period: f64) -> Result<PeriodicSignal, CliError> {
        let harmonics = self.harmonics.iter().map(|&(m, a, b)| Harmonic::new(m, a, b)).collect();
        Ok(PeriodicSignal::new(period, self.mean, harmonics)?)
    }

    fn from_signal(signal: &PeriodicSignal) -> Self {
        SignalDoc {
            mean: signal.mean(),
            harmonics: signal.harmonics().iter().map(|h| (h.order, h.cos, h.sin)).collect(),
        }
    }
}

impl RateDoc {
    fn to_term(&self, period: f64) -> Result<RateTerm, CliError> {
        Ok(match self {
            RateDoc::Linear { slope } => RateTerm::linear(slope.to_signal(period)?),
            RateDoc::SlopeInterp { zero, infinity } => {
                RateTerm::slope_interp(zero.to_signal(period)?, infinity.to_signal(period)?)
            }
            RateDoc::Saturating { cap } => RateTerm::saturating(cap.to_signal(period)?),
        })
    }

    fn from_term(term: &RateTerm) -> Self {
        match term {
            RateTerm::Linear { slope } => RateDoc::Linear { slope: SignalDoc::from_signal(slope) },
            RateTerm::SlopeInterp { zero, infinity } => {
                RateDoc::SlopeInterp { zero: SignalDoc::from_signal(zero), infinity: SignalDoc::from_signal(infinity) }
            }
            RateTerm::Saturating { cap } => RateDoc::Saturating { cap: SignalDoc::from_signal(cap) },
        }
    }
}

impl ModelDoc {
    pub fn to_spec(&self) -> Result<ModelSpec, CliError> {
        if self.species.len() != self.n {
            return Err(CliError::Config(format!(
                "model declares n = {} but lists {} species",
                self.n,
                self.species.len()
            )));
        }
        let period = self.period;
        let species = self
            .species
            .iter()
            .map(|sp| {
                let production = sp.production.iter().map(|p| p.to_signal(period)).collect::<Result<_, _>>()?;
                Ok(Species::new(sp.mortality.to_term(period)?, sp.harvest.to_term(period)?, production))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let couplings = self
            .mutualism
            .iter()
            .map(|m| {
                if m.i == 0 || m.l == 0 {
                    return Err(CliError::Config("mutualism indices are 1-based".into()));
                }
                Ok(Coupling { target: m.i - 1, source: m.l - 1, term: m.term.to_term(period)? })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(ModelSpec::new(period, self.delays.clone(), species, couplings)?)
    }

    pub fn from_spec(spec: &ModelSpec) -> Self {
        ModelDoc {
            n: spec.dim(),
            period: spec.period(),
            delays: spec.delays().to_vec(),
            species: spec
                .species()
                .iter()
                .map(|sp| SpeciesDoc {
                    mortality: RateDoc::from_term(&sp.mortality),
                    harvest: RateDoc::from_term(&sp.harvest),
                    production: sp.production.iter().map(SignalDoc::from_signal).collect(),
                })
                .collect(),
            mutualism: spec
                .couplings()
                .iter()
                .map(|c| MutualismDoc { i: c.target + 1, l: c.source + 1, term: RateDoc::from_term(&c.term) })
                .collect(),
        }
    }
}

pub fn parse_model(text: &str) -> Result<ModelSpec, CliError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    doc.to_spec()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALAR: &str = r#"{"n": 1, "period": 1.0, "delays": [1.0],
        "species": [{"mortality": {"kind": "Linear", "slope": {"mean": 1.0}},
                     "production": [{"mean": 2.718281828459045}]}]}"#;

    #[test]
    fn parses_minimal_scalar_model() {
        let spec = parse_model(SCALAR).unwrap();
        assert_eq!(spec.dim(), 1);
        assert_eq!(spec.delays(), &[1.0]);
        assert_eq!(spec.species()[0].harvest, RateTerm::zero());
        assert!(spec.is_autonomous());
    }

    #[test]
    fn round_trips_every_kind() {
        let text = r#"{"n": 2, "period": 2.0, "delays": [0.5, 1.0],
            "species": [
              {"mortality": {"kind": "SlopeInterp", "zero": {"mean": 1.0}, "infinity": {"mean": 2.0, "harmonics": [[1, 0.5, -0.25]]}},
               "harvest": {"kind": "Saturating", "cap": {"mean": 0.3}},
               "production": [{"mean": 1.0}, {"mean": 2.0, "harmonics": [[2, 0.1, 0.1]]}]},
              {"mortality": {"kind": "Linear", "slope": {"mean": 1.5}},
               "production": [{"mean": 0.5}, {"mean": 0.5}]}],
            "mutualism": [{"i": 1, "l": 2, "term": {"kind": "Linear", "slope": {"mean": 0.2}}}]}"#;
        let spec = parse_model(text).unwrap();
        assert!(spec.coupling(0, 1).is_some());
        assert!(spec.coupling(1, 0).is_none());
        let doc = ModelDoc::from_spec(&spec);
        let again = doc.to_spec().unwrap();
        assert_eq!(spec, again);
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(parse_model(&json).unwrap(), spec);
    }

    #[test]
    fn rejects_bad_documents() {
        let wrong_n = SCALAR.replace("\"n\": 1", "\"n\": 2");
        assert!(parse_model(&wrong_n).is_err());
        let unknown = SCALAR.replace("\"period\"", "\"periodd\"");
        assert!(parse_model(&unknown).is_err());
        let negative = SCALAR.replace("\"mean\": 1.0}", "\"mean\": 1.0, \"harmonics\": [[1, 2.0, 0.0]]}");
        assert!(parse_model(&negative).is_err());
        let zero_index = r#"{"n": 2, "period": 1.0, "delays": [1.0],
            "species": [{"mortality": {"kind": "Linear", "slope": {"mean": 1.0}}, "production": [{"mean": 1.0}]},
                        {"mortality": {"kind": "Linear", "slope": {"mean": 1.0}}, "production": [{"mean": 1.0}]}],
            "mutualism": [{"i": 0, "l": 1, "term": {"kind": "Linear", "slope": {"mean": 1.0}}}]}"#;
        assert!(parse_model(zero_index).is_err());
    }
}
