//! The N-species Nicholson delay system with mortality, mutualism,
//! delayed production and harvesting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rate::RateTerm;
use crate::signal::PeriodicSignal;

/// `1/e`, the global maximum of [`f`].
pub const INV_E: f64 = 0.367_879_441_171_442_33;

/// Birth nonlinearity `y · e^{−y}`.
pub fn f(y: f64) -> f64 {
    (y * libm::exp(-y)).min(INV_E)
}

/// Per-species coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub mortality: RateTerm,
    pub harvest: RateTerm,
    /// One production rate per delay, in delay order.
    pub production: Vec<PeriodicSignal>,
}

impl Species {
    pub fn new(mortality: RateTerm, harvest: RateTerm, production: Vec<PeriodicSignal>) -> Self {
        Species { mortality, harvest, production }
    }

    /// `G(t, x) / x` where `G = d + H`.
    pub fn loss_ratio(&self, t: f64, x: f64) -> f64 {
        self.mortality.ratio(t, x) + self.harvest.ratio(t, x)
    }

    /// `G(t, x) = d(t, x) + H(t, x)`.
    pub fn loss(&self, t: f64, x: f64) -> f64 {
        x * self.loss_ratio(t, x)
    }

    /// `G⁰(t)`.
    pub fn loss_slope_zero(&self, t: f64) -> f64 {
        self.mortality.slope_zero(t) + self.harvest.slope_zero(t)
    }

    /// `G_∞(t)`.
    pub fn loss_slope_inf(&self, t: f64) -> f64 {
        self.mortality.slope_inf(t) + self.harvest.slope_inf(t)
    }

    /// Lower bound of `G(t, x) / x` over `x > 0`.
    pub fn loss_min_slope(&self, t: f64) -> f64 {
        self.mortality.min_slope(t) + self.harvest.min_slope(t)
    }

    pub fn loss_slope_sup(&self) -> f64 {
        self.mortality.slope_sup() + self.harvest.slope_sup()
    }

    pub fn loss_lipschitz(&self) -> f64 {
        self.mortality.slope_lipschitz() + self.harvest.slope_lipschitz()
    }

    /// `Σ_j p_j(t)`.
    pub fn total_production(&self, t: f64) -> f64 {
        self.production.iter().map(|p| p.value(t)).sum()
    }

    pub fn production_upper_bound(&self) -> f64 {
        self.production.iter().map(PeriodicSignal::upper_bound).sum()
    }

    pub fn production_lipschitz(&self) -> f64 {
        self.production.iter().map(PeriodicSignal::lipschitz).sum()
    }
}

/// Mutualism term `b_{i,l}(t, x_l)` feeding species `target` from species `source`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub target: usize,
    pub source: usize,
    pub term: RateTerm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    period: f64,
    delays: Vec<f64>,
    species: Vec<Species>,
    couplings: Vec<Coupling>,
    // n×n lookup into `couplings`, row = target
    coupling_index: Vec<Option<usize>>,
}

impl ModelSpec {
    /// Validates and assembles a model. Indices in `couplings` are zero-based.
    pub fn new(period: f64, delays: Vec<f64>, species: Vec<Species>, couplings: Vec<Coupling>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidParameter { name: "period", value: period });
        }
        if delays.is_empty() {
            return Err(Error::InvalidModel("at least one delay is required".into()));
        }
        for &tau in &delays {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(Error::InvalidParameter { name: "delay", value: tau });
            }
        }
        let n = species.len();
        if n == 0 {
            return Err(Error::InvalidModel("at least one species is required".into()));
        }
        let period_ok = |s: &PeriodicSignal| match s.period() {
            None => true,
            Some(p) => libm::fabs(p - period) <= 1e-12 * period,
        };
        for (i, sp) in species.iter().enumerate() {
            if sp.production.len() != delays.len() {
                return Err(Error::InvalidModel(format!(
                    "species {} has {} production rates for {} delays",
                    i + 1,
                    sp.production.len(),
                    delays.len()
                )));
            }
            let signals = sp.mortality.signals().into_iter().chain(sp.harvest.signals()).chain(sp.production.iter());
            for s in signals {
                if !period_ok(s) {
                    return Err(Error::InvalidModel(format!(
                        "species {} has a coefficient whose period differs from {period}",
                        i + 1
                    )));
                }
            }
        }
        let mut coupling_index = vec![None; n * n];
        for (k, c) in couplings.iter().enumerate() {
            if c.target >= n || c.source >= n || c.target == c.source {
                return Err(Error::InvalidModel(format!(
                    "invalid mutualism pair ({}, {})",
                    c.target + 1,
                    c.source + 1
                )));
            }
            let slot = &mut coupling_index[c.target * n + c.source];
            if slot.is_some() {
                return Err(Error::InvalidModel(format!(
                    "duplicate mutualism pair ({}, {})",
                    c.target + 1,
                    c.source + 1
                )));
            }
            if !c.term.signals().into_iter().all(period_ok) {
                return Err(Error::InvalidModel(format!(
                    "mutualism ({}, {}) has a coefficient whose period differs from {period}",
                    c.target + 1,
                    c.source + 1
                )));
            }
            *slot = Some(k);
        }
        Ok(ModelSpec { period, delays, species, couplings, coupling_index })
    }

    pub fn dim(&self) -> usize {
        self.species.len()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    /// `τ* = max_j τ_j`.
    pub fn max_delay(&self) -> f64 {
        self.delays.iter().copied().fold(0.0, f64::max)
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn coupling(&self, target: usize, source: usize) -> Option<&RateTerm> {
        let n = self.dim();
        self.coupling_index[target * n + source].map(|k| &self.couplings[k].term)
    }

    /// Mutualism terms feeding `target`, as `(source, term)`.
    pub fn inflows(&self, target: usize) -> impl Iterator<Item = (usize, &RateTerm)> + '_ {
        let n = self.dim();
        (0..n).filter_map(move |l| self.coupling(target, l).map(|term| (l, term)))
    }

    pub fn is_autonomous(&self) -> bool {
        let species_const = self.species.iter().all(|sp| {
            sp.mortality.signals().iter().all(|s| s.is_constant())
                && sp.harvest.signals().iter().all(|s| s.is_constant())
                && sp.production.iter().all(PeriodicSignal::is_constant)
        });
        species_const && self.couplings.iter().all(|c| c.term.signals().iter().all(|s| s.is_constant()))
    }

    /// All rate terms (mortality, harvest, mutualism).
    pub fn rate_terms(&self) -> impl Iterator<Item = &RateTerm> + '_ {
        self.species.iter().flat_map(|sp| [&sp.mortality, &sp.harvest]).chain(self.couplings.iter().map(|c| &c.term))
    }

    /// Right-hand side of the system.
    ///
    /// `delayed` is `k × N` row-major: `delayed[j * N + i] = x_i(t − τ_j)`.
    pub fn evaluate_rhs(&self, t: f64, x: &[f64], delayed: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.dim();
        let k = self.delays.len();
        if x.len() != n || out.len() != n {
            return Err(Error::Dimension { expected: n, found: x.len().min(out.len()) });
        }
        if delayed.len() != n * k {
            return Err(Error::Dimension { expected: n * k, found: delayed.len() });
        }
        for (component, &value) in x.iter().chain(delayed.iter()).enumerate() {
            if value < 0.0 || value.is_nan() {
                return Err(Error::Domain { component: component % n, value });
            }
        }
        for (i, sp) in self.species.iter().enumerate() {
            let mut acc = -sp.loss(t, x[i]);
            for (l, term) in self.inflows(i) {
                acc += term.value(t, x[l]);
            }
            for (j, p) in sp.production.iter().enumerate() {
                acc += p.value(t) * f(delayed[j * n + i]);
            }
            out[i] = acc;
        }
        Ok(())
    }

    pub fn rhs(&self, t: f64, x: &[f64], delayed: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.evaluate_rhs(t, x, delayed, &mut out)?;
        Ok(out)
    }

    /// `k₀` with `G_i(t, x) ≤ k₀ x` for every species, time and state.
    pub fn slope_upper_bound(&self) -> f64 {
        self.species.iter().map(Species::loss_slope_sup).fold(0.0, f64::max)
    }

    /// `p* = max_i sup_t Σ_j p_{i,j}(t)` via coefficient bounds.
    pub fn production_peak(&self) -> f64 {
        self.species.iter().map(Species::production_upper_bound).fold(0.0, f64::max)
    }

    /// Largest `sup_t |s∞ − s₀|` over all rate terms.
    pub fn max_slope_gap(&self) -> f64 {
        self.rate_terms().map(RateTerm::slope_gap).fold(0.0, f64::max)
    }

    /// Copy with production signal `(species, delay)` replaced.
    pub fn with_production(&self, species: usize, delay: usize, signal: PeriodicSignal) -> Result<Self> {
        let mut all = self.species.clone();
        let slot = all
            .get_mut(species)
            .and_then(|sp| sp.production.get_mut(delay))
            .ok_or_else(|| Error::InvalidModel(format!("no production rate ({species}, {delay})")))?;
        *slot = signal;
        ModelSpec::new(self.period, self.delays.clone(), all, self.couplings.clone())
    }
}
