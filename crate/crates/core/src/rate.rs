//! Nonnegative state-dependent rates with closed-form asymptotic slopes.
//!
//! Every term is written as `value(t, x) = x · ratio(t, x)`, so the quantities
//! the persistence, dissipativity and attraction hypotheses compare (the ratio
//! near zero, near infinity, and its range over `x > 0`) are exact signal
//! evaluations rather than numerical limits.

use alloc::vec::Vec;

use crate::signal::PeriodicSignal;

#[derive(Debug, Clone, PartialEq)]
pub enum RateTerm {
    /// `s(t) · x`.
    Linear { slope: PeriodicSignal },
    /// `x · [s₀(t) + (s∞(t) − s₀(t)) · x / (1 + x)]`.
    SlopeInterp { zero: PeriodicSignal, infinity: PeriodicSignal },
    /// `q(t) · x / (1 + x)`.
    Saturating { cap: PeriodicSignal },
}

impl RateTerm {
    pub fn zero() -> Self {
        RateTerm::Linear { slope: PeriodicSignal::zero() }
    }

    pub fn linear(slope: PeriodicSignal) -> Self {
        RateTerm::Linear { slope }
    }

    pub fn slope_interp(zero: PeriodicSignal, infinity: PeriodicSignal) -> Self {
        RateTerm::SlopeInterp { zero, infinity }
    }

    pub fn saturating(cap: PeriodicSignal) -> Self {
        RateTerm::Saturating { cap }
    }

    pub fn signals(&self) -> Vec<&PeriodicSignal> {
        match self {
            RateTerm::Linear { slope } => alloc::vec![slope],
            RateTerm::SlopeInterp { zero, infinity } => alloc::vec![zero, infinity],
            RateTerm::Saturating { cap } => alloc::vec![cap],
        }
    }

    /// `value(t, x) / x` for `x > 0`, and the zero slope at `x = 0`.
    pub fn ratio(&self, t: f64, x: f64) -> f64 {
        match self {
            RateTerm::Linear { slope } => slope.value(t),
            RateTerm::SlopeInterp { zero, infinity } => {
                let s0 = zero.value(t);
                let s1 = infinity.value(t);
                let w = x / (1.0 + x);
                let (lo, hi) = if s0 <= s1 { (s0, s1) } else { (s1, s0) };
                (s0 + (s1 - s0) * w).clamp(lo, hi)
            }
            RateTerm::Saturating { cap } => cap.value(t) / (1.0 + x),
        }
    }

    pub fn value(&self, t: f64, x: f64) -> f64 {
        x * self.ratio(t, x)
    }

    /// `lim_{x→0⁺} value / x`.
    pub fn slope_zero(&self, t: f64) -> f64 {
        match self {
            RateTerm::Linear { slope } => slope.value(t),
            RateTerm::SlopeInterp { zero, .. } => zero.value(t),
            RateTerm::Saturating { cap } => cap.value(t),
        }
    }

    /// `lim_{x→∞} value / x`.
    pub fn slope_inf(&self, t: f64) -> f64 {
        match self {
            RateTerm::Linear { slope } => slope.value(t),
            RateTerm::SlopeInterp { infinity, .. } => infinity.value(t),
            RateTerm::Saturating { .. } => 0.0,
        }
    }

    /// `inf_{x>0} value / x`.
    pub fn min_slope(&self, t: f64) -> f64 {
        match self {
            RateTerm::Linear { slope } => slope.value(t),
            RateTerm::SlopeInterp { zero, infinity } => zero.value(t).min(infinity.value(t)),
            RateTerm::Saturating { .. } => 0.0,
        }
    }

    /// `sup_{x>0} value / x`.
    pub fn max_slope(&self, t: f64) -> f64 {
        match self {
            RateTerm::Linear { slope } => slope.value(t),
            RateTerm::SlopeInterp { zero, infinity } => zero.value(t).max(infinity.value(t)),
            RateTerm::Saturating { cap } => cap.value(t),
        }
    }

    /// `sup_{t, x>0} value / x` from coefficient bounds.
    pub fn slope_sup(&self) -> f64 {
        match self {
            RateTerm::Linear { slope } => slope.upper_bound(),
            RateTerm::SlopeInterp { zero, infinity } => zero.upper_bound().max(infinity.upper_bound()),
            RateTerm::Saturating { cap } => cap.upper_bound(),
        }
    }

    /// `sup_t |slope_inf(t) − slope_zero(t)|`; zero for linear terms.
    pub fn slope_gap(&self) -> f64 {
        match self {
            RateTerm::Linear { .. } => 0.0,
            RateTerm::SlopeInterp { zero, infinity } => zero.difference_bound(infinity),
            RateTerm::Saturating { cap } => cap.upper_bound(),
        }
    }

    /// Lipschitz bound in `t` shared by the zero/inf/min/max slope functions.
    pub fn slope_lipschitz(&self) -> f64 {
        self.signals().iter().map(|s| s.lipschitz()).sum()
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, RateTerm::Linear { .. })
    }
}
