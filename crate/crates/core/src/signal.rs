//! Nonnegative periodic coefficients given as finite trigonometric series.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// One term `cos * cos(2π m t / T) + sin * sin(2π m t / T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub order: u32,
    pub cos: f64,
    pub sin: f64,
}

impl Harmonic {
    pub fn new(order: u32, cos: f64, sin: f64) -> Self {
        Harmonic { order, cos, sin }
    }

    fn amplitude(&self) -> f64 {
        libm::fabs(self.cos) + libm::fabs(self.sin)
    }
}

/// A time-dependent rate `a₀ + Σ [a_m cos(2πmt/T) + b_m sin(2πmt/T)]`.
///
/// Construction rejects any series whose mean does not dominate the sum of
/// harmonic magnitudes, which is a sufficient condition for the signal to
/// stay nonnegative for every `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSignal {
    period: Option<f64>,
    mean: f64,
    harmonics: Vec<Harmonic>,
}

impl PeriodicSignal {
    /// A time-independent signal.
    pub fn constant(value: f64) -> Result<Self> {
        Self::with_harmonics(None, value, Vec::new())
    }

    pub fn zero() -> Self {
        PeriodicSignal { period: None, mean: 0.0, harmonics: Vec::new() }
    }

    /// A `period`-periodic series. An empty harmonic list yields a constant.
    pub fn new(period: f64, mean: f64, harmonics: Vec<Harmonic>) -> Result<Self> {
        Self::with_harmonics(Some(period), mean, harmonics)
    }

    fn with_harmonics(period: Option<f64>, mean: f64, harmonics: Vec<Harmonic>) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter { name: "mean", value: mean });
        }
        for h in &harmonics {
            if h.order == 0 {
                return Err(Error::InvalidParameter { name: "harmonic order", value: 0.0 });
            }
            if !h.cos.is_finite() || !h.sin.is_finite() {
                return Err(Error::InvalidParameter { name: "harmonic coefficient", value: h.cos + h.sin });
            }
        }
        let period = if harmonics.is_empty() {
            None
        } else {
            match period {
                Some(p) if p.is_finite() && p > 0.0 => Some(p),
                Some(p) => return Err(Error::InvalidParameter { name: "period", value: p }),
                None => return Err(Error::InvalidParameter { name: "period", value: f64::NAN }),
            }
        };
        let signal = PeriodicSignal { period, mean, harmonics };
        let amplitude = signal.amplitude();
        if mean - amplitude < 0.0 {
            return Err(Error::NegativeSignal { mean, amplitude });
        }
        Ok(signal)
    }

    /// `None` for constants.
    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn is_constant(&self) -> bool {
        self.harmonics.is_empty()
    }

    pub fn value(&self, t: f64) -> f64 {
        let Some(period) = self.period else {
            return self.mean;
        };
        // reduce to one period so value(t + T) == value(t) up to rounding of the reduction
        let phase = t - period * libm::floor(t / period);
        let w = 2.0 * PI * phase / period;
        let mut acc = self.mean;
        for h in &self.harmonics {
            let arg = w * h.order as f64;
            acc += h.cos * libm::cos(arg) + h.sin * libm::sin(arg);
        }
        acc
    }

    /// `Σ (|a_m| + |b_m|)`, the largest possible deviation from the mean.
    pub fn amplitude(&self) -> f64 {
        self.harmonics.iter().map(Harmonic::amplitude).sum()
    }

    /// An upper bound on `value(t)` over all `t`.
    ///
    /// Accumulates in the same order as [`value`](Self::value), so
    /// `value(t) <= upper_bound()` holds in floating point, not just in exact arithmetic.
    pub fn upper_bound(&self) -> f64 {
        let mut acc = self.mean;
        for h in &self.harmonics {
            acc += libm::fabs(h.cos) + libm::fabs(h.sin);
        }
        acc
    }

    pub fn lower_bound(&self) -> f64 {
        (self.mean - self.amplitude()).max(0.0)
    }

    /// Lipschitz constant in `t`: `Σ (2π m / T)(|a_m| + |b_m|)`.
    pub fn lipschitz(&self) -> f64 {
        match self.period {
            None => 0.0,
            Some(period) => self.harmonics.iter().map(|h| 2.0 * PI * h.order as f64 / period * h.amplitude()).sum(),
        }
    }

    /// Bound on `sup_t |self(t) - other(t)|` from merged coefficients.
    pub fn difference_bound(&self, other: &PeriodicSignal) -> f64 {
        let mut orders: Vec<u32> = self.harmonics.iter().chain(other.harmonics.iter()).map(|h| h.order).collect();
        orders.sort_unstable();
        orders.dedup();
        let coeff = |s: &PeriodicSignal, m: u32| -> (f64, f64) {
            s.harmonics.iter().filter(|h| h.order == m).fold((0.0, 0.0), |(a, b), h| (a + h.cos, b + h.sin))
        };
        let mut acc = libm::fabs(self.mean - other.mean);
        for m in orders {
            let (a1, b1) = coeff(self, m);
            let (a2, b2) = coeff(other, m);
            acc += libm::fabs(a1 - a2) + libm::fabs(b1 - b2);
        }
        acc
    }

    /// Returns a copy with the mean replaced, re-validating nonnegativity.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        Self::with_harmonics(self.period, mean, self.harmonics.clone())
    }
}
