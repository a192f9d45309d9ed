//! Initial data on `[−τ*, 0]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Uniformly sampled history: `nodes` points per species on `[−τ*, 0]`,
/// stored species-major (`values[i * nodes + k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryGrid {
    dim: usize,
    tau_max: f64,
    nodes: usize,
    values: Vec<f64>,
}

impl HistoryGrid {
    pub const MIN_NODES: usize = 4;

    pub fn new(dim: usize, tau_max: f64, nodes: usize, values: Vec<f64>) -> Result<Self> {
        if !(tau_max.is_finite() && tau_max > 0.0) {
            return Err(Error::InvalidParameter { name: "tau_max", value: tau_max });
        }
        if nodes < Self::MIN_NODES {
            return Err(Error::InvalidParameter { name: "history nodes", value: nodes as f64 });
        }
        if values.len() != dim * nodes {
            return Err(Error::Dimension { expected: dim * nodes, found: values.len() });
        }
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter { name: "history value", value: bad });
        }
        Ok(HistoryGrid { dim, tau_max, nodes, values })
    }

    pub fn constant(tau_max: f64, nodes: usize, state: &[f64]) -> Result<Self> {
        let values = state.iter().flat_map(|&v| core::iter::repeat_n(v, nodes)).collect();
        Self::new(state.len(), tau_max, nodes, values)
    }

    /// Samples `sample(s, out)` at every node time `s`.
    pub fn from_fn(dim: usize, tau_max: f64, nodes: usize, mut sample: impl FnMut(f64, &mut [f64])) -> Result<Self> {
        let mut values = vec![0.0; dim * nodes];
        let mut buf = vec![0.0; dim];
        for k in 0..nodes {
            let s = node_time(tau_max, nodes, k);
            sample(s, &mut buf);
            for i in 0..dim {
                values[i * nodes + k] = buf[i];
            }
        }
        Self::new(dim, tau_max, nodes, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn species(&self, i: usize) -> &[f64] {
        &self.values[i * self.nodes..(i + 1) * self.nodes]
    }

    /// Time of node `k`, from `−τ*` (k = 0) to `0` (k = nodes − 1).
    pub fn node_time(&self, k: usize) -> f64 {
        node_time(self.tau_max, self.nodes, k)
    }

    /// Value of species `i` at `s` by local four-point cubic interpolation, clamped at zero.
    fn interpolate(&self, i: usize, s: f64) -> f64 {
        let spacing = self.tau_max / (self.nodes - 1) as f64;
        let u = (s + self.tau_max) / spacing;
        let row = self.species(i);
        let last = self.nodes - 1;
        let nearest = libm::round(u);
        if libm::fabs(u - nearest) <= 1e-9 && (0.0..=last as f64).contains(&nearest) {
            return row[nearest as usize];
        }
        let cell = (libm::floor(u) as isize).clamp(0, last as isize - 1) as usize;
        let start = cell.saturating_sub(1).min(self.nodes - 4);
        let mut acc = 0.0;
        for a in 0..4 {
            let ka = start + a;
            let mut basis = 1.0;
            for b in 0..4 {
                if a != b {
                    let kb = (start + b) as f64;
                    basis *= (u - kb) / (ka as f64 - kb);
                }
            }
            acc += basis * row[ka];
        }
        acc.max(0.0)
    }
}

fn node_time(tau_max: f64, nodes: usize, k: usize) -> f64 {
    if k + 1 == nodes {
        0.0
    } else {
        -tau_max + tau_max * k as f64 / (nodes - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HistoryFunction {
    ConstantVector(Vec<f64>),
    SampledGrid(HistoryGrid),
}

impl HistoryFunction {
    pub fn constant(state: &[f64]) -> Result<Self> {
        if let Some(&bad) = state.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter { name: "history value", value: bad });
        }
        Ok(HistoryFunction::ConstantVector(state.to_vec()))
    }

    pub fn dim(&self) -> usize {
        match self {
            HistoryFunction::ConstantVector(c) => c.len(),
            HistoryFunction::SampledGrid(g) => g.dim(),
        }
    }

    /// `true` when every value is strictly positive.
    pub fn is_positive(&self) -> bool {
        match self {
            HistoryFunction::ConstantVector(c) => c.iter().all(|&v| v > 0.0),
            HistoryFunction::SampledGrid(g) => g.values().iter().all(|&v| v > 0.0),
        }
    }

    /// Writes `φ(s)` into `out`. Sampled grids reject `s` outside `[−τ*, 0]`.
    pub fn value_into(&self, s: f64, out: &mut [f64]) -> Result<()> {
        match self {
            HistoryFunction::ConstantVector(c) => {
                if s > 0.0 {
                    return Err(Error::OutOfRange { time: s, start: f64::NEG_INFINITY, end: 0.0 });
                }
                out.copy_from_slice(c);
            }
            HistoryFunction::SampledGrid(g) => {
                let slack = 1e-12 * g.tau_max.max(1.0);
                if s < -g.tau_max - slack || s > slack {
                    return Err(Error::OutOfRange { time: s, start: -g.tau_max, end: 0.0 });
                }
                let s = s.clamp(-g.tau_max, 0.0);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = g.interpolate(i, s);
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, s: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.value_into(s, &mut out)?;
        Ok(out)
    }
}
