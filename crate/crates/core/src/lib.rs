//! Simulation and hypothesis certification for N-species Nicholson delay systems
//!
//! ```text
//! x_i' = −d_i(t, x_i) + Σ_{l≠i} b_{i,l}(t, x_l) + Σ_j p_{i,j}(t) f(x_i(t − τ_j)) − H_i(t, x_i)
//! ```
//!
//! with `f(y) = y e^{−y}`. The crate is `no_std` (it needs `alloc`) and covers
//! the model itself, a method-of-steps integrator, certification of the
//! persistence / dissipativity / zero-attraction hypotheses, trajectory
//! analysis through the guiding functions `min_i x_i` and `max_i x_i`, and
//! periodic-orbit search via the period map.
#![no_std]

extern crate alloc;

pub mod analysis;
pub mod conditions;
pub mod error;
pub mod history;
pub mod integrator;
pub mod model;
pub mod periodic;
pub mod rate;
pub mod signal;

pub use error::{Error, Result};
pub use history::{HistoryFunction, HistoryGrid};
pub use integrator::{integrate, DelayField, IntegrateOptions, Trajectory};
pub use model::{f, Coupling, ModelSpec, Species, INV_E};
pub use rate::RateTerm;
pub use signal::{Harmonic, PeriodicSignal};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
