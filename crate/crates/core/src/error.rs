use alloc::string::String;
use core::fmt;

/// Errors produced anywhere in the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A periodic signal can go negative (mean minus total harmonic amplitude is below zero).
    NegativeSignal { mean: f64, amplitude: f64 },
    /// A numeric parameter is non-finite or outside its admissible range.
    InvalidParameter { name: &'static str, value: f64 },
    /// The model description is structurally inconsistent.
    InvalidModel(String),
    /// A state or delayed-state component handed to the right-hand side is negative.
    Domain { component: usize, value: f64 },
    /// The step does not divide a delay (method-of-steps alignment).
    MisalignedStep { delay_index: usize, delay: f64, step: f64 },
    /// Repeated step halving could not keep the solution nonnegative.
    Positivity { time: f64, component: usize },
    /// The integrator produced a NaN or infinity.
    NonFinite { time: f64 },
    /// A query fell outside the covered time range.
    OutOfRange { time: f64, start: f64, end: f64 },
    /// Array shapes do not match the model dimension.
    Dimension { expected: usize, found: usize },
    /// An operation was called without its hypotheses holding.
    Precondition(String),
    /// Orbit search ran out of iterations.
    NonConvergence { best_residual: f64, iterations: usize },
    /// A linear solve hit a singular matrix.
    Singular,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NegativeSignal { mean, amplitude } => {
                write!(f, "signal may become negative: mean {mean} is below harmonic amplitude {amplitude}")
            }
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid value {value} for parameter `{name}`")
            }
            Error::InvalidModel(msg) => write!(f, "invalid model: {msg}"),
            Error::Domain { component, value } => {
                write!(f, "negative state component {value} at index {component}")
            }
            Error::MisalignedStep { delay_index, delay, step } => {
                write!(f, "step {step} does not divide delay #{} (tau = {delay})", delay_index + 1)
            }
            Error::Positivity { time, component } => {
                write!(f, "positivity failure at t = {time} in component x{}", component + 1)
            }
            Error::NonFinite { time } => write!(f, "non-finite state at t = {time}"),
            Error::OutOfRange { time, start, end } => {
                write!(f, "time {time} outside covered range [{start}, {end}]")
            }
            Error::Dimension { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Precondition(msg) => write!(f, "precondition failed: {msg}"),
            Error::NonConvergence { best_residual, iterations } => {
                write!(f, "no convergence after {iterations} iterations (best residual {best_residual:e})")
            }
            Error::Singular => write!(f, "singular linear system"),
        }
    }
}

impl core::error::Error for Error {}
