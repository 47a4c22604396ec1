//! Shared error type for every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Adaptive quadrature exhausted its subdivision budget before reaching
    /// the requested absolute tolerance.
    #[error("tolerance not met: achieved error estimate {achieved:.3e}, requested {requested:.3e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    /// An integrand returned NaN or ±∞ inside the integration window.
    #[error("integrand returned a non-finite value at {at}")]
    NonFiniteSample { at: f64 },

    /// A quadrature spec selected a scheme the called routine cannot honor.
    #[error("quadrature scheme mismatch: {routine} requires the {expected} scheme")]
    SchemeMismatch {
        routine: &'static str,
        expected: &'static str,
    },

    /// The adaptive ODE controller underflowed its step size, which signals
    /// an approach to a singularity of the vector field.
    #[error("adaptive step underflow at t = {t:.6e}")]
    StepFailure { t: f64 },

    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact-polynomial operator was given a polynomial with nonzero
    /// imaginary coefficients where real coefficients are required.
    #[error("polynomial has non-real coefficients")]
    NonRealInput,

    /// A residual formula would divide by a value too close to zero.
    #[error("denominator magnitude {value:.3e} at sample {index} is below the safe threshold")]
    DivisionNearZero { index: usize, value: f64 },

    /// A finite-difference grid is too coarse for the requested accuracy.
    #[error("grid too coarse: estimated finite-difference error {estimated:.3e} exceeds {requested:.3e}")]
    GridTooCoarse { estimated: f64, requested: f64 },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
