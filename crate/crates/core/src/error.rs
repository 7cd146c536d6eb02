//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument was NaN or infinite.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// An argument was outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result (or an intermediate factor) exceeds f64 range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// v_b = v_c (or equivalent): the derivation requires the pulses to
    /// pass through each other.
    #[error("degenerate velocities: {0}")]
    DegenerateVelocities(String),

    /// Quadrature refinement hit the node-count cap before reaching the
    /// requested tolerance; carries the best estimate and the absolute
    /// difference between the last two refinement levels.
    #[error("quadrature did not converge: best estimate {best}, residual {residual:e}")]
    QuadratureAccuracy { best: Complex64, residual: f64 },

    /// A quantity that must be real (or otherwise constrained) came out
    /// violating the constraint by more than the allowed slack.
    #[error("internal consistency violation: {0}")]
    Inconsistency(String),

    /// The k-grid does not resolve the spectrum it is asked to hold.
    #[error("grid under-resolved: {0}")]
    Resolution(String),

    /// The integrator could not keep the norm drift within bounds.
    #[error("step-size failure: {0}")]
    StepSize(String),

    /// Not enough post-overlap decay to fit an exponential.
    #[error("fit window error: {0}")]
    FitWindow(String),

    /// Missing or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
