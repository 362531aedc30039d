use thiserror::Error;

/// Errors produced by the library.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid interval [{lo}, {hi}]: lower end must be below upper end")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("custom density integrates to {integral} over its support, expected 1")]
    NotNormalized { integral: f64 },

    #[error("{family} has no declared variance")]
    MissingVariance { family: &'static str },

    #[error("unsupported operation for {family}: {what}")]
    Unsupported {
        family: &'static str,
        what: &'static str,
    },

    #[error("no closed form for {family}")]
    NoClosedForm { family: &'static str },

    #[error("power integral ∫f^{exponent} diverges for {family}: {reason}")]
    DivergentIntegral {
        family: &'static str,
        exponent: f64,
        reason: &'static str,
    },

    #[error("series did not converge after {terms} terms (last term magnitude {last_term:e})")]
    SeriesNonConvergence { terms: usize, last_term: f64 },

    #[error(
        "catastrophic cancellation: Σ|terms| / |sum| = {ratio:e}, rounding error ≈ {rounding:e}"
    )]
    Cancellation { ratio: f64, rounding: f64 },

    #[error("quadrature did not reach tolerance {tolerance:e} within {subdivisions} subdivisions (estimated error {estimate:e})")]
    QuadratureNonConvergence {
        tolerance: f64,
        subdivisions: usize,
        estimate: f64,
    },

    #[error("integrand is not finite at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("tail of ∫f^(n+1) cannot be bounded for {family}: {reason}")]
    UnboundedTail {
        family: &'static str,
        reason: &'static str,
    },

    #[error("value overflows the scalar type ({what})")]
    Overflow { what: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("input contains NaN")]
    NanInput,
}

impl Error {
    /// True for failures of the numerics (divergence, non-convergence,
    /// overflow) as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DivergentIntegral { .. }
                | Error::SeriesNonConvergence { .. }
                | Error::Cancellation { .. }
                | Error::QuadratureNonConvergence { .. }
                | Error::NonFiniteIntegrand { .. }
                | Error::UnboundedTail { .. }
                | Error::Overflow { .. }
                | Error::NotNormalized { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
