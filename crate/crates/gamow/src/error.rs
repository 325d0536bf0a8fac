use thiserror::Error;

/// Library-wide error type.
///
/// Variants split into two classes: bad inputs ([`Error::InvalidParameter`],
/// [`Error::GammaPole`], [`Error::Domain`], [`Error::StripViolation`],
/// [`Error::UnsupportedShape`]) and numerical failures of an otherwise valid
/// request ([`Error::NonConvergence`], [`Error::SeriesDivergence`],
/// [`Error::QuadratureFailure`]). The CLI maps the first class to exit code 2
/// and the second to exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function pole at x = {x}")]
    GammaPole { x: f64 },

    #[error("invalid parameter: {what}")]
    InvalidParameter { what: String },

    #[error("{context}: no convergence after {terms} terms")]
    NonConvergence { context: &'static str, terms: u32 },

    #[error(
        "{context}: series diverges, term {term_index} is {ratio:.3e} times the first term"
    )]
    SeriesDivergence {
        context: &'static str,
        term_index: u32,
        ratio: f64,
    },

    #[error(
        "quadrature failed: error estimate {estimate:.3e} above target {target:.3e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureFailure {
        estimate: f64,
        target: f64,
        subdivisions: u32,
    },

    #[error("Mellin transform diverges at s = {s} (outside the convergence strip)")]
    StripViolation { s: f64 },

    #[error("unsupported G-function shape: {what}")]
    UnsupportedShape { what: String },

    #[error("domain error: {what}")]
    Domain { what: String },
}

impl Error {
    pub fn invalid(what: impl Into<String>) -> Self {
        Error::InvalidParameter { what: what.into() }
    }

    pub fn domain(what: impl Into<String>) -> Self {
        Error::Domain { what: what.into() }
    }

    /// True for errors caused by the caller's inputs rather than by a
    /// numerical limitation encountered during evaluation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::GammaPole { .. }
                | Error::InvalidParameter { .. }
                | Error::StripViolation { .. }
                | Error::UnsupportedShape { .. }
                | Error::Domain { .. }
        )
    }
}
