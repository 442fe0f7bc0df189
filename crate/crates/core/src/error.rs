use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the supported domain.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// A series or quadrature hit its hard cap without certifying the tolerance.
    #[error("{func} did not converge after {terms} terms (tail estimate {tail_bound:e})")]
    NonConvergence {
        func: &'static str,
        terms: usize,
        tail_bound: f64,
    },

    /// A value's logarithm exceeds the representable range.
    #[error("overflow in {func}: log-magnitude {log_value}")]
    Overflow { func: &'static str, log_value: f64 },

    /// A closed form that must be real came out with a significant imaginary part.
    #[error("identity violation in {func}: imaginary residue {residue:e} exceeds {allowed:e}")]
    IdentityViolation {
        func: &'static str,
        residue: f64,
        allowed: f64,
    },

    /// Invalid user-supplied configuration.
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// True for failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Overflow { .. } | Error::IdentityViolation { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
