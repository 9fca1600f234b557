use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("{what}: pole at {value}")]
    Pole { what: &'static str, value: f64 },

    #[error("{what}: result overflows double precision")]
    Overflow { what: &'static str },

    #[error("{what}: no convergence after {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: integrand returned a non-finite value at {at}")]
    NonFinite { what: &'static str, at: f64 },

    #[error(
        "closed form at y = {y} exceeds the cancellation limit y <= {limit}; \
         use the asymptotic or quadrature route"
    )]
    Cancellation { y: f64, limit: f64 },
}

impl Error {
    /// True for failures caused by a numerical method rather than by the
    /// caller's parameters.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::NonConvergence { .. }
                | Error::NonFinite { .. }
                | Error::Cancellation { .. }
        )
    }
}
