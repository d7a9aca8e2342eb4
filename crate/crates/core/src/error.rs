use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("evaluation at x = 0 is undefined for Laurent normal forms")]
    ZeroParameter,

    #[error("parameter must satisfy |x| > 1, got |x| = {0}")]
    InsideUnitDisk(f64),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("resource limit: {what} would need about {estimate} elements (limit {limit})")]
    ResourceLimit {
        what: &'static str,
        estimate: f64,
        limit: f64,
    },

    #[error("the zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("root finder did not converge after {iterations} iterations")]
    RootsNotConverged {
        iterations: usize,
        /// Best approximations as `(re, im)` pairs.
        partial: Vec<(f64, f64)>,
    },

    #[error("series decay condition 2^(alpha*a) > 100 violated: 2^(alpha*a) = {0}")]
    DecayConditionViolated(f64),

    #[error("malformed word form: {0}")]
    MalformedWordForm(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
