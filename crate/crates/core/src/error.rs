use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("invalid argument `{name}`: {reason}")]
    Domain { name: &'static str, reason: String },

    /// Enumeration would exceed the configured resource bound.
    #[error("{what} is limited to n <= {max}, got n = {n}")]
    ResourceBound { what: &'static str, n: usize, max: usize },

    /// Two `a` coefficients coincide, so the residue formula has a double pole.
    #[error("coefficients a[{first}] and a[{second}] coincide ({value}); repeated a_i are not supported")]
    Pole { first: usize, second: usize, value: String },

    /// Distinct but nearly equal `a` coefficients under the rejecting policy.
    #[error("minimum separation of a coefficients is {separation:e}, below the threshold {threshold:e}")]
    IllConditioned { separation: f64, threshold: f64 },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("no closed-form constants for n = {0} (supported: 4, 5)")]
    Unsupported(usize),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}
