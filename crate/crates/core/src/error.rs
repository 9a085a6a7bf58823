use thiserror::Error;

/// Errors raised by every operation in the crate.
///
/// The variants are coarse on purpose: callers (the CLI in particular) map
/// them onto distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range input data.
    #[error("invalid input: {0}")]
    Input(String),

    /// An enumeration or eigensolve would exceed a size guard.
    #[error("resource guard `{guard}` exceeded: {detail} (limit {limit})")]
    Resource {
        guard: &'static str,
        detail: String,
        limit: String,
    },

    /// The admissible set is empty (balance constraints cannot be met).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A value lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// A modelling constraint (such as the noise bound) is violated.
    #[error("constraint violated: {0}")]
    Constraint(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn resource(
        guard: &'static str,
        detail: impl Into<String>,
        limit: impl ToString,
    ) -> Self {
        Error::Resource {
            guard,
            detail: detail.into(),
            limit: limit.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
