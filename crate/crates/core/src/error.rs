//! Error type shared by all simulation modules.

/// Errors produced by configuration validation and simulation operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A distribution or solver parameter violates its constraint.
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter {
        /// Name of the offending field.
        name: &'static str,
        /// What constraint was violated, including the value seen.
        message: String,
    },

    /// A requested (family, cv, mean) target cannot be represented.
    #[error("infeasible target: {0}")]
    Infeasible(String),

    /// A time query lies outside the generated switch horizon.
    #[error("time {t} is outside the generated horizon [0, {horizon})")]
    OutOfHorizon { t: f64, horizon: f64 },

    /// A switch sequence does not cover the requested simulation horizon.
    #[error("switch sequence covers [0, {covered}) but the horizon is {horizon}")]
    ShortSequence { covered: f64, horizon: f64 },

    /// A solver configuration is internally inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An operation was called on data that cannot support it.
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }

    /// True when the error stems from caller-supplied values rather than
    /// a runtime failure. The CLI maps these to usage exit status.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::Infeasible(_)
                | Error::Config(_)
                | Error::Usage(_)
        )
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
