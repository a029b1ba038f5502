use alloc::string::String;

/// Errors raised by the core library.
///
/// The variants line up with the exit-code contract of the command-line
/// tool: domain and parse errors are usage problems, budget and numeric
/// errors are resource problems.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("numeric failure at step {step}: {what}")]
    Numeric { step: usize, what: String },
    #[error("parse error: {0}")]
    Parse(String),
    /// A proven inequality failed; always a bug somewhere.
    #[error("inequality violated: {0}")]
    Violation(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn budget(msg: impl Into<String>) -> Error {
    Error::Budget(msg.into())
}
