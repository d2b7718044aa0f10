use thiserror::Error;

/// Errors raised by the intermediary library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {family} parameters: {reason}")]
    InvalidParameter { family: &'static str, reason: String },

    #[error("{what} = {value} lies outside the support [{lo}, {hi}]")]
    OutOfSupport {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid market instance: {0}")]
    InvalidInstance(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

pub type Result<T> = std::result::Result<T, Error>;
