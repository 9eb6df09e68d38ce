use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value while evaluating {context}")]
    NonFinite { context: String },

    #[error("integration diverged after t = {last_good_t}")]
    IntegrationDiverged { last_good_t: f64 },

    #[error("tangent vector of norm {norm} is outside the chart (limit {limit})")]
    OutOfChart { norm: f64, limit: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("arrows are not composable: source/target mismatch of {mismatch:e}")]
    NotComposable { mismatch: f64 },

    #[error("hbar must be non-zero")]
    ZeroHbar,

    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(value: f64, context: impl FnOnce() -> String) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { context: context() })
    }
}
