use thiserror::Error;

/// Errors raised by the model and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{param}` out of domain: {reason}")]
    Domain { param: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("cosine similarity undefined for a zero vector")]
    UndefinedAngle,
}

impl ModelError {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        ModelError::Domain {
            param,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn require_finite(param: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::domain(
            param,
            format!("must be finite, got {value}"),
        ))
    }
}

pub(crate) fn require_positive(param: &'static str, value: f64) -> Result<()> {
    require_finite(param, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::domain(
            param,
            format!("must be > 0, got {value}"),
        ))
    }
}

pub(crate) fn require_non_negative(param: &'static str, value: f64) -> Result<()> {
    require_finite(param, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::domain(
            param,
            format!("must be >= 0, got {value}"),
        ))
    }
}
