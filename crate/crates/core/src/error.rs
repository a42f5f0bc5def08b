use thiserror::Error;

/// Errors produced anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// The scenario document is malformed; `key` is the JSON path of the offending value.
    #[error("parse error at `{key}`: {message}")]
    Parse { key: String, message: String },

    /// A field parsed but violates a model constraint.
    #[error("invalid `{field}`: {constraint}")]
    Validation { field: String, constraint: String },

    #[error("link index {index} out of range for {links} link(s)")]
    IndexOutOfRange { index: usize, links: usize },

    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("pole of {function} at {at}: {hint}")]
    Pole {
        function: &'static str,
        at: f64,
        hint: &'static str,
    },

    #[error("expansion needs {terms} terms, above the cap of {cap}; reduce L or m_alpha")]
    Capacity { terms: u128, cap: usize },

    #[error("numerical failure in {metric}: {detail}; use the quadrature oracle path instead")]
    NumericalFailure { metric: &'static str, detail: String },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}
