use std::fmt;

use thiserror::Error;

/// Errors raised by the lab.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is outside the region where the formulas apply.
    #[error("domain error: {0}")]
    Domain(String),

    /// The analytic engine was asked to differentiate a field it has no
    /// closed form for.
    #[error("analytic engine cannot act on an opaque field; use the finite-difference engine")]
    AnalyticUnavailable,

    /// Finite-difference step is unusable at the given coordinate scale.
    #[error("finite-difference step {step:e} underflows the coordinate scale {scale:e}")]
    StepUnderflow { step: f64, scale: f64 },

    /// One or more configuration fields failed validation.
    #[error("invalid config:{}", render_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("malformed config JSON at line {line}, column {column}: {message}")]
    ConfigSyntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A single validation failure, addressed by its JSON field path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.path, self.message)
    }
}

fn render_issues(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("\n  {i}")).collect()
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
