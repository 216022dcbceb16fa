use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("region contains no grid nodes")]
    EmptyRegion,

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("singular point of the explicit solution at {} node(s): first at index {}", .nodes.len(), .nodes.first().copied().unwrap_or_default())]
    SingularPoint { nodes: Vec<usize> },

    #[error("exponent out of range: {0}")]
    ExponentOutOfRange(String),

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {residual:e}){}", step_suffix(.step))]
    Divergence {
        iterations: usize,
        residual: f64,
        step: Option<usize>,
    },

    #[error("snapshot format: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(String),
}

fn step_suffix(step: &Option<usize>) -> String {
    match step {
        Some(k) => format!(" at step {k}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Divergence { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
