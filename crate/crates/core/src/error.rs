use thiserror::Error;

/// Positioned failure while reading the field DSL.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier '{name}' at offset {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("non-constant exponent after '^' at offset {pos}")]
    NonConstantExponent { pos: usize },
}

impl ParseError {
    pub fn pos(&self) -> usize {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownIdentifier { pos, .. }
            | ParseError::NonConstantExponent { pos } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("domain violation: non-finite value in '{expr}'")]
    Domain { expr: String },
    #[error("stagnation point: |u| below tolerance (|u| = {speed:e})")]
    StagnationPoint { speed: f64 },
    #[error("unknown catalog field '{0}'")]
    UnknownField(String),
    #[error("catalog field '{name}' expects {expected} parameter(s), got {got}")]
    ParameterCount {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("field has no known pressure")]
    NoPressure,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("adaptive step collapsed to {step:e} at t = {t}")]
    StepUnderflow { t: f64, step: f64 },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
