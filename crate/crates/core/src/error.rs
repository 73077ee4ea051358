use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector norm {0:.3e} is below the zero threshold")]
    ZeroVector(f64),

    #[error("rays are not orthogonal (|dot| = {0:.3e})")]
    NotOrthogonal(f64),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("{name} = {value} is outside {range}")]
    Range {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("unknown gate label `{0}`")]
    UnknownLabel(String),

    #[error("unknown ray set `{0}`")]
    UnknownSet(String),

    #[error("ray set has no orthogonal pair")]
    NoOrthogonalPair,

    #[error("key length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("ray file line {line}: {msg}")]
    RayFile { line: usize, msg: String },

    #[error("wire format: {0}")]
    Wire(String),

    #[error("transport: {0}")]
    Transport(String),

    #[error("protocol violation: {0}")]
    Protocol(String),
}

impl Error {
    pub(crate) fn range(name: &'static str, value: f64, range: &'static str) -> Self {
        Error::Range { name, value, range }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Transport(e.to_string())
    }
}
