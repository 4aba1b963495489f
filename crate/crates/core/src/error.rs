use thiserror::Error;

/// Errors raised by containers, collectives, capture, kernels and the harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("kind error: {0}")]
    Kind(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("breakdown: {0}")]
    Breakdown(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("capture error: {0}")]
    Capture(String),
    #[error("replay error: {0}")]
    Replay(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Prefix the message with some context, keeping the variant.
    pub fn context(self, ctx: &str) -> Self {
        use Error::*;
        match self {
            Size(m) => Size(format!("{ctx}: {m}")),
            Index(m) => Index(format!("{ctx}: {m}")),
            Shape(m) => Shape(format!("{ctx}: {m}")),
            Kind(m) => Kind(format!("{ctx}: {m}")),
            Config(m) => Config(format!("{ctx}: {m}")),
            Parameter(m) => Parameter(format!("{ctx}: {m}")),
            Format(m) => Format(format!("{ctx}: {m}")),
            Breakdown(m) => Breakdown(format!("{ctx}: {m}")),
            Singular(m) => Singular(format!("{ctx}: {m}")),
            Capture(m) => Capture(format!("{ctx}: {m}")),
            Replay(m) => Replay(format!("{ctx}: {m}")),
            Parse { line, msg } => Parse { line, msg: format!("{ctx}: {msg}") },
            Io(m) => Io(format!("{ctx}: {m}")),
        }
    }
}
