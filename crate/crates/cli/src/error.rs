use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("ground set of size {actual} is too small; enabled suites require at least {required} atoms")]
    GroundTooSmall { required: u64, actual: u64 },

    #[error("estimated cost {estimate:.2e} operations exceeds the refusal threshold {threshold:.0e}; pass --force to run anyway")]
    TooExpensive { estimate: f64, threshold: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Core(#[from] finfam_core::Error),

    #[error("replay error: {0}")]
    Replay(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
