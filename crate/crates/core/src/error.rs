use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An Itô–Euler step left the physical region by more than the allowed
    /// margin. Usually means `dt` is too coarse for the chosen rates.
    #[error("numerical blow-up at step {step}: (x, z) = ({x:.6}, {z:.6})")]
    NumericalBlowup { step: usize, x: f64, z: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid probability: {0}")]
    InvalidProbability(String),

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("ensembles were produced with different configurations: {0}")]
    MismatchedConfig(String),

    #[error("series spans {span:.3} us but at least {needed:.3} us are required")]
    InsufficientSpan { span: f64, needed: f64 },

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("config parse error in {path}: {message}")]
    ConfigParse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
