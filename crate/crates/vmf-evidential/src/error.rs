//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A concentration parameter was negative (domain is kappa >= 0).
    #[error("concentration must be non-negative, got {0}")]
    NegativeConcentration(f64),

    /// A vector with (near-)zero norm cannot be normalized.
    #[error("cannot normalize near-zero vector (norm = {0:e})")]
    ZeroNorm(f64),

    /// An input value was NaN or infinite where a finite value is required.
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    /// The combined natural parameter vanished; the posterior mean is undefined.
    #[error("degenerate posterior: natural parameter norm {0:e} below 1e-12")]
    DegeneratePosterior(f64),

    /// Feature dimension does not match the model.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Two paired sequences differ in length.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// An operation requires a non-empty input set.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Not enough data points for the requested operation.
    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// AUROC needs both classes present.
    #[error("single-class input: both ID and OOD samples are required")]
    SingleClass,

    /// Grasp widths are physical lengths and must be non-negative.
    #[error("negative width: {0}")]
    NegativeWidth(f64),

    /// A probability argument fell outside [0, 1].
    #[error("probability out of range [0, 1]: {0}")]
    ProbabilityOutOfRange(f64),

    /// Approach and baseline are parallel; the gripper frame is undefined.
    #[error("degenerate grasp frame: approach parallel to baseline")]
    DegenerateFrame,

    /// Optimization produced a non-finite loss.
    #[error("divergence at iteration {iteration}: loss is not finite")]
    Divergence { iteration: usize },

    /// Too few samples for a statistically meaningful estimate.
    #[error("too few samples: need at least {min}, got {got}")]
    TooFewSamples { min: usize, got: usize },

    /// Malformed configuration or data file.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
