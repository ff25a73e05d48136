use thiserror::Error;

/// Errors reported by the model, strategy, mechanism and optimizer code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("shape parameter xi = {0} > 0 is not supported")]
    UnsupportedShape(f64),
    #[error("point {x} is outside the support [{lo}, {hi}]")]
    OutOfSupport { x: f64, lo: f64, hi: f64 },
    #[error("value {t} is outside the range [{lo}, {hi}] of the virtual value")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("virtual value is not increasing: {0}")]
    NonRegular(String),
    #[error("function is not increasing: {0}")]
    NonMonotone(String),
    #[error("integral does not converge: {0}")]
    NonIntegrable(String),
    #[error("denominator vanishes: {0}")]
    DegenerateDenominator(String),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("support condition violated: {0}")]
    SupportViolation(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("could not fit model: {0}")]
    FitFailure(String),
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("optimizer failed: {0}")]
    Diverged(String),
    #[error("boost {0} must be positive")]
    InvalidBoost(f64),
    #[error("mechanism {0} is not supported here")]
    UnsupportedMechanism(String),
    #[error("perturbation breaks monotonicity of the strategy")]
    PerturbationBreaksMonotonicity,
}

pub type Result<T> = std::result::Result<T, Error>;
