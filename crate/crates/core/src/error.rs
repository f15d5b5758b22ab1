use thiserror::Error;

/// Errors raised by the forward and inverse solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    #[error("degenerate curve: Jacobian vanishes at t = {t}")]
    DegenerateCurve { t: f64 },

    #[error("nonpositive radius: r({t}) = {value}")]
    NonpositiveRadius { t: f64, value: f64 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("domain error: {func} is undefined at x = {x}")]
    Domain { func: &'static str, x: f64 },

    #[error("coincident points: source and observation points are {distance:e} apart")]
    CoincidentPoints { distance: f64 },

    #[error("boundaries overlap or are too close (gap {gap:.4}, required {required:.4})")]
    OverlappingBoundaries { gap: f64, required: f64 },

    #[error(
        "near-singular system (condition estimate {condition:.3e}); \
         the frequency may be close to an interior resonance, try perturbing omega"
    )]
    SingularSystem { condition: f64 },

    #[error("modal system singular at mode m = {mode}")]
    ModalMatrixSingular { mode: i64 },

    #[error("modal expansion did not converge within {modes} modes")]
    TruncationNotConverged { modes: usize },

    #[error("zero denominator in relative error: data is identically zero")]
    ZeroDenominator,

    #[error("zero residual: iteration has already converged")]
    ZeroResidual,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("step rejected twice: {0}")]
    RejectedStep(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("data file error: {0}")]
    DataFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
