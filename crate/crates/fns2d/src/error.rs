use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wave index (0,0) is not admissible here")]
    ZeroIndex,

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: u32, right: u32 },

    #[error("negative time t={t} rejected")]
    NegativeTime { t: f64 },

    #[error("grid {m} too small, need at least {needed} points per axis")]
    GridTooSmall { m: usize, needed: usize },

    #[error("cutoff {cutoff} cannot resolve a full dyadic shell")]
    DegenerateResolution { cutoff: u32 },

    #[error("invalid norm specification: {detail}")]
    InvalidNorm { detail: String },

    #[error("Hurst parameter {h} outside open interval (0,1)")]
    InvalidHurst { h: f64 },

    #[error("Hurst mismatch: constant computed for H={expected}, got H={got}")]
    HurstMismatch { expected: f64, got: f64 },

    #[error("decay unresolved: lambda*dt = {product} exceeds 1/4 (lambda={lambda}, dt={dt})")]
    StepTooLarge { lambda: f64, dt: f64, product: f64 },

    #[error("quadrature did not reach tol={requested:e}; achieved bound {achieved:e}")]
    QuadratureNoConvergence { requested: f64, achieved: f64 },

    #[error("Cholesky factorization failed at pivot {pivot}: {detail}")]
    CholeskyFailure { pivot: usize, detail: String },

    #[error("gamma coefficient undefined for h=k")]
    GammaDiagonal,

    #[error("moment requires H > 1/4 (series over interaction indices diverges otherwise); got H={h}")]
    HurstTooSmallForMoment { h: f64 },

    #[error("parameter outside admissible region: {detail}")]
    ParameterRegion { detail: String },

    #[error("truncation radius {r} exceeds configured budget {max}")]
    TruncationBudget { r: u32, max: u32 },

    #[error("time grids do not match: {detail}")]
    GridMismatch { detail: String },

    #[error("invalid configuration: {detail}")]
    Config { detail: String },

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
