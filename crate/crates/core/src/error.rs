use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Frenet frame undefined at s = {s}: curvature vanishes")]
    FrameUndefined { s: f64 },
    #[error("coordinate breakdown at s = {s}: 1 - kappa*Q1 = {gamma} is not positive")]
    CoordinateBreakdown { s: f64, gamma: f64 },
    #[error("singular transformation at s = {s}: det T = {det}")]
    SingularTransform { s: f64, det: f64 },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid profile function: {0}")]
    InvalidFunction(String),
    #[error("invalid quantum numbers: {0}")]
    InvalidMode(String),
    #[error("n1 = n2 = {n}: one-dimensional subspace has no |+>/|-> pair")]
    NondegenerateSubspace { n: u32 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too coarse: {0}")]
    Resolution(String),
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("integration failed at s = {s}: {reason}")]
    Integration { s: f64, reason: String },
    #[error("classically forbidden at s = {s} on branch {branch}: radicand {radicand}")]
    TurningPoint { s: f64, branch: char, radicand: f64 },
    #[error("degenerate spinor at s = {s}: Lambda*(Lambda - b) = {value}")]
    DegenerateSpinor { s: f64, value: f64 },
    #[error("mixing angle undefined: Lambda*(Lambda - alpha*p) = {value}")]
    DegenerateAngle { value: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
