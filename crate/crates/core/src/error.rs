use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {value} outside of [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),

    #[error("invalid patch: {0}")]
    InvalidPatch(String),

    #[error("element {element} out of range (patch has {count})")]
    ElementOutOfRange { element: usize, count: usize },

    #[error("degenerate surface frame at xi = {xi:?}")]
    DegenerateFrame { xi: [f64; 2] },

    /// The projected trial gap has no usable tangential part.
    #[error("degenerate sliding direction")]
    DegenerateTangent,

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("negative normal pressure {0}")]
    NegativePressure(f64),

    #[error("non-positive surface stretch {0}")]
    NonPositiveStretch(f64),

    #[error("element {element} inverted (det F = {det:.3e})")]
    ElementInversion { element: usize, det: f64 },

    #[error("singular or ill-posed linear system: {0}")]
    LinearSolve(String),

    #[error("load step failed at t = {time}: {reason}")]
    StepFailed { time: f64, reason: String },

    #[error("missing contact history for point {0}")]
    MissingHistory(usize),

    #[error("unknown boundary set `{0}`")]
    UnknownBoundary(String),

    #[error("scene error: {0}")]
    Scene(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether a load-step bisection may recover from this error.
    pub fn is_recoverable(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::ElementInversion { .. }
                | Error::LinearSolve(_)
                | Error::DegenerateFrame { .. }
        )
    }
}
