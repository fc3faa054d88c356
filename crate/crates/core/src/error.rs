use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("period must be a positive odd integer, got {0}")]
    InvalidPeriod(usize),

    #[error("period mismatch: {0} vs {1}")]
    PeriodMismatch(usize, usize),

    #[error("expected {expected} coefficients for period {period}, got {got}")]
    CoefficientCount { period: usize, expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration bounds out of order: t = {t} < tau = {tau}")]
    ReversedInterval { tau: f64, t: f64 },

    #[error("invalid spike train: {0}")]
    InvalidSpikeTrain(String),

    #[error("unipolar encoding requires x(t) + c > 0, minimum on grid is {min}")]
    NotUnipolar { min: f64 },

    #[error("degenerate spike train: at least one spike is required")]
    EmptyTrain,

    #[error("target density {target} unreachable: achieved range is [{low}, {high}] spikes per Nyquist period")]
    CalibrationUnreachable { target: f64, low: f64, high: f64 },

    #[error("calibration failed for alpha = {alpha}: {source}")]
    CalibrationAt {
        alpha: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("index {index} out of range for {len} spikes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("plot rendering failed: {0}")]
    Plot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
