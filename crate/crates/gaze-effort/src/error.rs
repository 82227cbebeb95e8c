use thiserror::Error;

/// Crate-wide error type. Degenerate-but-expected outcomes (a metric that
/// cannot be computed for one trial) are carried as tagged values in
/// [`crate::measures::Metric`], not as errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no valid samples in input")]
    EmptyInput,

    #[error("trial spans {0} seconds; need a positive duration")]
    DegenerateDuration(f64),

    #[error("need at least {needed} valid samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("fixation depth must be positive, got {0}")]
    ZeroDepth(f64),

    #[error("empty fixation sequence")]
    EmptySequence,

    #[error("total retinal flow is zero; flow distribution undefined")]
    ZeroTotalFlow,

    #[error("total view importance is zero; importance distribution undefined")]
    ZeroTotalImportance,

    #[error("need at least two fixations for transition statistics, got {0}")]
    FewerThanTwoFixations(usize),

    #[error("trial carries no AOI labels")]
    MissingAoiLabels,

    #[error("no valid pupil samples")]
    NoValidPupilSamples,

    #[error("trial carries no speed channel")]
    MissingSpeed,

    #[error("distributions are defined over different supports")]
    SupportMismatch,

    #[error("distribution is invalid: {0}")]
    InvalidDistribution(String),

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("input length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("insufficient data: need at least {needed} paired observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("unsupported schema version {found:?}; expected {expected:?}")]
    SchemaVersion { expected: String, found: String },

    #[error("config: {0}")]
    Config(String),

    #[error("infeasible scenario: {0}")]
    InfeasibleSchedule(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
