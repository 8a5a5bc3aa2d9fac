use thiserror::Error;

/// Everything that can go wrong below the harness layer.
///
/// Variants are deliberately specific: callers branch on them in tests and the
/// CLI turns them into exit codes, so "stringly" errors are avoided.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimension {0} unsupported, must be 1, 2 or 3")]
    BadDimension(usize),

    #[error("axis size {0} invalid: sizes must be powers of two and at least 8")]
    BadAxisSize(usize),

    #[error("axis length {0} invalid: must be positive and finite")]
    BadAxisLength(f64),

    #[error("sizes/lengths lists do not match the grid dimension")]
    MismatchedAxes,

    #[error("data length {got} does not match grid point count {expected}")]
    BadDataLength { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("mode index {0} not representable on this grid")]
    ModeOutOfRange(i64),

    #[error("multiplier produced a non-finite value at flat index {0}")]
    NonFiniteMultiplier(usize),

    #[error("shell {k} outside representable range [{k_min}, {k_max}]")]
    ShellOutOfRange { k: i32, k_min: i32, k_max: i32 },

    #[error("Lebesgue exponent must be 1, 2 or infinity")]
    BadExponent,

    #[error("window plateau fraction {0} must lie strictly between 0 and 1")]
    BadWindow(f64),

    #[error("map reaches too close to the south pole: min(1 + s3) = {0:.3e}")]
    PoleProximity(f64),

    #[error("cannot renormalize: vector length {0:.3e} is degenerate somewhere")]
    DegenerateVector(f64),

    #[error("field is not sphere-valued: max | |s| - 1 | = {0:.3e}")]
    NotUnitLength(f64),

    #[error("series form needs sup|u| < 1, got {0:.6}")]
    SeriesDiverges(f64),

    #[error("backward time {t} not allowed with damping epsilon = {epsilon}")]
    BackwardDissipative { t: f64, epsilon: f64 },

    #[error("damping epsilon = {0} outside [0, 1]")]
    BadEpsilon(f64),

    #[error("non-finite value appeared at step {0}; time step too large or data too rough")]
    Blowup(usize),

    #[error("trajectory samples must be uniformly spaced")]
    NonUniformTimes,

    #[error("trajectory needs at least two samples")]
    TooFewSamples,

    #[error("step count {steps} is not a multiple of the snapshot stride {stride}")]
    BadStride { steps: usize, stride: usize },

    #[error("dilation factor {0} must be >= 1 and divide every axis size")]
    BadDilation(u32),

    #[error("snapshot format: {0}")]
    SnapshotFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
