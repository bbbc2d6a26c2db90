use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("well width {width} does not fit inside box of length {box_length}")]
    WellWiderThanBox { width: f64, box_length: f64 },

    #[error(
        "quadrature not converged: doubling nodes moved entry ({row}, {col}) by {change:e}"
    )]
    QuadratureNotConverged { row: usize, col: usize, change: f64 },

    #[error("analytic and quadrature dipole entries ({row}, {col}) differ by {change:e}")]
    DipoleCrossCheck { row: usize, col: usize, change: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("operator is not symmetric: max asymmetry {asymmetry:e}")]
    NotSymmetric { asymmetry: f64 },

    #[error("spectral gap collapsed: eigenvalue {energy:e} at index {index} lies within {gap_tol:e} of zero")]
    SpectralGapCollapse { index: usize, energy: f64, gap_tol: f64 },

    #[error("a bound level crossed zero energy: {actual} negative states where the free box has {expected}")]
    LevelCrossedZero { expected: usize, actual: usize },

    #[error("no positive-energy state in the spectrum")]
    NoPositiveState,

    #[error("numerical degradation: transformed dipole asymmetry {asymmetry:e} exceeds {threshold:e}")]
    NumericalDegradation { asymmetry: f64, threshold: f64 },

    #[error("degenerate denominator {delta:e} between states {a} and {b}")]
    DegenerateDenominator { a: usize, b: usize, delta: f64 },

    #[error("identity residual {residual:e} exceeds bound {bound:e}")]
    IdentityViolated { residual: f64, bound: f64 },

    #[error("lost track of level {index}: best overlap^2 {overlap:.3} at field {field:e}")]
    TrackingLost { index: usize, field: f64, overlap: f64 },

    #[error("level crossing inside the occupied set at field {field:e}")]
    CrossingDetected { field: f64 },

    #[error("field set too strong: fit residual {residual:e} exceeds {threshold:e}")]
    FieldTooStrong { residual: f64, threshold: f64 },

    #[error("invalid field set: {0}")]
    InvalidFields(String),

    #[error("alpha_qm has no sign change between depth {lo} ({alpha_lo:e}) and {hi} ({alpha_hi:e})")]
    NoSignChange { lo: f64, hi: f64, alpha_lo: f64, alpha_hi: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for the errors that end a depth sweep: the positive/negative
    /// partition no longer matches the unbound system.
    pub fn is_collapse(&self) -> bool {
        matches!(
            self,
            Error::SpectralGapCollapse { .. } | Error::LevelCrossedZero { .. } | Error::NoPositiveState
        )
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Stable process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::WellWiderThanBox { .. } | Error::Config(_) => 2,
            Error::InvalidFields(_) => 2,
            Error::SpectralGapCollapse { .. } | Error::LevelCrossedZero { .. } | Error::NoPositiveState => 3,
            Error::DegenerateDenominator { .. } => 4,
            Error::NoSignChange { .. } => 5,
            _ => 1,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::WellWiderThanBox { .. } => "well_wider_than_box",
            Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
            Error::DipoleCrossCheck { .. } => "dipole_cross_check",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::SpectralGapCollapse { .. } => "spectral_gap_collapse",
            Error::LevelCrossedZero { .. } => "level_crossed_zero",
            Error::NoPositiveState => "no_positive_state",
            Error::NumericalDegradation { .. } => "numerical_degradation",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::IdentityViolated { .. } => "identity_violated",
            Error::TrackingLost { .. } => "tracking_lost",
            Error::CrossingDetected { .. } => "crossing_detected",
            Error::FieldTooStrong { .. } => "field_too_strong",
            Error::InvalidFields(_) => "invalid_fields",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
