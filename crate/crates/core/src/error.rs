use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {n} exceeds the subset-enumeration limit {max}")]
    DimensionTooLarge { n: usize, max: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("matrix is numerically singular (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("degenerate spectrum: eigenvalue gap {gap:e} below tolerance {tolerance:e}")]
    DegenerateSpectrum { gap: f64, tolerance: f64 },

    #[error("exponent {exponent:e} overflows double precision")]
    Overflow { exponent: f64 },

    #[error("|{what}| = {value:e} exceeds the flow magnitude limit {limit:e}")]
    MagnitudeLimit { what: &'static str, value: f64, limit: f64 },

    #[error("log-space feature value {log_value:e} overflows double precision")]
    FeatureOverflow { log_value: f64 },

    #[error("non-finite value produced at step {step}")]
    NonFiniteState { step: usize },

    #[error("Iwasawa residual {residual:e} above tolerance {tolerance:e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("gauge transform check failed: {0}")]
    GaugeMismatch(String),

    #[error("z = {z} lies within {distance:e} of an eigenvalue")]
    NearPole { z: f64, distance: f64 },

    #[error("direct and gauge routes disagree by {deviation:e} (tolerance {tolerance:e})")]
    RouteMismatch { deviation: f64, tolerance: f64 },

    #[error("implicit midpoint iteration did not converge at step {step}")]
    NoConvergence { step: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Errors caused by the caller's input rather than by the numerics.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::DimensionTooLarge { .. }
                | Error::InvalidState(_)
                | Error::InvalidArgument(_)
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
