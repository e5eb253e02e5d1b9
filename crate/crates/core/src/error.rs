use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Numerator and denominator (approximately) share a root, or the map is constant.
    #[error("degenerate map: {0}")]
    DegenerateMap(String),

    #[error("degree cap exceeded: degree {degree} > cap {cap}")]
    CapExceeded { degree: usize, cap: usize },

    #[error("composition ill-conditioned: {0}")]
    IllConditioned(String),

    #[error("root finder did not converge after {sweeps} sweeps (worst residual {worst_residual:e})")]
    RootFinding { sweeps: usize, worst_residual: f64 },

    #[error("orbit tracing inconsistent: {0}")]
    OrbitInconsistent(String),

    #[error("non-finite integrand at grid node {index} ({point})")]
    NonFinite { index: usize, point: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exceptional start point: {0}")]
    Exceptional(String),

    #[error("too many near-critical samples: {flagged} of {total}")]
    TooManyFlagged { flagged: usize, total: usize },

    #[error("no admissible start: {0}")]
    NoAdmissibleStart(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateMap(_) => "degenerate_map",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::RootFinding { .. } => "root_finding",
            Error::OrbitInconsistent(_) => "orbit_inconsistent",
            Error::NonFinite { .. } => "non_finite",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Exceptional(_) => "exceptional_start",
            Error::TooManyFlagged { .. } => "too_many_flagged",
            Error::NoAdmissibleStart(_) => "no_admissible_start",
            Error::Internal(_) => "internal",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
