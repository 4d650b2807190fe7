use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// The witness-pipeline variants double as CLI exit statuses, see
/// [`Error::exit_code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("invalid norm specification: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("the zero vector is not allowed here")]
    ZeroVector,

    #[error("point is not smooth: more than one supporting functional")]
    NotSmoothPoint,

    #[error("norm-attainment set could not be resolved into isolated maximizers")]
    MtUnresolved,

    #[error("the zero operator is symmetric; no witness exists")]
    ZeroOperator,

    #[error("norm {0} is not strictly convex and smooth")]
    SpecNotScSmooth(String),

    #[error("norm-attainment set is not a single antipodal pair")]
    NotAntipodalMt,

    #[error("operator vanishes on the hyperplane orthogonal to its maximizer; fallback also failed")]
    TRestrictedZero,

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("search budget exhausted: {0}")]
    BudgetExhausted(String),
}

impl Error {
    /// Process exit status used by the `bjortho` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimMismatch { .. } | Error::InvalidSpec(_) | Error::Parse(_) => 1,
            Error::ZeroVector | Error::NotSmoothPoint => 1,
            Error::ZeroOperator => 4,
            Error::SpecNotScSmooth(_) => 5,
            Error::BudgetExhausted(_) => 6,
            Error::NotAntipodalMt => 7,
            Error::TRestrictedZero => 8,
            Error::HypothesisFailed(_) => 9,
            Error::MtUnresolved => 10,
        }
    }

    /// Stable upper-case tag used in JSON reports.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::DimMismatch { .. } => "DIM_MISMATCH",
            Error::InvalidSpec(_) => "INVALID_SPEC",
            Error::Parse(_) => "PARSE_ERROR",
            Error::ZeroVector => "ZERO_VECTOR",
            Error::NotSmoothPoint => "NOT_SMOOTH_POINT",
            Error::MtUnresolved => "MT_UNRESOLVED",
            Error::ZeroOperator => "ZERO_OPERATOR",
            Error::SpecNotScSmooth(_) => "SPEC_NOT_SC_SMOOTH",
            Error::NotAntipodalMt => "NOT_ANTIPODAL_MT",
            Error::TRestrictedZero => "T_RESTRICTED_ZERO",
            Error::HypothesisFailed(_) => "HYPOTHESIS_FAILED",
            Error::BudgetExhausted(_) => "BUDGET_EXHAUSTED",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
