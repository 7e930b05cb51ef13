use thiserror::Error;

pub type Result<T> = std::result::Result<T, TwoIsoError>;

#[derive(Debug, Error)]
pub enum TwoIsoError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("not rank one: {0} is the zero vector")]
    NotRankOne(&'static str),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("operators act on different spaces")]
    SpaceMismatch,

    #[error("truncation too small: no basis label has total degree <= {max_degree} - 2*{growth}")]
    TruncationTooSmall { max_degree: u32, growth: u32 },

    #[error("degree growth is unbounded; the safe subspace of a truncated space is undefined")]
    UnboundedGrowth,

    #[error("{what} lies outside the truncation-safe subspace")]
    NotTruncationSafe { what: &'static str },

    #[error(
        "base operator is not a 2-isometry: polarized defect {residual:.3e} exceeds {tol:.1e}"
    )]
    BaseNotTwoIsometry { residual: f64, tol: f64 },

    #[error("degenerate denominator <T*v, x> = {0:.3e}")]
    DegenerateDenominator(f64),

    #[error("{0} requires branch (ii), but ker K is invariant under T")]
    NotBranchTwo(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown example {0:?}")]
    UnknownExample(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
