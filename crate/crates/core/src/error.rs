use thiserror::Error;

/// Errors raised anywhere in the construction and verification pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("non-positive parameter {name} = {value}")]
    NonPositiveParameter { name: &'static str, value: String },

    #[error("moment error: {0}")]
    Moment(String),

    #[error("insufficient moments: need order {needed}, have {available}")]
    InsufficientMoments { needed: usize, available: usize },

    #[error("scalar kinds do not match")]
    KindMismatch,

    #[error("degree error: {0}")]
    Degree(String),

    #[error("Gram matrix not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("leading factor {index} is zero or not finite")]
    BadFactor { index: usize },

    #[error("matrix violates the checkerboard structure at ({row}, {col})")]
    NotCheckerboard { row: usize, col: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("measure is not symmetric about the origin")]
    NotSymmetric,

    #[error("value not representable in this backend: {0}")]
    NotRepresentable(String),

    #[error("float Hankel pipeline refused for N = {n} (limit {limit})")]
    Conditioning { n: usize, limit: usize },

    #[error("constraint polynomials are linearly dependent")]
    DependentConstraints,

    #[error("basis polynomials are linearly dependent")]
    DependentBasis,

    #[error("bases were built from different measures")]
    MeasureMismatch,

    #[error("integration dimension {dims} exceeds cap {cap}")]
    DimensionCap { dims: usize, cap: usize },

    #[error("quadrature has {have} nodes per axis, need {need}")]
    InsufficientNodes { have: usize, need: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("two independent routes disagree: {0}")]
    OracleMismatch(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMeasure(_) => "InvalidMeasure",
            Error::NonPositiveParameter { .. } => "NonPositiveParameter",
            Error::Moment(_) => "MomentError",
            Error::InsufficientMoments { .. } => "InsufficientMoments",
            Error::KindMismatch => "KindMismatch",
            Error::Degree(_) => "DegreeError",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::BadFactor { .. } => "BadFactor",
            Error::NotCheckerboard { .. } => "NotCheckerboard",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::NotSymmetric => "NotSymmetric",
            Error::NotRepresentable(_) => "NotRepresentable",
            Error::Conditioning { .. } => "ConditioningError",
            Error::DependentConstraints => "DependentConstraints",
            Error::DependentBasis => "DependentBasis",
            Error::MeasureMismatch => "MeasureMismatch",
            Error::DimensionCap { .. } => "DimensionCap",
            Error::InsufficientNodes { .. } => "InsufficientNodes",
            Error::Parse(_) => "ParseError",
            Error::OracleMismatch(_) => "OracleMismatch",
            Error::Dimension(_) => "DimensionError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
