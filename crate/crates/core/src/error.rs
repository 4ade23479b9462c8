use thiserror::Error;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported rank k = {k} (allowed: {allowed})")]
    UnsupportedRank { k: usize, allowed: &'static str },

    #[error("class {class:?} is not a root (self-pairing {square}, expected -2)")]
    NotARoot { class: Vec<i64>, square: i64 },

    #[error("class {class:?} is not primitive")]
    NotPrimitive { class: Vec<i64> },

    #[error("x *1 y is not proportional to (x.y) K for x = {x:?}, y = {y:?}: got {product:?}")]
    NotProportional {
        x: Vec<i64>,
        y: Vec<i64>,
        product: Vec<i64>,
    },

    #[error("product not determined: {0}")]
    UnknownProduct(String),

    #[error("reflection representation on K-perp is reducible: {dim} independent invariant forms")]
    ReducibleAction { dim: usize },

    #[error("index {index} out of range for tuple of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point lies on the zero section where the circle action is undefined (|u| = {norm_u:e})")]
    ZeroSection { norm_u: f64 },

    #[error("integration diverged: {0}")]
    IntegrationDiverged(String),

    #[error("chart singularity at v = {v:?}")]
    ChartSingularity { v: [f64; 3] },

    #[error("sample lies on a singular locus: {0}")]
    SampleOnSingularLocus(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid degrees {0:?}: every degree must be positive")]
    InvalidDegrees(Vec<i64>),

    #[error("degrees {0:?} are not of general type")]
    NotGeneralType(Vec<u64>),

    #[error("no configuration found: {0}")]
    NotFound(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
