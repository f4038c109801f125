use thiserror::Error;

/// Errors raised by the geometry, homology and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("point outside chart domain: chart {chart}, coordinate {coordinate} = {value}")]
    OutOfDomain {
        chart: usize,
        coordinate: usize,
        value: f64,
    },
    #[error("degenerate point: jacobian rank below intrinsic dimension")]
    DegeneratePoint,
    #[error("co-orientation requires codimension 1, got {0}")]
    UnsupportedCodimension(usize),
    #[error("perturbation amplitude {0} breaks the immersion condition")]
    AmplitudeTooLarge(f64),
    #[error("invalid cotangent vector: <p, q> = {0:e}")]
    InvalidCotangentVector(f64),
    #[error("inconsistent double normal: |<nu, u>| = {0:e} at an endpoint")]
    InconsistentDoubleNormal(f64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
