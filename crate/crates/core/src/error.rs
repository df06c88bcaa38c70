use thiserror::Error;

use crate::lattice::GridBox;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("side {side} does not tile {boxed}: sides must divide the dimensions and the origin must be aligned")]
    NonDivisible { side: i64, boxed: GridBox },
    #[error("path vertex ({x}, {y}) lies outside frame {frame}")]
    OutOfFrame { x: i64, y: i64, frame: GridBox },
    #[error("{inner} is not contained in {outer}")]
    NotNested { outer: GridBox, inner: GridBox },
    #[error("{boxed} is not contained in the field domain {domain}")]
    NotContained { domain: GridBox, boxed: GridBox },
    #[error("problem size {size} exceeds the configured budget {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("green matrix for {expected} used with {actual}")]
    DimensionMismatch { expected: GridBox, actual: GridBox },
    #[error("vertex ({x}, {y}) lies outside the weight field box {boxed}")]
    OutOfBox { x: i64, y: i64, boxed: GridBox },
    #[error("no path connects the source set to the target set")]
    Disconnected,
    #[error("crossing spec has an empty source or target set")]
    EmptySpec,
    #[error("connector supports at most 4 terminal sets, got {got}")]
    TooManyTerminals { got: usize },
    #[error("geodesic result carries a connector vertex set, not a path")]
    NotAPath,
    #[error("quantile probability {p} is outside (0, 1]")]
    BadP { p: f64 },
    #[error("coefficient of variation is undefined for a zero-mean sample")]
    ZeroMean,
    #[error("Chebyshev envelope requires delta < min(p, p'): delta={delta}, p={p}")]
    AssumptionViolated { delta: f64, p: f64 },
    #[error("metrics have different grid resolutions: {a} vs {b}")]
    GridMismatch { a: usize, b: usize },
    #[error("holder fit is degenerate: all pairwise distances equal")]
    DegenerateData,
}

pub type Result<T> = std::result::Result<T, Error>;
