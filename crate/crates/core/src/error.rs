use thiserror::Error;

/// Which marginal of a mass matrix a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Column => f.write_str("column"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CopulaError {
    #[error("mass matrix is not square: {rows} rows, row {bad_row} has {cols} entries")]
    NonSquare {
        rows: usize,
        bad_row: usize,
        cols: usize,
    },

    #[error("empty mass matrix")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("negative mass {value:e} at ({row}, {col})")]
    NegativeMass { row: usize, col: usize, value: f64 },

    #[error("{axis} {index} sums to {sum}, expected {expected} (off by {deviation:e})")]
    MarginalViolation {
        axis: Axis,
        index: usize,
        sum: f64,
        expected: f64,
        deviation: f64,
    },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: usize, right: usize },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("input is not stochastically increasing: row {row} rises by {magnitude:e}")]
    NotStochasticallyIncreasing { row: usize, magnitude: f64 },

    #[error("too few samples: {count} (need at least {min})")]
    TooFewSamples { count: usize, min: usize },

    #[error("degenerate ranks: all {0} values are equal")]
    DegenerateRanks(&'static str),

    #[error("degenerate functional: integral against M equals integral against independence")]
    DegenerateFunctional,

    #[error("not supermodular at corner ({row}, {col}): defect {defect:e}")]
    NotSupermodular { row: usize, col: usize, defect: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CopulaError>;
