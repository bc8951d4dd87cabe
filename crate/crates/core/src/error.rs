use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("cell {cell} is not star-shaped with respect to any sampled point")]
    NotStarShaped { cell: usize },

    #[error("quadrature exactness {0} is not supported (maximum 20)")]
    UnsupportedDegree(usize),

    #[error("rank error: expected dimension {expected}, found {found}")]
    Rank { expected: usize, found: usize },

    #[error("singular local system on cell {cell}")]
    SingularLocalSystem { cell: usize },

    #[error("polynomial order {order} exceeds the admissible bound {bound}")]
    OrderTooHigh { order: usize, bound: usize },

    #[error("reconstruction constraints infeasible on cell {cell}: residual {residual:e}")]
    InfeasibleConstraints { cell: usize, residual: f64 },

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("invalid experiment specification: {0}")]
    InvalidSpec(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
