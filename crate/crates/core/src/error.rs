use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report. Each variant maps onto a stable,
/// machine-readable code via [`Error::code`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("element {element} references node {node}, but the mesh has {n_nodes} nodes")]
    BadIndex {
        element: usize,
        node: usize,
        n_nodes: usize,
    },
    #[error("element {element} is degenerate")]
    DegenerateElement { element: usize },
    #[error("element is reversed or degenerate (signed measure {measure:e})")]
    ReversedElement { measure: f64 },
    #[error("mesh is invalid: {0}")]
    InvalidMesh(String),
    #[error("mesh has no interior nodes")]
    NoInterior,
    #[error("mesh has no boundary nodes")]
    NoBoundary,
    #[error("interior node {node} has no neighbors")]
    NoNeighbors { node: usize },
    #[error("node {node} is not strictly inside the convex hull of its neighbors")]
    NodeNotInteriorToNeighbors { node: usize },
    #[error("interior system is singular: {0}")]
    SingularSystem(String),
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("Gauss-Seidel diverged after {sweeps} sweeps")]
    Diverged { sweeps: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("maximin problem for node {node} is unbounded")]
    Unbounded { node: usize },
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("point ({x}, {y}) outside the map's domain")]
    DomainError { x: f64, y: f64 },
    #[error("invalid Hessian bound {0}")]
    InvalidBound(f64),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::BadIndex { .. } => "BAD_INDEX",
            Error::DegenerateElement { .. } => "DEGENERATE_ELEMENT",
            Error::ReversedElement { .. } => "REVERSED_ELEMENT",
            Error::InvalidMesh(_) => "INVALID_MESH",
            Error::NoInterior => "NO_INTERIOR",
            Error::NoBoundary => "NO_BOUNDARY",
            Error::NoNeighbors { .. } => "NO_NEIGHBORS",
            Error::NodeNotInteriorToNeighbors { .. } => "NODE_NOT_INTERIOR_TO_NEIGHBORS",
            Error::SingularSystem(_) => "SINGULAR_SYSTEM",
            Error::NotPositiveDefinite { .. } => "NOT_POSITIVE_DEFINITE",
            Error::Diverged { .. } => "DIVERGED",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::Unbounded { .. } => "UNBOUNDED",
            Error::InvalidSpec(_) => "INVALID_SPEC",
            Error::DomainError { .. } => "DOMAIN_ERROR",
            Error::InvalidBound(_) => "INVALID_BOUND",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Io { .. } => "IO_ERROR",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
