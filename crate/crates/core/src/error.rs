use thiserror::Error;

use crate::assembly::AssemblyError;
use crate::elements::ElementError;
use crate::mesh::{MeshError, ParseError};
use crate::postprocess::PostprocessError;
use crate::solvers::SolverError;

/// Top-level error of the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh file: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Postprocess(#[from] PostprocessError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    InvalidInput(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}
