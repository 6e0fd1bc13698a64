//! Finite element functions, error norms, velocity recovery and export.

mod fields;
mod gridfunction;
mod metrics;
mod projection;
mod vtk;

use thiserror::Error;

use crate::assembly::AssemblyError;
use crate::elements::ElementError;
use crate::mesh::GeometryError;
use crate::quadrature::QuadratureError;
use crate::solvers::SolverError;

pub use fields::ReferenceFields;
pub use gridfunction::GridFunction;
pub use metrics::{
    combine_velocity_error, comparison_error, comparison_error_with_accuracy, compute_l2_error,
    compute_vector_l2_error, l2_norm, normalized_velocity_error, vector_l2_norm,
};
pub use projection::{project_rt_components, recover_gradient, ProjectionKind};
pub use vtk::write_vtk;

#[derive(Debug, Error)]
pub enum PostprocessError {
    #[error("coefficient vector has length {got}, space has {expected} DOFs")]
    CoefficientLength { expected: usize, got: usize },
    #[error("wrong space: {0}")]
    WrongSpace(&'static str),
    #[error("functions live on different meshes")]
    MeshMismatch,
    #[error("target order {got} does not match the expected order {expected}")]
    OrderMismatch { expected: usize, got: usize },
    #[error("fields have {0} and {1} components")]
    ComponentMismatch(usize, usize),
    #[error("cannot normalize by a zero reference norm")]
    ZeroNorm,
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
