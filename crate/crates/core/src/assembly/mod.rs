//! Global sparse operators and load vectors for the Lagrange and mixed forms.

mod block;
mod forms;
mod sparse;

use thiserror::Error;

use crate::elements::{ElementError, Family};
use crate::mesh::GeometryError;
use crate::quadrature::QuadratureError;

pub use block::{
    assemble_lagrange_system, assemble_mixed_system, build_block_system, BlockSystem, ProblemSpec, ScalarField,
    VectorField,
};
pub use forms::{
    apply_essential_bc, assemble_boundary_flux, assemble_diffusion, assemble_divergence, assemble_load,
    assemble_vector_load, assemble_vector_mass,
};
pub(crate) use forms::for_each_element;
pub use sparse::{SparseMatrix, TripletBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("expected a {expected} space, got {found:?} with {vdim} component(s)")]
    WrongSpace { expected: &'static str, found: Family, vdim: usize },
    #[error("spaces are defined on different meshes")]
    MeshMismatch,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("DOF {dof} out of range for {ndofs} DOFs")]
    DofOutOfRange { dof: usize, ndofs: usize },
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}
