//! Lagrange and Raviart-Thomas mixed finite elements for the 2D Poisson
//! problem, plus a mesh-refinement study harness.

pub mod assembly;
pub mod elements;
mod error;
pub mod experiment;
pub mod mesh;
pub mod postprocess;
pub mod quadrature;
pub mod reference;
pub mod solvers;

pub use error::Error;

/// A point in reference or physical coordinates.
pub type Point = [f64; 2];
