//! Reference shape functions and global finite element spaces.

mod poly;
mod reference_element;
mod space;

use thiserror::Error;

use crate::mesh::{GeometryError, Mat2};
use crate::reference::Geometry;
use crate::solvers::SolverError;
use crate::Point;

pub use reference_element::{DofEntity, Functional, ReferenceElement, ScalarBasis, VectorBasis};
pub use space::{build_space, FESpace};

/// Highest H1 order the element tables are built for.
pub const MAX_H1_ORDER: usize = 10;
/// Highest L2 / Raviart-Thomas order.
pub const MAX_DISCONTINUOUS_ORDER: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Continuous nodal Lagrange, order ≥ 1.
    H1Lagrange,
    /// Discontinuous nodal, order ≥ 0.
    L2Disc,
    /// Raviart-Thomas H(div), order ≥ 0 (RT_0 is the lowest order).
    RaviartThomas,
}

impl Family {
    pub fn is_vector(self) -> bool {
        self == Family::RaviartThomas
    }

    fn check_order(self, order: usize) -> Result<(), ElementError> {
        let ok = match self {
            Family::H1Lagrange => (1..=MAX_H1_ORDER).contains(&order),
            _ => order <= MAX_DISCONTINUOUS_ORDER,
        };
        if ok {
            Ok(())
        } else {
            Err(ElementError::UnsupportedOrder { family: self, order })
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElementError {
    #[error("{family:?} elements of order {order} are not supported")]
    UnsupportedOrder { family: Family, order: usize },
    #[error("no finite elements on {0:?} cells")]
    UnsupportedGeometry(Geometry),
    #[error("point ({}, {}) lies outside the reference cell", .0[0], .0[1])]
    PointOutside(Point),
    #[error("operation needs a {expected} space, got {found:?}")]
    WrongFamily { expected: &'static str, found: Family },
    #[error("local DOF {0} does not exist")]
    NoSuchDof(usize),
    #[error("vector dimension {vdim} is not available for {family:?}")]
    Vdim { family: Family, vdim: usize },
    #[error("dual basis construction failed: {0}")]
    Vandermonde(SolverError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Contravariant Piola transform `v = J v̂ / det J`.
pub fn piola_map(jacobian: &Mat2, reference: [f64; 2]) -> Result<[f64; 2], ElementError> {
    let det = checked_det(jacobian)?;
    let v = jacobian.mul_vec(reference);
    Ok([v[0] / det, v[1] / det])
}

/// Divergence under the Piola transform: `div v = div̂ v̂ / det J`.
pub fn piola_divergence(jacobian: &Mat2, reference_div: f64) -> Result<f64, ElementError> {
    Ok(reference_div / checked_det(jacobian)?)
}

fn checked_det(jacobian: &Mat2) -> Result<f64, ElementError> {
    let det = jacobian.det();
    let scale = jacobian.0.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    if !(det.abs() > 1e-14 * scale * scale) {
        return Err(GeometryError::Singular(det).into());
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piola_identity() {
        assert_eq!(piola_map(&Mat2::IDENTITY, [0.3, -0.7]).unwrap(), [0.3, -0.7]);
    }

    #[test]
    fn piola_scaling() {
        let j = Mat2([[2.0, 0.0], [0.0, 2.0]]);
        assert_eq!(piola_map(&j, [1.0, 0.5]).unwrap(), [0.5, 0.25]);
        assert_eq!(piola_divergence(&j, 2.0).unwrap(), 0.5);
    }

    #[test]
    fn piola_singular() {
        let j = Mat2([[1.0, 2.0], [2.0, 4.0]]);
        assert!(matches!(piola_map(&j, [1.0, 0.0]), Err(ElementError::Geometry(_))));
    }
}
