use std::sync::Arc;

use super::{GridFunction, PostprocessError};
use crate::elements::{FESpace, Family};
use crate::mesh::ElementGeometry;
use crate::quadrature::{gauss_legendre_unit, rule_for_geometry};
use crate::reference::Geometry;
use crate::solvers::{DenseMatrix, Lu};
use crate::Point;

/// How a field is transferred into a discontinuous space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProjectionKind {
    /// Elementwise L2 projection.
    L2,
    /// Interpolation at the tensor Gauss-Legendre points of each quad
    /// (order + 1 per direction). Triangles fall back to [`ProjectionKind::L2`].
    #[default]
    GaussInterpolation,
}

/// `(ux, uy) = −∇p` transferred into `l2`, which must have order `k − 1`
/// for an order-`k` pressure.
pub fn recover_gradient(
    pressure: &GridFunction,
    l2: &Arc<FESpace>,
    kind: ProjectionKind,
) -> Result<(GridFunction, GridFunction), PostprocessError> {
    let source = pressure.space();
    if source.family() != Family::H1Lagrange || source.vdim() != 1 {
        return Err(PostprocessError::WrongSpace("gradient recovery needs an H1 pressure"));
    }
    if l2.order() + 1 != source.order() {
        return Err(PostprocessError::OrderMismatch { expected: source.order() - 1, got: l2.order() });
    }
    project_components(l2, source, kind, |e, geo, p| {
        let g = pressure.eval_gradient_on(geo, e, p)?;
        Ok([-g[0], -g[1]])
    })
}

/// Cartesian components of a Piola-mapped Raviart-Thomas field, transferred into `l2`.
pub fn project_rt_components(
    velocity: &GridFunction,
    l2: &Arc<FESpace>,
    kind: ProjectionKind,
) -> Result<(GridFunction, GridFunction), PostprocessError> {
    let source = velocity.space();
    if source.family() != Family::RaviartThomas {
        return Err(PostprocessError::WrongSpace("component extraction needs a Raviart-Thomas field"));
    }
    project_components(l2, source, kind, |e, geo, p| velocity.eval_vector_on(geo, e, p))
}

fn project_components(
    target: &Arc<FESpace>,
    source: &FESpace,
    kind: ProjectionKind,
    field: impl Fn(usize, &ElementGeometry, Point) -> Result<[f64; 2], PostprocessError>,
) -> Result<(GridFunction, GridFunction), PostprocessError> {
    if target.family() != Family::L2Disc || target.vdim() != 1 {
        return Err(PostprocessError::WrongSpace("components are stored in a scalar L2 space"));
    }
    if !target.same_mesh(source) {
        return Err(PostprocessError::MeshMismatch);
    }
    let mesh = target.mesh();
    let mut ux = vec![0.0; target.ndofs()];
    let mut uy = vec![0.0; target.ndofs()];
    let accuracy = 2 * target.polynomial_degree().max(source.polynomial_degree()) + 2;
    let mut interpolation: Option<(Vec<Point>, Lu)> = None;

    for e in 0..mesh.num_elements() {
        let geo = mesh.element_geometry(e)?;
        let reference = target.element_reference(e);
        let n = reference.ndofs();
        let (cx, cy) = if kind == ProjectionKind::GaussInterpolation && geo.kind() == Geometry::Quad {
            if interpolation.is_none() {
                let (t, _) = gauss_legendre_unit(target.order() + 1)?;
                let points: Vec<Point> = t.iter().flat_map(|&y| t.iter().map(move |&x| [x, y])).collect();
                let mut v = DenseMatrix::zeros(n, n);
                for (q, &p) in points.iter().enumerate() {
                    let b = reference.eval_scalar_basis(p)?;
                    for j in 0..n {
                        v[(q, j)] = b.values[j];
                    }
                }
                interpolation = Some((points, v.lu()?));
            }
            let (points, lu) = interpolation.as_ref().expect("built above");
            let mut fx = Vec::with_capacity(n);
            let mut fy = Vec::with_capacity(n);
            for &p in points {
                let f = field(e, &geo, p)?;
                fx.push(f[0]);
                fy.push(f[1]);
            }
            (lu.solve(&fx), lu.solve(&fy))
        } else {
            let rule = rule_for_geometry(geo.kind(), accuracy)?;
            let mut mass = DenseMatrix::zeros(n, n);
            let mut rx = vec![0.0; n];
            let mut ry = vec![0.0; n];
            for (p, w) in rule.iter() {
                let wd = w * geo.det_jacobian(p);
                let b = reference.eval_scalar_basis(p)?;
                let f = field(e, &geo, p)?;
                for i in 0..n {
                    rx[i] += wd * f[0] * b.values[i];
                    ry[i] += wd * f[1] * b.values[i];
                    for j in 0..n {
                        mass[(i, j)] += wd * b.values[i] * b.values[j];
                    }
                }
            }
            let lu = mass.lu()?;
            (lu.solve(&rx), lu.solve(&ry))
        };
        for (i, &d) in target.element_dofs(e).iter().enumerate() {
            ux[d] = cx[i];
            uy[d] = cy[i];
        }
    }
    Ok((GridFunction::new(target.clone(), ux)?, GridFunction::new(target.clone(), uy)?))
}
