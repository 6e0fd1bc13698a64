use super::{GridFunction, PostprocessError};
use crate::assembly::for_each_element;
use crate::mesh::Mesh;
use crate::quadrature::{required_order, rule_for_geometry};
use crate::Point;

/// `‖gf − exact‖_{L²}` for a scalar function.
pub fn compute_l2_error(
    gf: &GridFunction,
    exact: &dyn Fn(Point) -> f64,
    accuracy: usize,
) -> Result<f64, PostprocessError> {
    let mut sum = 0.0;
    for_each_element(gf.space(), accuracy, |e, geo, qps| {
        for qp in qps {
            let d = gf.eval_scalar_on(geo, e, qp.reference)? - exact(qp.physical);
            sum += qp.weight * d * d;
        }
        Ok::<(), PostprocessError>(())
    })?;
    Ok(sum.sqrt())
}

/// `‖gf − exact‖_{L²}` for a vector function (both components).
pub fn compute_vector_l2_error(
    gf: &GridFunction,
    exact: &dyn Fn(Point) -> [f64; 2],
    accuracy: usize,
) -> Result<f64, PostprocessError> {
    let mut sum = 0.0;
    for_each_element(gf.space(), accuracy, |e, geo, qps| {
        for qp in qps {
            let v = gf.eval_vector_on(geo, e, qp.reference)?;
            let x = exact(qp.physical);
            sum += qp.weight * ((v[0] - x[0]).powi(2) + (v[1] - x[1]).powi(2));
        }
        Ok::<(), PostprocessError>(())
    })?;
    Ok(sum.sqrt())
}

fn mesh_integral(mesh: &Mesh, accuracy: usize, f: &dyn Fn(Point) -> f64) -> Result<f64, PostprocessError> {
    let mut sum = 0.0;
    for e in 0..mesh.num_elements() {
        let geo = mesh.element_geometry(e)?;
        let rule = rule_for_geometry(geo.kind(), accuracy)?;
        for (p, w) in rule.iter() {
            sum += w * geo.det_jacobian(p) * f(geo.map(p));
        }
    }
    Ok(sum)
}

/// `‖f‖_{L²}` over the mesh with the given quadrature accuracy.
pub fn l2_norm(mesh: &Mesh, f: &dyn Fn(Point) -> f64, accuracy: usize) -> Result<f64, PostprocessError> {
    Ok(mesh_integral(mesh, accuracy, &|p| f(p).powi(2))?.sqrt())
}

pub fn vector_l2_norm(mesh: &Mesh, f: &dyn Fn(Point) -> [f64; 2], accuracy: usize) -> Result<f64, PostprocessError> {
    Ok(mesh_integral(mesh, accuracy, &|p| {
        let v = f(p);
        v[0] * v[0] + v[1] * v[1]
    })?
    .sqrt())
}

/// `sqrt(err_x² + err_y²)`.
pub fn combine_velocity_error(err_x: f64, err_y: f64) -> f64 {
    err_x.hypot(err_y)
}

/// [`combine_velocity_error`] divided by the reference velocity norm.
pub fn normalized_velocity_error(err_x: f64, err_y: f64, reference_norm: f64) -> Result<f64, PostprocessError> {
    if reference_norm == 0.0 {
        return Err(PostprocessError::ZeroNorm);
    }
    Ok(combine_velocity_error(err_x, err_y) / reference_norm)
}

/// `‖a − b‖_{L²}` for functions on the same mesh, possibly in different
/// spaces, integrated at the larger of the two spaces' required accuracies.
pub fn comparison_error(a: &GridFunction, b: &GridFunction) -> Result<f64, PostprocessError> {
    let accuracy = required_order(a.space().polynomial_degree().max(b.space().polynomial_degree()));
    comparison_error_with_accuracy(a, b, accuracy)
}

pub fn comparison_error_with_accuracy(
    a: &GridFunction,
    b: &GridFunction,
    accuracy: usize,
) -> Result<f64, PostprocessError> {
    if !a.space().same_mesh(b.space()) {
        return Err(PostprocessError::MeshMismatch);
    }
    if a.components() != b.components() {
        return Err(PostprocessError::ComponentMismatch(a.components(), b.components()));
    }
    let mut sum = 0.0;
    for_each_element(a.space(), accuracy, |e, geo, qps| {
        for qp in qps {
            let va = a.eval_on(geo, e, qp.reference)?;
            let vb = b.eval_on(geo, e, qp.reference)?;
            sum += qp.weight * va.iter().zip(&vb).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
        }
        Ok::<(), PostprocessError>(())
    })?;
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::elements::{build_space, Family};
    use crate::reference::Geometry;

    #[test]
    fn norm_of_constant_is_root_area() {
        let mesh = Mesh::rectangle([0.0, 0.0], [2.0, 3.0], 3, 2, Geometry::Triangle).unwrap();
        let n = l2_norm(&mesh, &|_| 1.0, 2).unwrap();
        assert!((n - 6.0_f64.sqrt()).abs() < 1e-13);
        let v = vector_l2_norm(&mesh, &|_| [3.0, 4.0], 2).unwrap();
        assert!((v - 5.0 * 6.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn comparison_of_equal_fields_is_zero() {
        let mesh = Arc::new(Mesh::unit_square(2, 2, Geometry::Quad).unwrap());
        let h1 = Arc::new(build_space(mesh.clone(), Family::H1Lagrange, 1, 1).unwrap());
        let l2 = Arc::new(build_space(mesh, Family::L2Disc, 1, 1).unwrap());
        let f = |p: Point| p[0] - 3.0 * p[1];
        let a = GridFunction::interpolate(h1, &f).unwrap();
        let b = GridFunction::interpolate(l2, &f).unwrap();
        assert!(comparison_error(&a, &b).unwrap() < 1e-13);
        assert!(compute_l2_error(&a, &f, 4).unwrap() < 1e-13);
    }

    #[test]
    fn velocity_combination() {
        assert_eq!(combine_velocity_error(3.0, 4.0), 5.0);
        assert_eq!(normalized_velocity_error(3.0, 4.0, 2.0).unwrap(), 2.5);
        assert!(matches!(normalized_velocity_error(1.0, 1.0, 0.0), Err(PostprocessError::ZeroNorm)));
    }
}
