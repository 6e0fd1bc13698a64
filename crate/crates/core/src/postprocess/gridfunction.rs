use std::sync::Arc;

use super::PostprocessError;
use crate::elements::{FESpace, Family};
use crate::mesh::ElementGeometry;
use crate::Point;

/// A finite element function: a coefficient vector over a space.
#[derive(Clone, Debug)]
pub struct GridFunction {
    space: Arc<FESpace>,
    coeffs: Vec<f64>,
}

impl GridFunction {
    pub fn new(space: Arc<FESpace>, coeffs: Vec<f64>) -> Result<Self, PostprocessError> {
        if coeffs.len() != space.ndofs() {
            return Err(PostprocessError::CoefficientLength { expected: space.ndofs(), got: coeffs.len() });
        }
        Ok(GridFunction { space, coeffs })
    }

    pub fn zeros(space: Arc<FESpace>) -> Self {
        let n = space.ndofs();
        GridFunction { space, coeffs: vec![0.0; n] }
    }

    /// Nodal interpolant of `f` in a scalar H1 or L2 space.
    pub fn interpolate(space: Arc<FESpace>, f: &dyn Fn(Point) -> f64) -> Result<Self, PostprocessError> {
        if space.family().is_vector() || space.vdim() != 1 {
            return Err(PostprocessError::WrongSpace("interpolation needs a scalar space"));
        }
        let mut coeffs = vec![0.0; space.ndofs()];
        let mesh = space.mesh();
        for e in 0..mesh.num_elements() {
            let geo = mesh.element_geometry(e)?;
            let nodes = space.element_reference(e).nodes();
            for (d, node) in space.element_dofs(e).iter().zip(nodes) {
                coeffs[*d] = f(geo.map(node));
            }
        }
        Ok(GridFunction { space, coeffs })
    }

    pub fn space(&self) -> &Arc<FESpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn scale(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= s);
    }

    /// Number of components of the represented field.
    pub fn components(&self) -> usize {
        if self.space.family().is_vector() {
            2
        } else {
            self.space.vdim()
        }
    }

    fn check_element(&self, element: usize) -> Result<ElementGeometry, PostprocessError> {
        Ok(self.space.mesh().element_geometry(element)?)
    }

    /// Scalar value at reference point `p` of `element`.
    pub fn eval_scalar(&self, element: usize, p: Point) -> Result<f64, PostprocessError> {
        let geo = self.check_element(element)?;
        self.eval_scalar_on(&geo, element, p)
    }

    /// Vector value (Raviart-Thomas or two-component scalar space).
    pub fn eval_vector(&self, element: usize, p: Point) -> Result<[f64; 2], PostprocessError> {
        let geo = self.check_element(element)?;
        self.eval_vector_on(&geo, element, p)
    }

    /// Physical gradient of a scalar function.
    pub fn eval_gradient(&self, element: usize, p: Point) -> Result<[f64; 2], PostprocessError> {
        let geo = self.check_element(element)?;
        self.eval_gradient_on(&geo, element, p)
    }

    /// All components at a point (length 1 or 2).
    pub fn eval(&self, element: usize, p: Point) -> Result<Vec<f64>, PostprocessError> {
        let geo = self.check_element(element)?;
        self.eval_on(&geo, element, p)
    }

    pub(crate) fn eval_on(&self, geo: &ElementGeometry, element: usize, p: Point) -> Result<Vec<f64>, PostprocessError> {
        if self.components() == 1 {
            Ok(vec![self.eval_scalar_on(geo, element, p)?])
        } else {
            Ok(self.eval_vector_on(geo, element, p)?.to_vec())
        }
    }

    pub(crate) fn eval_scalar_on(&self, _geo: &ElementGeometry, element: usize, p: Point) -> Result<f64, PostprocessError> {
        if self.components() != 1 {
            return Err(PostprocessError::WrongSpace("scalar evaluation of a vector field"));
        }
        let b = self.space.element_reference(element).eval_scalar_basis(p)?;
        Ok(self
            .space
            .element_dofs(element)
            .iter()
            .zip(&b.values)
            .map(|(d, v)| self.coeffs[*d] * v)
            .sum())
    }

    pub(crate) fn eval_vector_on(&self, geo: &ElementGeometry, element: usize, p: Point) -> Result<[f64; 2], PostprocessError> {
        let dofs = self.space.element_dofs(element);
        match (self.space.family(), self.space.vdim()) {
            (Family::RaviartThomas, _) => {
                let (vals, _) = self.space.physical_vector_basis(geo, element, p)?;
                let mut out = [0.0; 2];
                for (d, v) in dofs.iter().zip(&vals) {
                    out[0] += self.coeffs[*d] * v[0];
                    out[1] += self.coeffs[*d] * v[1];
                }
                Ok(out)
            }
            (_, 2) => {
                let b = self.space.element_reference(element).eval_scalar_basis(p)?;
                let mut out = [0.0; 2];
                for (d, v) in dofs.iter().zip(&b.values) {
                    out[0] += self.coeffs[self.space.component_dof(*d, 0)] * v;
                    out[1] += self.coeffs[self.space.component_dof(*d, 1)] * v;
                }
                Ok(out)
            }
            _ => Err(PostprocessError::WrongSpace("vector evaluation of a scalar field")),
        }
    }

    pub(crate) fn eval_gradient_on(&self, geo: &ElementGeometry, element: usize, p: Point) -> Result<[f64; 2], PostprocessError> {
        if self.components() != 1 {
            return Err(PostprocessError::WrongSpace("gradient of a vector field"));
        }
        let (_, grads) = self.space.physical_scalar_basis(geo, element, p)?;
        let mut out = [0.0; 2];
        for (d, g) in self.space.element_dofs(element).iter().zip(&grads) {
            out[0] += self.coeffs[*d] * g[0];
            out[1] += self.coeffs[*d] * g[1];
        }
        Ok(out)
    }

    /// Divergence of a Raviart-Thomas function.
    pub fn eval_divergence(&self, element: usize, p: Point) -> Result<f64, PostprocessError> {
        if self.space.family() != Family::RaviartThomas {
            return Err(PostprocessError::WrongSpace("divergence needs a Raviart-Thomas field"));
        }
        let geo = self.check_element(element)?;
        let (_, divs) = self.space.physical_vector_basis(&geo, element, p)?;
        Ok(self.space.element_dofs(element).iter().zip(&divs).map(|(d, v)| self.coeffs[*d] * v).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::build_space;
    use crate::mesh::Mesh;
    use crate::reference::Geometry;

    fn space(kind: Geometry, family: Family, order: usize) -> Arc<FESpace> {
        let mesh = Arc::new(Mesh::unit_square(2, 3, kind).unwrap());
        Arc::new(build_space(mesh, family, order, 1).unwrap())
    }

    #[test]
    fn interpolant_reproduces_polynomials() {
        let f = |p: Point| 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[0] * p[1];
        for kind in [Geometry::Quad, Geometry::Triangle] {
            let order = if kind == Geometry::Quad { 1 } else { 2 };
            let gf = GridFunction::interpolate(space(kind, Family::H1Lagrange, order), &f).unwrap();
            let mesh = gf.space().mesh();
            for e in 0..mesh.num_elements() {
                let geo = mesh.element_geometry(e).unwrap();
                for p in [kind.center(), [0.2, 0.1]] {
                    let x = geo.map(p);
                    assert!((gf.eval_scalar(e, p).unwrap() - f(x)).abs() < 1e-12);
                    let g = gf.eval_gradient(e, p).unwrap();
                    assert!((g[0] - (2.0 + 0.5 * x[1])).abs() < 1e-12);
                    assert!((g[1] - (-1.0 + 0.5 * x[0])).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn coefficient_length_is_checked() {
        let s = space(Geometry::Quad, Family::L2Disc, 1);
        assert!(GridFunction::new(s.clone(), vec![0.0; 3]).is_err());
        let mut gf = GridFunction::new(s.clone(), vec![1.0; s.ndofs()]).unwrap();
        gf.scale(-2.0);
        assert!(gf.coeffs().iter().all(|&c| c == -2.0));
        assert_eq!(gf.components(), 1);
    }

    #[test]
    fn rt_interpolation_is_refused() {
        let s = space(Geometry::Quad, Family::RaviartThomas, 0);
        assert!(GridFunction::interpolate(s.clone(), &|_| 0.0).is_err());
        assert_eq!(GridFunction::zeros(s).components(), 2);
    }
}
