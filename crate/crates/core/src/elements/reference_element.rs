use super::poly::{
    dubiner, lagrange_1d, scalar_exponents, tensor_exponents, Exponents, PrimalTable, VectorPrimal,
};
use super::{ElementError, Family};
use crate::quadrature::{gauss_legendre_unit, rule_for_geometry};
use crate::reference::Geometry;
use crate::solvers::DenseMatrix;
use crate::Point;

/// Tolerance for "inside the reference cell" checks on evaluation points.
const INSIDE_TOL: f64 = 1e-12;

/// Topological entity a local DOF is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofEntity {
    Vertex(usize),
    /// Local edge and position of the DOF along it (in local edge direction).
    Edge { edge: usize, index: usize },
    Interior,
}

/// Degree-of-freedom functional on the reference cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Functional {
    /// Point evaluation (H1 and L2 nodes).
    Point(Point),
    /// `∫ (v · ñ) ℓ_m(t) dt` over a local edge, where `ñ` is the outward
    /// normal scaled by the edge length and `ℓ_m` is the Lagrange polynomial
    /// of the m-th Gauss point on the edge.
    EdgeFlux { edge: usize, node: usize },
    /// `∫ v_c · L_a(ξ) L_b(η)` over the cell for component `c` on quads;
    /// the Dubiner polynomial `ψ_ab` replaces `L_a L_b` on triangles.
    Moment { component: usize, exponents: [usize; 2] },
}

/// Values and reference gradients of every local scalar basis function.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarBasis {
    pub values: Vec<f64>,
    pub gradients: Vec<[f64; 2]>,
}

/// Reference values and reference divergences of every local H(div) basis function.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorBasis {
    pub values: Vec<[f64; 2]>,
    pub divergences: Vec<f64>,
}

/// A finite element on a reference cell, built as the dual basis of its
/// DOF functionals over a primal polynomial space.
///
/// Local ordering: vertex DOFs, then edge DOFs edge by edge (each edge in
/// its local direction), then interior DOFs.
#[derive(Clone, Debug)]
pub struct ReferenceElement {
    family: Family,
    order: usize,
    geometry: Geometry,
    entities: Vec<DofEntity>,
    functionals: Vec<Functional>,
    scalar_primal: Vec<Exponents>,
    vector_primal: Vec<VectorPrimal>,
    legendre_degree: usize,
    /// `coeffs[(j, m)]`: weight of primal function j in basis function m.
    coeffs: DenseMatrix,
    edge_nodes: Vec<f64>,
    per_vertex: usize,
    per_edge: usize,
    interior: usize,
}

impl ReferenceElement {
    pub fn new(family: Family, order: usize, geometry: Geometry) -> Result<Self, ElementError> {
        family.check_order(order)?;
        if geometry == Geometry::Segment {
            return Err(ElementError::UnsupportedGeometry(geometry));
        }
        let k = order;
        let tri = geometry == Geometry::Triangle;
        let mut entities = Vec::new();
        let mut functionals = Vec::new();
        let mut scalar_primal = Vec::new();
        let mut vector_primal = Vec::new();
        let mut edge_nodes = Vec::new();
        let legendre_degree;
        let (per_vertex, per_edge);

        match family {
            Family::H1Lagrange => {
                let kf = k as f64;
                for (i, &v) in geometry.vertices().iter().enumerate() {
                    entities.push(DofEntity::Vertex(i));
                    functionals.push(Functional::Point(v));
                }
                for e in 0..geometry.num_edges() {
                    for j in 1..k {
                        entities.push(DofEntity::Edge { edge: e, index: j - 1 });
                        functionals.push(Functional::Point(geometry.edge_point(e, j as f64 / kf)));
                    }
                }
                for j in 1..k {
                    for i in 1..k {
                        if !tri || i + j < k {
                            entities.push(DofEntity::Interior);
                            functionals.push(Functional::Point([i as f64 / kf, j as f64 / kf]));
                        }
                    }
                }
                scalar_primal = scalar_exponents(k, tri);
                legendre_degree = k;
                per_vertex = 1;
                per_edge = k - 1;
            }
            Family::L2Disc => {
                if k == 0 {
                    entities.push(DofEntity::Interior);
                    functionals.push(Functional::Point(geometry.center()));
                } else {
                    let kf = k as f64;
                    for j in 0..=k {
                        for i in 0..=k {
                            if !tri || i + j <= k {
                                entities.push(DofEntity::Interior);
                                functionals.push(Functional::Point([i as f64 / kf, j as f64 / kf]));
                            }
                        }
                    }
                }
                scalar_primal = scalar_exponents(k, tri);
                legendre_degree = k;
                per_vertex = 0;
                per_edge = 0;
            }
            Family::RaviartThomas => {
                edge_nodes = gauss_legendre_unit(k + 1)
                    .map_err(|_| ElementError::UnsupportedOrder { family, order })?
                    .0;
                for e in 0..geometry.num_edges() {
                    for m in 0..=k {
                        entities.push(DofEntity::Edge { edge: e, index: m });
                        functionals.push(Functional::EdgeFlux { edge: e, node: m });
                    }
                }
                let (test_x, test_y) = if tri {
                    let p = if k == 0 { Vec::new() } else { scalar_exponents(k - 1, true) };
                    (p.clone(), p)
                } else if k == 0 {
                    (Vec::new(), Vec::new())
                } else {
                    (tensor_exponents(k - 1, k), tensor_exponents(k, k - 1))
                };
                for (component, list) in [(0, test_x), (1, test_y)] {
                    for exponents in list {
                        entities.push(DofEntity::Interior);
                        functionals.push(Functional::Moment { component, exponents });
                    }
                }
                if tri {
                    let p = scalar_exponents(k, true);
                    vector_primal.extend(p.iter().map(|&e| VectorPrimal::X(e)));
                    vector_primal.extend(p.iter().map(|&e| VectorPrimal::Y(e)));
                    vector_primal.extend((0..=k).map(|a| VectorPrimal::Radial([a, k - a])));
                    legendre_degree = k;
                } else {
                    vector_primal.extend(tensor_exponents(k + 1, k).into_iter().map(VectorPrimal::X));
                    vector_primal.extend(tensor_exponents(k, k + 1).into_iter().map(VectorPrimal::Y));
                    legendre_degree = k + 1;
                }
                per_vertex = 0;
                per_edge = k + 1;
            }
        }

        let n = functionals.len();
        let primal_count = scalar_primal.len() + vector_primal.len();
        debug_assert_eq!(n, primal_count, "{family:?} {order} {geometry:?}");
        let interior = n - per_vertex * geometry.num_vertices() - per_edge * geometry.num_edges();

        let mut el = ReferenceElement {
            family,
            order,
            geometry,
            entities,
            functionals,
            scalar_primal,
            vector_primal,
            legendre_degree,
            coeffs: DenseMatrix::identity(n),
            edge_nodes,
            per_vertex,
            per_edge,
            interior,
        };

        // Generalized Vandermonde V[i][j] = functional_i(primal_j); the dual basis is V^{-1}.
        let mut vandermonde = DenseMatrix::zeros(n, n);
        for i in 0..n {
            let row: Vec<f64> = if family.is_vector() {
                el.apply_to_primal_vector(i)
            } else {
                el.apply_to_primal_scalar(i)
            };
            for (j, v) in row.into_iter().enumerate() {
                vandermonde[(i, j)] = v;
            }
        }
        el.coeffs = vandermonde.inverse().map_err(ElementError::Vandermonde)?;
        Ok(el)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn ndofs(&self) -> usize {
        self.functionals.len()
    }

    /// Highest polynomial degree per coordinate direction of the local space.
    pub fn polynomial_degree(&self) -> usize {
        match self.family {
            Family::RaviartThomas => self.order + 1,
            _ => self.order,
        }
    }

    pub fn dofs_per_vertex(&self) -> usize {
        self.per_vertex
    }

    pub fn dofs_per_edge(&self) -> usize {
        self.per_edge
    }

    pub fn interior_dofs(&self) -> usize {
        self.interior
    }

    pub fn entities(&self) -> &[DofEntity] {
        &self.entities
    }

    pub fn functionals(&self) -> &[Functional] {
        &self.functionals
    }

    /// Gauss points on `[0, 1]` that define the edge flux moments.
    pub fn edge_nodes(&self) -> &[f64] {
        &self.edge_nodes
    }

    /// Nodal points for point-evaluation DOFs (H1 and L2 families).
    pub fn nodes(&self) -> Vec<Point> {
        self.functionals
            .iter()
            .filter_map(|f| match f {
                Functional::Point(p) => Some(*p),
                _ => None,
            })
            .collect()
    }

    fn check_point(&self, p: Point) -> Result<(), ElementError> {
        if self.geometry.contains(p, INSIDE_TOL) {
            Ok(())
        } else {
            Err(ElementError::PointOutside(p))
        }
    }

    pub fn eval_scalar_basis(&self, p: Point) -> Result<ScalarBasis, ElementError> {
        if self.family.is_vector() {
            return Err(ElementError::WrongFamily { expected: "scalar", found: self.family });
        }
        self.check_point(p)?;
        Ok(self.scalar_basis_unchecked(p))
    }

    pub fn eval_rt_basis(&self, p: Point) -> Result<VectorBasis, ElementError> {
        if !self.family.is_vector() {
            return Err(ElementError::WrongFamily { expected: "H(div)", found: self.family });
        }
        self.check_point(p)?;
        Ok(self.vector_basis_unchecked(p))
    }

    pub(crate) fn scalar_basis_unchecked(&self, p: Point) -> ScalarBasis {
        let n = self.ndofs();
        let table = PrimalTable::new(self.legendre_degree, p, self.geometry == Geometry::Triangle);
        let mut values = vec![0.0; n];
        let mut gradients = vec![[0.0; 2]; n];
        for (j, &e) in self.scalar_primal.iter().enumerate() {
            let (v, g) = table.scalar(e);
            let row = self.coeffs.row(j);
            for m in 0..n {
                values[m] += row[m] * v;
                gradients[m][0] += row[m] * g[0];
                gradients[m][1] += row[m] * g[1];
            }
        }
        ScalarBasis { values, gradients }
    }

    pub(crate) fn vector_basis_unchecked(&self, p: Point) -> VectorBasis {
        let n = self.ndofs();
        let table = PrimalTable::new(self.legendre_degree, p, self.geometry == Geometry::Triangle);
        let mut values = vec![[0.0; 2]; n];
        let mut divergences = vec![0.0; n];
        for (j, &f) in self.vector_primal.iter().enumerate() {
            let (v, d) = table.vector(f);
            let row = self.coeffs.row(j);
            for m in 0..n {
                values[m][0] += row[m] * v[0];
                values[m][1] += row[m] * v[1];
                divergences[m] += row[m] * d;
            }
        }
        VectorBasis { values, divergences }
    }

    /// Applies scalar DOF functional `i` (a point evaluation) to `f`.
    pub fn apply_scalar_functional(&self, i: usize, f: &dyn Fn(Point) -> f64) -> Result<f64, ElementError> {
        match self.functionals.get(i) {
            Some(Functional::Point(p)) => Ok(f(*p)),
            Some(_) => Err(ElementError::WrongFamily { expected: "scalar", found: self.family }),
            None => Err(ElementError::NoSuchDof(i)),
        }
    }

    /// Applies H(div) DOF functional `i` (edge flux or interior moment) to `f`.
    pub fn apply_vector_functional(
        &self,
        i: usize,
        f: &dyn Fn(Point) -> [f64; 2],
    ) -> Result<f64, ElementError> {
        let k = self.order;
        match self.functionals.get(i) {
            Some(&Functional::EdgeFlux { edge, node }) => {
                let (t, w) = gauss_legendre_unit(k + 2).expect("supported order");
                let normal = self.geometry.scaled_edge_normal(edge);
                Ok(t.iter()
                    .zip(&w)
                    .map(|(&t, &w)| {
                        let v = f(self.geometry.edge_point(edge, t));
                        w * (v[0] * normal[0] + v[1] * normal[1]) * lagrange_1d(&self.edge_nodes, node, t)
                    })
                    .sum())
            }
            Some(&Functional::Moment { component, exponents }) => {
                let rule = rule_for_geometry(self.geometry, 2 * k + 2).expect("supported order");
                Ok(rule
                    .iter()
                    .map(|(p, w)| {
                        w * f(p)[component] * self.moment_weight(exponents, p)
                    })
                    .sum())
            }
            Some(Functional::Point(_)) => {
                Err(ElementError::WrongFamily { expected: "H(div)", found: self.family })
            }
            None => Err(ElementError::NoSuchDof(i)),
        }
    }

    /// Test function of an interior moment: Legendre products on quads,
    /// Dubiner polynomials on triangles.
    fn moment_weight(&self, exponents: [usize; 2], p: Point) -> f64 {
        match self.geometry {
            Geometry::Triangle => dubiner(exponents, p),
            _ => PrimalTable::new(self.order + 1, p, false).scalar(exponents).0,
        }
    }

    fn apply_to_primal_scalar(&self, i: usize) -> Vec<f64> {
        let Functional::Point(p) = self.functionals[i] else { unreachable!() };
        let table = PrimalTable::new(self.legendre_degree, p, self.geometry == Geometry::Triangle);
        self.scalar_primal.iter().map(|&e| table.scalar(e).0).collect()
    }

    fn apply_to_primal_vector(&self, i: usize) -> Vec<f64> {
        self.vector_primal
            .iter()
            .map(|&f| {
                let (deg, tri) = (self.legendre_degree, self.geometry == Geometry::Triangle);
                self.apply_vector_functional(i, &|p| PrimalTable::new(deg, p, tri).vector(f).0)
                    .expect("vector functional")
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn q1_corner_values() {
        let el = ReferenceElement::new(Family::H1Lagrange, 1, Geometry::Quad).unwrap();
        let b = el.eval_scalar_basis([0.0, 0.0]).unwrap();
        for (i, v) in b.values.iter().enumerate() {
            assert!(close(*v, if i == 0 { 1.0 } else { 0.0 }, 1e-14));
        }
    }

    #[test]
    fn q2_center_node() {
        let el = ReferenceElement::new(Family::H1Lagrange, 2, Geometry::Quad).unwrap();
        assert_eq!(el.ndofs(), 9);
        assert_eq!(el.entities()[8], DofEntity::Interior);
        let b = el.eval_scalar_basis([0.5, 0.5]).unwrap();
        for (i, v) in b.values.iter().enumerate() {
            assert!(close(*v, if i == 8 { 1.0 } else { 0.0 }, 1e-14), "{i}: {v}");
        }
    }

    #[test]
    fn partition_of_unity() {
        for geometry in [Geometry::Triangle, Geometry::Quad] {
            for k in 1..=6 {
                let el = ReferenceElement::new(Family::H1Lagrange, k, geometry).unwrap();
                for p in [[0.1, 0.2], [0.3, 0.3], [0.0, 0.7]] {
                    let b = el.eval_scalar_basis(p).unwrap();
                    assert!(close(b.values.iter().sum(), 1.0, 1e-12));
                    let gx: f64 = b.gradients.iter().map(|g| g[0]).sum();
                    let gy: f64 = b.gradients.iter().map(|g| g[1]).sum();
                    assert!(gx.abs() < 1e-10 && gy.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn dimensions() {
        for k in 0..=4 {
            let t = ReferenceElement::new(Family::RaviartThomas, k, Geometry::Triangle).unwrap();
            assert_eq!(t.ndofs(), (k + 1) * (k + 3));
            let q = ReferenceElement::new(Family::RaviartThomas, k, Geometry::Quad).unwrap();
            assert_eq!(q.ndofs(), 2 * (k + 1) * (k + 2));
            let l = ReferenceElement::new(Family::L2Disc, k, Geometry::Quad).unwrap();
            assert_eq!(l.ndofs(), (k + 1) * (k + 1));
            let lt = ReferenceElement::new(Family::L2Disc, k, Geometry::Triangle).unwrap();
            assert_eq!(lt.ndofs(), (k + 1) * (k + 2) / 2);
        }
    }

    #[test]
    fn rt0_quad_closed_form() {
        // Edge bases with unit outward flux: (0, y-1), (x, 0), (0, y), (x-1, 0).
        let el = ReferenceElement::new(Family::RaviartThomas, 0, Geometry::Quad).unwrap();
        let p = [0.3, 0.8];
        let b = el.eval_rt_basis(p).unwrap();
        let expect = [[0.0, p[1] - 1.0], [p[0], 0.0], [0.0, p[1]], [p[0] - 1.0, 0.0]];
        for (got, want) in b.values.iter().zip(expect) {
            assert!(close(got[0], want[0], 1e-14) && close(got[1], want[1], 1e-14));
        }
        assert!(b.divergences.iter().all(|&d| close(d, 1.0, 1e-14)));
    }

    #[test]
    fn rt0_divergence_constant() {
        let el = ReferenceElement::new(Family::RaviartThomas, 0, Geometry::Quad).unwrap();
        let d0 = el.eval_rt_basis([0.1, 0.1]).unwrap().divergences;
        for p in [[0.5, 0.9], [1.0, 0.0], [0.25, 0.75]] {
            let d = el.eval_rt_basis(p).unwrap().divergences;
            for (a, b) in d.iter().zip(&d0) {
                assert!(close(*a, *b, 1e-13));
            }
        }
    }

    #[test]
    fn outside_point_rejected() {
        let el = ReferenceElement::new(Family::H1Lagrange, 1, Geometry::Triangle).unwrap();
        assert!(matches!(el.eval_scalar_basis([0.8, 0.8]), Err(ElementError::PointOutside(_))));
        let rt = ReferenceElement::new(Family::RaviartThomas, 1, Geometry::Quad).unwrap();
        assert!(matches!(rt.eval_rt_basis([1.5, 0.0]), Err(ElementError::PointOutside(_))));
        assert!(matches!(rt.eval_scalar_basis([0.5, 0.5]), Err(ElementError::WrongFamily { .. })));
    }

    #[test]
    fn order_limits() {
        assert!(ReferenceElement::new(Family::H1Lagrange, 0, Geometry::Quad).is_err());
        assert!(ReferenceElement::new(Family::RaviartThomas, 0, Geometry::Segment).is_err());
    }
}
