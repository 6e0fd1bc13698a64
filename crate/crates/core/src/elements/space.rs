use std::sync::Arc;

use super::{piola_divergence, piola_map, DofEntity, ElementError, Family, ReferenceElement};
use crate::mesh::{ElementGeometry, Mesh};
use crate::reference::Geometry;
use crate::Point;

/// A global finite element space over a mesh.
///
/// Global numbering: vertex DOFs by vertex id, then edge DOFs by global edge
/// id (each edge oriented from its lower to its higher vertex id), then
/// element interiors in element order. Vector-valued scalar spaces
/// (`vdim > 1`) store all first components, then all second components.
#[derive(Clone, Debug)]
pub struct FESpace {
    mesh: Arc<Mesh>,
    family: Family,
    order: usize,
    vdim: usize,
    triangle: Option<ReferenceElement>,
    quad: Option<ReferenceElement>,
    element_dofs: Vec<Vec<usize>>,
    element_signs: Vec<Vec<f64>>,
    scalar_ndofs: usize,
}

pub fn build_space(
    mesh: Arc<Mesh>,
    family: Family,
    order: usize,
    vdim: usize,
) -> Result<FESpace, ElementError> {
    FESpace::new(mesh, family, order, vdim)
}

impl FESpace {
    pub fn new(mesh: Arc<Mesh>, family: Family, order: usize, vdim: usize) -> Result<Self, ElementError> {
        if vdim == 0 || vdim > 2 || (family.is_vector() && vdim != 1) {
            return Err(ElementError::Vdim { family, vdim });
        }
        let has = |g| mesh.elements().iter().any(|e| e.kind == g);
        let triangle = has(Geometry::Triangle)
            .then(|| ReferenceElement::new(family, order, Geometry::Triangle))
            .transpose()?;
        let quad = has(Geometry::Quad)
            .then(|| ReferenceElement::new(family, order, Geometry::Quad))
            .transpose()?;
        let any = triangle.as_ref().or(quad.as_ref()).expect("mesh has elements");
        let per_vertex = any.dofs_per_vertex();
        let per_edge = any.dofs_per_edge();
        let edge_offset = per_vertex * mesh.num_vertices();
        let mut next_interior = edge_offset + per_edge * mesh.num_edges();

        let mut element_dofs = Vec::with_capacity(mesh.num_elements());
        let mut element_signs = Vec::with_capacity(mesh.num_elements());
        for (e, el) in mesh.elements().iter().enumerate() {
            let re = match el.kind {
                Geometry::Triangle => triangle.as_ref(),
                _ => quad.as_ref(),
            }
            .expect("reference element for every present geometry");
            let edges = mesh.element_edges(e);
            let mut dofs = Vec::with_capacity(re.ndofs());
            let mut signs = Vec::with_capacity(re.ndofs());
            for entity in re.entities() {
                match *entity {
                    DofEntity::Vertex(v) => {
                        dofs.push(el.vertices[v]);
                        signs.push(1.0);
                    }
                    DofEntity::Edge { edge, index } => {
                        let (gid, same_dir) = edges[edge];
                        let base = edge_offset + gid * per_edge;
                        let flip = per_edge - 1 - index;
                        match (family, same_dir) {
                            (_, true) => {
                                dofs.push(base + index);
                                signs.push(1.0);
                            }
                            (Family::RaviartThomas, false) => {
                                dofs.push(base + flip);
                                signs.push(-1.0);
                            }
                            (_, false) => {
                                dofs.push(base + flip);
                                signs.push(1.0);
                            }
                        }
                    }
                    DofEntity::Interior => {
                        dofs.push(next_interior);
                        signs.push(1.0);
                        next_interior += 1;
                    }
                }
            }
            element_dofs.push(dofs);
            element_signs.push(signs);
        }

        Ok(FESpace {
            mesh,
            family,
            order,
            vdim,
            triangle,
            quad,
            element_dofs,
            element_signs,
            scalar_ndofs: next_interior,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vdim(&self) -> usize {
        self.vdim
    }

    /// Total number of global DOFs (all components).
    pub fn ndofs(&self) -> usize {
        self.scalar_ndofs * self.vdim
    }

    /// Number of DOFs of a single component.
    pub fn scalar_ndofs(&self) -> usize {
        self.scalar_ndofs
    }

    /// Global index of component `comp` of scalar DOF `dof`.
    pub fn component_dof(&self, dof: usize, comp: usize) -> usize {
        comp * self.scalar_ndofs + dof
    }

    pub fn reference(&self, geometry: Geometry) -> Option<&ReferenceElement> {
        match geometry {
            Geometry::Triangle => self.triangle.as_ref(),
            Geometry::Quad => self.quad.as_ref(),
            Geometry::Segment => None,
        }
    }

    pub fn element_reference(&self, element: usize) -> &ReferenceElement {
        self.reference(self.mesh.elements()[element].kind)
            .expect("reference element for every present geometry")
    }

    /// Global DOF ids of an element, in local order (first component).
    pub fn element_dofs(&self, element: usize) -> &[usize] {
        &self.element_dofs[element]
    }

    /// Orientation signs matching [`element_dofs`](Self::element_dofs);
    /// only Raviart-Thomas edge DOFs can be negative.
    pub fn element_signs(&self, element: usize) -> &[f64] {
        &self.element_signs[element]
    }

    /// Highest polynomial degree per coordinate direction of the local spaces.
    pub fn polynomial_degree(&self) -> usize {
        match self.family {
            Family::RaviartThomas => self.order + 1,
            _ => self.order,
        }
    }

    /// Sorted DOFs whose nodes lie on the boundary (all components).
    pub fn essential_boundary_dofs(&self) -> Result<Vec<usize>, ElementError> {
        if self.family != Family::H1Lagrange {
            return Err(ElementError::WrongFamily { expected: "H1", found: self.family });
        }
        let per_edge = self.order - 1;
        let edge_offset = self.mesh.num_vertices();
        let mut dofs = Vec::new();
        for &gid in self.mesh.boundary_edge_ids() {
            dofs.extend(self.mesh.edge(gid));
            dofs.extend((0..per_edge).map(|j| edge_offset + gid * per_edge + j));
        }
        dofs.sort_unstable();
        dofs.dedup();
        let n = dofs.len();
        for comp in 1..self.vdim {
            for i in 0..n {
                let d = self.component_dof(dofs[i], comp);
                dofs.push(d);
            }
        }
        Ok(dofs)
    }

    /// Physical values and gradients of the local scalar basis of `element`
    /// at reference point `p`.
    pub fn physical_scalar_basis(
        &self,
        geometry: &ElementGeometry,
        element: usize,
        p: Point,
    ) -> Result<(Vec<f64>, Vec<[f64; 2]>), ElementError> {
        let b = self.element_reference(element).eval_scalar_basis(p)?;
        let j = geometry.jacobian(p);
        let grads = b.gradients.iter().map(|&g| j.inv_transpose_mul(g)).collect();
        Ok((b.values, grads))
    }

    /// Piola-mapped values and divergences of the local H(div) basis of
    /// `element` at reference point `p`, with orientation signs applied.
    pub fn physical_vector_basis(
        &self,
        geometry: &ElementGeometry,
        element: usize,
        p: Point,
    ) -> Result<(Vec<[f64; 2]>, Vec<f64>), ElementError> {
        let b = self.element_reference(element).eval_rt_basis(p)?;
        let j = geometry.jacobian(p);
        let signs = self.element_signs(element);
        let mut values = Vec::with_capacity(b.values.len());
        let mut divs = Vec::with_capacity(b.values.len());
        for ((v, d), s) in b.values.iter().zip(&b.divergences).zip(signs) {
            let m = piola_map(&j, *v)?;
            values.push([s * m[0], s * m[1]]);
            divs.push(s * piola_divergence(&j, *d)?);
        }
        Ok((values, divs))
    }

    /// Whether two spaces live on the same mesh (pointer or structural equality).
    pub fn same_mesh(&self, other: &FESpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) || *self.mesh == *other.mesh
    }
}
