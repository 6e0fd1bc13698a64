//! Conforming 2D meshes of straight-edged triangles and quadrilaterals.

mod geometry;
mod parse;
mod refine;

use std::collections::HashMap;

use thiserror::Error;

use crate::reference::Geometry;
use crate::Point;

pub use geometry::{ElementGeometry, GeometryError, Mat2};
pub use parse::{parse_mfem_mesh, write_mfem_mesh, ParseError};
pub use refine::{refine_times, uniform_refine};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex {
    pub x: f64,
    pub y: f64,
}

impl Vertex {
    pub fn new(x: f64, y: f64) -> Self {
        Vertex { x, y }
    }

    pub fn point(self) -> Point {
        [self.x, self.y]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub kind: Geometry,
    pub vertices: Vec<usize>,
    pub attribute: i32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub attribute: i32,
}

/// Mesh construction failures. Indices refer to the input lists.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no elements")]
    Empty,
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteVertex { vertex: usize },
    #[error("element {element} has kind {kind:?}; only triangles and quads are supported")]
    UnsupportedElement { element: usize, kind: Geometry },
    #[error("element {element} needs {expected} vertices, got {got}")]
    WrongVertexCount { element: usize, expected: usize, got: usize },
    #[error("element {element} references vertex {vertex}, but only {count} vertices exist")]
    VertexOutOfRange { element: usize, vertex: usize, count: usize },
    #[error("element {element} repeats vertex {vertex}")]
    RepeatedVertex { element: usize, vertex: usize },
    #[error("element {element} is inverted or degenerate")]
    InvertedElement { element: usize },
    #[error("vertex {vertex} belongs to no element")]
    UnusedVertex { vertex: usize },
    #[error("edge ({0}, {1}) is shared by more than two elements")]
    NonManifoldEdge(usize, usize),
    #[error("boundary edge {index} ({a}, {b}) is not an edge of exactly one element")]
    BadBoundaryEdge { index: usize, a: usize, b: usize },
    #[error("edge ({0}, {1}) lies on the boundary but is missing from the boundary list")]
    MissingBoundaryEdge(usize, usize),
}

/// A validated conforming mesh with edge topology.
///
/// Edges are numbered in order of first appearance when walking elements
/// and their local edges; each global edge is oriented from its lower to its
/// higher vertex id.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Vertex>,
    elements: Vec<Element>,
    boundary: Vec<BoundaryEdge>,
    edges: Vec<[usize; 2]>,
    element_edges: Vec<Vec<(usize, bool)>>,
    edge_elements: Vec<Vec<usize>>,
    boundary_edge_ids: Vec<usize>,
}

impl PartialEq for Mesh {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.elements == other.elements
            && self.boundary == other.boundary
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Mesh {
    pub fn new(
        vertices: Vec<Vertex>,
        elements: Vec<Element>,
        boundary: Vec<BoundaryEdge>,
    ) -> Result<Mesh, MeshError> {
        if elements.is_empty() {
            return Err(MeshError::Empty);
        }
        if let Some(vertex) = vertices
            .iter()
            .position(|v| !v.x.is_finite() || !v.y.is_finite())
        {
            return Err(MeshError::NonFiniteVertex { vertex });
        }
        let mut used = vec![false; vertices.len()];
        for (element, el) in elements.iter().enumerate() {
            if el.kind == Geometry::Segment {
                return Err(MeshError::UnsupportedElement { element, kind: el.kind });
            }
            let expected = el.kind.num_vertices();
            if el.vertices.len() != expected {
                return Err(MeshError::WrongVertexCount {
                    element,
                    expected,
                    got: el.vertices.len(),
                });
            }
            for (i, &v) in el.vertices.iter().enumerate() {
                if v >= vertices.len() {
                    return Err(MeshError::VertexOutOfRange {
                        element,
                        vertex: v,
                        count: vertices.len(),
                    });
                }
                if el.vertices[..i].contains(&v) {
                    return Err(MeshError::RepeatedVertex { element, vertex: v });
                }
                used[v] = true;
            }
            let coords: Vec<Point> = el.vertices.iter().map(|&v| vertices[v].point()).collect();
            if ElementGeometry::new(el.kind, coords).is_err() {
                return Err(MeshError::InvertedElement { element });
            }
        }
        if let Some(vertex) = used.iter().position(|u| !u) {
            return Err(MeshError::UnusedVertex { vertex });
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_elements: Vec<Vec<usize>> = Vec::new();
        let mut element_edges = Vec::with_capacity(elements.len());
        for (e, el) in elements.iter().enumerate() {
            let mut local = Vec::with_capacity(el.kind.num_edges());
            for &[a, b] in el.kind.edges() {
                let (va, vb) = (el.vertices[a], el.vertices[b]);
                let key = edge_key(va, vb);
                let id = *lookup.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_elements.push(Vec::new());
                    edges.len() - 1
                });
                edge_elements[id].push(e);
                if edge_elements[id].len() > 2 {
                    return Err(MeshError::NonManifoldEdge(key.0, key.1));
                }
                local.push((id, va < vb));
            }
            element_edges.push(local);
        }

        let mut boundary_edge_ids = Vec::with_capacity(boundary.len());
        let mut on_boundary = vec![false; edges.len()];
        for (index, be) in boundary.iter().enumerate() {
            let [a, b] = be.vertices;
            let id = lookup
                .get(&edge_key(a, b))
                .copied()
                .filter(|&id| edge_elements[id].len() == 1 && !on_boundary[id])
                .ok_or(MeshError::BadBoundaryEdge { index, a, b })?;
            on_boundary[id] = true;
            boundary_edge_ids.push(id);
        }
        if let Some(id) = (0..edges.len()).find(|&id| edge_elements[id].len() == 1 && !on_boundary[id]) {
            return Err(MeshError::MissingBoundaryEdge(edges[id][0], edges[id][1]));
        }

        Ok(Mesh {
            vertices,
            elements,
            boundary,
            edges,
            element_edges,
            edge_elements,
            boundary_edge_ids,
        })
    }

    /// Structured `nx × ny` grid on the unit square, split into triangles
    /// when `kind` is [`Geometry::Triangle`]. Boundary attribute 1.
    pub fn unit_square(nx: usize, ny: usize, kind: Geometry) -> Result<Mesh, MeshError> {
        Self::rectangle([0.0, 0.0], [1.0, 1.0], nx, ny, kind)
    }

    pub fn rectangle(
        lower: Point,
        upper: Point,
        nx: usize,
        ny: usize,
        kind: Geometry,
    ) -> Result<Mesh, MeshError> {
        if nx == 0 || ny == 0 {
            return Err(MeshError::Empty);
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(Vertex::new(
                    lower[0] + (upper[0] - lower[0]) * i as f64 / nx as f64,
                    lower[1] + (upper[1] - lower[1]) * j as f64 / ny as f64,
                ));
            }
        }
        let mut elements = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let q = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
                match kind {
                    Geometry::Triangle => {
                        elements.push(Element { kind, vertices: vec![q[0], q[1], q[2]], attribute: 1 });
                        elements.push(Element { kind, vertices: vec![q[0], q[2], q[3]], attribute: 1 });
                    }
                    _ => elements.push(Element { kind: Geometry::Quad, vertices: q.to_vec(), attribute: 1 }),
                }
            }
        }
        let mut boundary = Vec::new();
        let mut push = |a, b| boundary.push(BoundaryEdge { vertices: [a, b], attribute: 1 });
        for i in 0..nx {
            push(id(i, 0), id(i + 1, 0));
            push(id(i + 1, ny), id(i, ny));
        }
        for j in 0..ny {
            push(id(nx, j), id(nx, j + 1));
            push(id(0, j + 1), id(0, j));
        }
        Mesh::new(vertices, elements, boundary)
    }

    pub fn dimension(&self) -> usize {
        2
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn boundary(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Global edge `id` as (lower vertex, higher vertex).
    pub fn edge(&self, id: usize) -> [usize; 2] {
        self.edges[id]
    }

    /// Global edge ids of an element's local edges, with `true` when the
    /// local direction agrees with the global low→high orientation.
    pub fn element_edges(&self, element: usize) -> &[(usize, bool)] {
        &self.element_edges[element]
    }

    /// Elements adjacent to a global edge (one for boundary edges, two otherwise).
    pub fn edge_elements(&self, edge: usize) -> &[usize] {
        &self.edge_elements[edge]
    }

    /// Global edge id of each boundary entry, in boundary-list order.
    pub fn boundary_edge_ids(&self) -> &[usize] {
        &self.boundary_edge_ids
    }

    pub fn element_coords(&self, element: usize) -> Vec<Point> {
        self.elements[element]
            .vertices
            .iter()
            .map(|&v| self.vertices[v].point())
            .collect()
    }

    /// Geometric map of one element. Construction already rejected inverted
    /// elements, so this only fails for an out-of-range index.
    pub fn element_geometry(&self, element: usize) -> Result<ElementGeometry, GeometryError> {
        let el = self
            .elements
            .get(element)
            .ok_or(GeometryError::NoSuchElement(element))?;
        ElementGeometry::new(el.kind, self.element_coords(element))
    }

    /// Local edge index of global `edge` within `element`.
    pub fn local_edge(&self, element: usize, edge: usize) -> Option<usize> {
        self.element_edges[element].iter().position(|&(id, _)| id == edge)
    }

    /// Mesh size: the largest element diameter (max pairwise vertex distance).
    pub fn h(&self) -> f64 {
        (0..self.num_elements())
            .map(|e| {
                let c = self.element_coords(e);
                let mut d: f64 = 0.0;
                for i in 0..c.len() {
                    for j in i + 1..c.len() {
                        d = d.max((c[i][0] - c[j][0]).hypot(c[i][1] - c[j][1]));
                    }
                }
                d
            })
            .fold(0.0, f64::max)
    }

    /// Largest singular value of the element Jacobian at the reference
    /// center, maximized over elements. This is the size indicator the
    /// reference tables were printed with.
    pub fn h_jacobian(&self) -> f64 {
        (0..self.num_elements())
            .map(|e| {
                let g = self.element_geometry(e).expect("validated element");
                g.jacobian(g.kind().center()).max_singular_value()
            })
            .fold(0.0, f64::max)
    }

    /// Total area, integrated exactly for straight-edged cells.
    pub fn area(&self) -> f64 {
        (0..self.num_elements())
            .map(|e| self.element_geometry(e).expect("validated element").area())
            .sum()
    }
}

/// The mesh size parameter `h`: the largest element diameter.
pub fn mesh_h(mesh: &Mesh) -> Result<f64, MeshError> {
    if mesh.num_elements() == 0 {
        return Err(MeshError::Empty);
    }
    Ok(mesh.h())
}
