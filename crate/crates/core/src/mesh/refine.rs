use super::{BoundaryEdge, Element, Mesh, Vertex};
use crate::reference::Geometry;

/// One level of uniform refinement.
///
/// New vertices are appended after the old ones: edge midpoints in global
/// edge order, then quad centroids in element order. Quads split into four
/// quads through the edge midpoints and the vertex average; triangles split
/// into four through the edge midpoints. Children keep the parent attribute
/// and counterclockwise orientation.
pub fn uniform_refine(mesh: &Mesh) -> Mesh {
    let nv = mesh.num_vertices();
    let mut vertices = mesh.vertices().to_vec();
    vertices.reserve(mesh.num_edges() + mesh.num_elements());
    for e in 0..mesh.num_edges() {
        let [a, b] = mesh.edge(e);
        let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
        vertices.push(Vertex::new(0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)));
    }
    let midpoint = |edge: usize| nv + edge;

    let mut elements = Vec::with_capacity(4 * mesh.num_elements());
    for (e, el) in mesh.elements().iter().enumerate() {
        let v = &el.vertices;
        let m: Vec<usize> = mesh.element_edges(e).iter().map(|&(id, _)| midpoint(id)).collect();
        let child = |vs: Vec<usize>| Element { kind: el.kind, vertices: vs, attribute: el.attribute };
        match el.kind {
            Geometry::Quad => {
                let c = vertices.len();
                let (x, y) = v.iter().fold((0.0, 0.0), |(x, y), &i| {
                    (x + mesh.vertices()[i].x, y + mesh.vertices()[i].y)
                });
                vertices.push(Vertex::new(0.25 * x, 0.25 * y));
                elements.push(child(vec![v[0], m[0], c, m[3]]));
                elements.push(child(vec![m[0], v[1], m[1], c]));
                elements.push(child(vec![c, m[1], v[2], m[2]]));
                elements.push(child(vec![m[3], c, m[2], v[3]]));
            }
            _ => {
                elements.push(child(vec![v[0], m[0], m[2]]));
                elements.push(child(vec![m[0], v[1], m[1]]));
                elements.push(child(vec![m[2], m[1], v[2]]));
                elements.push(child(vec![m[0], m[1], m[2]]));
            }
        }
    }

    let mut boundary = Vec::with_capacity(2 * mesh.boundary().len());
    for (be, &id) in mesh.boundary().iter().zip(mesh.boundary_edge_ids()) {
        let [a, b] = be.vertices;
        let mid = midpoint(id);
        boundary.push(BoundaryEdge { vertices: [a, mid], attribute: be.attribute });
        boundary.push(BoundaryEdge { vertices: [mid, b], attribute: be.attribute });
    }

    Mesh::new(vertices, elements, boundary).expect("refinement of a valid mesh is valid")
}

/// Applies [`uniform_refine`] `times` times; zero returns a copy.
pub fn refine_times(mesh: &Mesh, times: usize) -> Mesh {
    let mut m = mesh.clone();
    for _ in 0..times {
        m = uniform_refine(&m);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_quad_once() {
        let m = uniform_refine(&Mesh::unit_square(1, 1, Geometry::Quad).unwrap());
        assert_eq!(m.num_elements(), 4);
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.boundary().len(), 8);
        assert_eq!(m.num_edges(), 12);
    }

    #[test]
    fn one_quad_twice() {
        let m = refine_times(&Mesh::unit_square(1, 1, Geometry::Quad).unwrap(), 2);
        assert_eq!(m.num_elements(), 16);
        assert_eq!(m.num_vertices(), 25);
    }

    #[test]
    fn zero_refinements_is_identity() {
        let m = Mesh::unit_square(2, 3, Geometry::Triangle).unwrap();
        assert_eq!(refine_times(&m, 0), m);
    }

    #[test]
    fn triangles_split_in_four() {
        let m = Mesh::unit_square(1, 1, Geometry::Triangle).unwrap();
        let r = uniform_refine(&m);
        assert_eq!(r.num_elements(), 8);
        assert_eq!(r.num_vertices(), 9);
        assert!((r.area() - 1.0).abs() < 1e-15);
        assert!((r.h() - m.h() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn attributes_inherited() {
        let mut m = Mesh::unit_square(2, 1, Geometry::Quad).unwrap();
        let mut els = m.elements().to_vec();
        els[1].attribute = 7;
        m = Mesh::new(m.vertices().to_vec(), els, m.boundary().to_vec()).unwrap();
        let r = uniform_refine(&m);
        assert_eq!(r.elements().iter().filter(|e| e.attribute == 7).count(), 4);
    }
}
