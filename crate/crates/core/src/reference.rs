//! Reference cells shared by the mesh, quadrature and element modules.
//!
//! Conventions: the reference segment is `[-1, 1]`, the reference quad is
//! `[0, 1]^2` and the reference triangle is `{ξ, η ≥ 0, ξ + η ≤ 1}`.
//! Vertices are listed counterclockwise; local edge `i` runs from vertex
//! `i` to vertex `i + 1` (cyclically).

use crate::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Geometry {
    Segment,
    Triangle,
    Quad,
}

const TRIANGLE_VERTICES: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
const QUAD_VERTICES: [Point; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
const SEGMENT_VERTICES: [Point; 2] = [[-1.0, 0.0], [1.0, 0.0]];

const TRIANGLE_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];
const QUAD_EDGES: [[usize; 2]; 4] = [[0, 1], [1, 2], [2, 3], [3, 0]];

impl Geometry {
    pub fn num_vertices(self) -> usize {
        match self {
            Geometry::Segment => 2,
            Geometry::Triangle => 3,
            Geometry::Quad => 4,
        }
    }

    pub fn num_edges(self) -> usize {
        match self {
            Geometry::Segment => 0,
            Geometry::Triangle => 3,
            Geometry::Quad => 4,
        }
    }

    pub fn vertices(self) -> &'static [Point] {
        match self {
            Geometry::Segment => &SEGMENT_VERTICES,
            Geometry::Triangle => &TRIANGLE_VERTICES,
            Geometry::Quad => &QUAD_VERTICES,
        }
    }

    /// Local edges as pairs of local vertex indices (counterclockwise traversal).
    pub fn edges(self) -> &'static [[usize; 2]] {
        match self {
            Geometry::Segment => &[],
            Geometry::Triangle => &TRIANGLE_EDGES,
            Geometry::Quad => &QUAD_EDGES,
        }
    }

    /// Lebesgue measure of the reference cell.
    pub fn measure(self) -> f64 {
        match self {
            Geometry::Segment => 2.0,
            Geometry::Triangle => 0.5,
            Geometry::Quad => 1.0,
        }
    }

    pub fn center(self) -> Point {
        match self {
            Geometry::Segment => [0.0, 0.0],
            Geometry::Triangle => [1.0 / 3.0, 1.0 / 3.0],
            Geometry::Quad => [0.5, 0.5],
        }
    }

    /// Whether `p` lies in the closed reference cell, up to `tol`.
    pub fn contains(self, p: Point, tol: f64) -> bool {
        let [x, y] = p;
        match self {
            Geometry::Segment => (-1.0 - tol..=1.0 + tol).contains(&x) && y.abs() <= tol,
            Geometry::Triangle => x >= -tol && y >= -tol && x + y <= 1.0 + tol,
            Geometry::Quad => {
                (-tol..=1.0 + tol).contains(&x) && (-tol..=1.0 + tol).contains(&y)
            }
        }
    }

    /// Point on local edge `edge` at parameter `t ∈ [0, 1]` along its local direction.
    pub fn edge_point(self, edge: usize, t: f64) -> Point {
        let [a, b] = self.edges()[edge];
        let (pa, pb) = (self.vertices()[a], self.vertices()[b]);
        [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]
    }

    /// Outward normal of a local edge scaled by the edge length.
    pub fn scaled_edge_normal(self, edge: usize) -> [f64; 2] {
        let [a, b] = self.edges()[edge];
        let (pa, pb) = (self.vertices()[a], self.vertices()[b]);
        let t = [pb[0] - pa[0], pb[1] - pa[1]];
        [t[1], -t[0]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_normals_point_outward() {
        for geom in [Geometry::Triangle, Geometry::Quad] {
            let c = geom.center();
            for e in 0..geom.num_edges() {
                let m = geom.edge_point(e, 0.5);
                let n = geom.scaled_edge_normal(e);
                let out = (m[0] - c[0]) * n[0] + (m[1] - c[1]) * n[1];
                assert!(out > 0.0, "{geom:?} edge {e}");
            }
        }
        let n = Geometry::Triangle.scaled_edge_normal(1);
        assert_eq!(n, [1.0, 1.0]);
    }

    #[test]
    fn containment_respects_tolerance() {
        assert!(Geometry::Triangle.contains([0.5, 0.5], 0.0));
        assert!(!Geometry::Triangle.contains([0.6, 0.5], 1e-12));
        assert!(Geometry::Quad.contains([1.0 + 1e-13, 0.0], 1e-12));
        assert!(!Geometry::Quad.contains([-0.1, 0.5], 1e-12));
    }
}
