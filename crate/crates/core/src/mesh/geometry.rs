use thiserror::Error;

use crate::reference::Geometry;
use crate::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("element {0} does not exist")]
    NoSuchElement(usize),
    #[error("{kind:?} needs {expected} vertices, got {got}")]
    VertexCount { kind: Geometry, expected: usize, got: usize },
    #[error("inverted or degenerate element: det J = {det:e} at reference point {at:?}")]
    Inverted { det: f64, at: Point },
    #[error("singular Jacobian (det J = {0:e})")]
    Singular(f64),
}

/// Row-major 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn mul_vec(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// `M^{-T} v`, used to push reference gradients forward.
    pub fn inv_transpose_mul(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        let d = self.det();
        [
            (m[1][1] * v[0] - m[1][0] * v[1]) / d,
            (-m[0][1] * v[0] + m[0][0] * v[1]) / d,
        ]
    }

    pub fn max_singular_value(&self) -> f64 {
        let m = &self.0;
        let fro2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
        let det = self.det();
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        (0.5 * (fro2 + disc)).sqrt()
    }
}

/// Affine (triangle) or bilinear (quad) map from the reference cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementGeometry {
    kind: Geometry,
    coords: Vec<Point>,
}

impl ElementGeometry {
    /// Builds the map and rejects elements whose Jacobian determinant is not
    /// positive. For a bilinear quad det J is affine in each reference
    /// coordinate, so checking the corners covers the whole cell.
    pub fn new(kind: Geometry, coords: Vec<Point>) -> Result<Self, GeometryError> {
        let expected = kind.num_vertices();
        if kind == Geometry::Segment || coords.len() != expected {
            return Err(GeometryError::VertexCount { kind, expected, got: coords.len() });
        }
        let g = ElementGeometry { kind, coords };
        for &corner in kind.vertices() {
            let det = g.jacobian(corner).det();
            if !(det > 0.0) {
                return Err(GeometryError::Inverted { det, at: corner });
            }
        }
        Ok(g)
    }

    pub fn kind(&self) -> Geometry {
        self.kind
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    /// Physical point x(ξ, η).
    pub fn map(&self, p: Point) -> Point {
        let c = &self.coords;
        let [s, t] = p;
        match self.kind {
            Geometry::Quad => {
                let n = [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
                let mut x = [0.0; 2];
                for (ni, ci) in n.iter().zip(c) {
                    x[0] += ni * ci[0];
                    x[1] += ni * ci[1];
                }
                x
            }
            _ => [
                c[0][0] + s * (c[1][0] - c[0][0]) + t * (c[2][0] - c[0][0]),
                c[0][1] + s * (c[1][1] - c[0][1]) + t * (c[2][1] - c[0][1]),
            ],
        }
    }

    /// J = ∂x/∂ξ with columns (∂x/∂ξ, ∂x/∂η).
    pub fn jacobian(&self, p: Point) -> Mat2 {
        let c = &self.coords;
        let [s, t] = p;
        let (dxi, deta) = match self.kind {
            Geometry::Quad => {
                let dn_ds = [-(1.0 - t), 1.0 - t, t, -t];
                let dn_dt = [-(1.0 - s), -s, s, 1.0 - s];
                let mut a = [0.0; 2];
                let mut b = [0.0; 2];
                for i in 0..4 {
                    a[0] += dn_ds[i] * c[i][0];
                    a[1] += dn_ds[i] * c[i][1];
                    b[0] += dn_dt[i] * c[i][0];
                    b[1] += dn_dt[i] * c[i][1];
                }
                (a, b)
            }
            _ => (
                [c[1][0] - c[0][0], c[1][1] - c[0][1]],
                [c[2][0] - c[0][0], c[2][1] - c[0][1]],
            ),
        };
        Mat2([[dxi[0], deta[0]], [dxi[1], deta[1]]])
    }

    pub fn det_jacobian(&self, p: Point) -> f64 {
        self.jacobian(p).det()
    }

    /// Whether J is constant over the cell.
    pub fn is_affine(&self) -> bool {
        match self.kind {
            Geometry::Quad => {
                let c = &self.coords;
                let d = [c[0][0] - c[1][0] + c[2][0] - c[3][0], c[0][1] - c[1][1] + c[2][1] - c[3][1]];
                d[0].abs() + d[1].abs() <= 1e-14 * (1.0 + self.diameter())
            }
            _ => true,
        }
    }

    pub fn diameter(&self) -> f64 {
        let c = &self.coords;
        let mut d: f64 = 0.0;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                d = d.max((c[i][0] - c[j][0]).hypot(c[i][1] - c[j][1]));
            }
        }
        d
    }

    /// Exact area (shoelace formula on the straight-edged polygon).
    pub fn area(&self) -> f64 {
        let c = &self.coords;
        let n = c.len();
        0.5 * (0..n)
            .map(|i| {
                let j = (i + 1) % n;
                c[i][0] * c[j][1] - c[j][0] * c[i][1]
            })
            .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(scale: f64) -> ElementGeometry {
        ElementGeometry::new(
            Geometry::Quad,
            vec![[0.0, 0.0], [scale, 0.0], [scale, scale], [0.0, scale]],
        )
        .unwrap()
    }

    #[test]
    fn unit_square_is_identity() {
        let g = square(1.0);
        for p in [[0.0, 0.0], [0.3, 0.7], [1.0, 1.0]] {
            assert_eq!(g.jacobian(p), Mat2::IDENTITY);
            assert_eq!(g.det_jacobian(p), 1.0);
            assert_eq!(g.map(p), p);
        }
    }

    #[test]
    fn scaled_square_det() {
        let g = square(2.0);
        assert_eq!(g.det_jacobian([0.25, 0.5]), 4.0);
        assert_eq!(g.jacobian([0.1, 0.9]).max_singular_value(), 2.0);
    }

    #[test]
    fn clockwise_quad_inverted() {
        let err = ElementGeometry::new(
            Geometry::Quad,
            vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]],
        )
        .unwrap_err();
        assert!(matches!(err, GeometryError::Inverted { .. }));
    }

    #[test]
    fn nonaffine_quad_det_varies() {
        let g = ElementGeometry::new(
            Geometry::Quad,
            vec![[0.0, 0.0], [2.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        )
        .unwrap();
        assert!(!g.is_affine());
        assert!((g.det_jacobian([0.0, 0.0]) - 2.0).abs() < 1e-15);
        assert!((g.det_jacobian([0.0, 1.0]) - 1.0).abs() < 1e-15);
        assert!((g.area() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn inverse_transpose() {
        let m = Mat2([[2.0, 1.0], [0.5, 3.0]]);
        let v = [0.7, -1.3];
        let w = m.inv_transpose_mul(v);
        // M^T w = v
        let back = [m.0[0][0] * w[0] + m.0[1][0] * w[1], m.0[0][1] * w[0] + m.0[1][1] * w[1]];
        assert!((back[0] - v[0]).abs() < 1e-15 && (back[1] - v[1]).abs() < 1e-15);
    }
}
