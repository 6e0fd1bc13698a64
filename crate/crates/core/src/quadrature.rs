//! Gauss–Legendre quadrature on the reference segment, quad and triangle.
//!
//! Quad rules are tensor products of 1D rules. Triangle rules collapse the
//! unit square onto the triangle (Duffy transform), which keeps every
//! weight positive and every point inside the cell for any exactness degree.

use thiserror::Error;

use crate::reference::Geometry;
use crate::Point;

/// Largest supported 1D point count.
pub const MAX_POINTS: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("Gauss-Legendre point count {0} outside 1..={MAX_POINTS}")]
    PointCount(usize),
    #[error("no quadrature rule of accuracy {accuracy} for {geometry:?}")]
    Unsupported { geometry: Geometry, accuracy: usize },
}

/// Points and positive weights on a reference cell.
///
/// Segment rules live on `[-1, 1]` and store the coordinate in `point[0]`
/// (with `point[1] == 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Σ w f(x) over the rule.
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// Accuracy used for assembly and error integrals of an order-`k` space.
pub fn required_order(k: usize) -> usize {
    (2 * k + 1).max(2)
}

/// Legendre polynomial P_n and its derivative at `x`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// n-point Gauss–Legendre rule on `[-1, 1]`, exact for degree `2n - 1`.
pub fn gauss_legendre_1d(n: usize) -> Result<QuadRule, QuadratureError> {
    let (x, w) = gauss_legendre_nodes(n)?;
    Ok(QuadRule {
        points: x.into_iter().map(|t| [t, 0.0]).collect(),
        weights: w,
    })
}

/// Nodes (ascending) and weights of the n-point rule on `[-1, 1]`.
pub(crate) fn gauss_legendre_nodes(n: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    if !(1..=MAX_POINTS).contains(&n) {
        return Err(QuadratureError::PointCount(n));
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    // Newton on the upper half of the roots, mirrored so the rule is exactly symmetric.
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[n - 1 - i] = z;
        x[i] = -z;
        w[n - 1 - i] = weight;
        w[i] = weight;
    }
    Ok((x, w))
}

/// n-point Gauss–Legendre rule mapped to `[0, 1]` (nodes ascending).
pub fn gauss_legendre_unit(n: usize) -> Result<(Vec<f64>, Vec<f64>), QuadratureError> {
    let (x, w) = gauss_legendre_nodes(n)?;
    Ok((
        x.into_iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.into_iter().map(|v| 0.5 * v).collect(),
    ))
}

/// Points per direction for a tensor Gauss rule of the given accuracy.
pub fn points_for_accuracy(accuracy: usize) -> usize {
    (accuracy + 2) / 2
}

/// A rule on the reference `geometry` exact for polynomials of total degree
/// `accuracy` (tensor degree `accuracy` per direction on quads).
pub fn rule_for_geometry(geometry: Geometry, accuracy: usize) -> Result<QuadRule, QuadratureError> {
    let too_high = || QuadratureError::Unsupported { geometry, accuracy };
    match geometry {
        Geometry::Segment => gauss_legendre_1d(points_for_accuracy(accuracy)).map_err(|_| too_high()),
        Geometry::Quad => {
            let n = points_for_accuracy(accuracy);
            let (x, w) = gauss_legendre_unit(n).map_err(|_| too_high())?;
            Ok(tensor_rule(&x, &w, &x, &w))
        }
        Geometry::Triangle => {
            // The collapsed integrand picks up one extra degree from the (1 - u) Jacobian.
            let n = points_for_accuracy(accuracy + 1);
            let (x, w) = gauss_legendre_unit(n).map_err(|_| too_high())?;
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for (&u, &wu) in x.iter().zip(&w) {
                for (&v, &wv) in x.iter().zip(&w) {
                    points.push([u, v * (1.0 - u)]);
                    weights.push(wu * wv * (1.0 - u));
                }
            }
            Ok(QuadRule { points, weights })
        }
    }
}

/// Tensor rule on `[0,1]^2` from 1D rules in ξ and η.
pub(crate) fn tensor_rule(x: &[f64], wx: &[f64], y: &[f64], wy: &[f64]) -> QuadRule {
    let mut points = Vec::with_capacity(x.len() * y.len());
    let mut weights = Vec::with_capacity(x.len() * y.len());
    for (&yj, &wj) in y.iter().zip(wy) {
        for (&xi, &wi) in x.iter().zip(wx) {
            points.push([xi, yj]);
            weights.push(wi * wj);
        }
    }
    QuadRule { points, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ∫ over the reference cell of x^a y^b.
    fn monomial_integral(geometry: Geometry, a: i32, b: i32) -> f64 {
        match geometry {
            Geometry::Segment => {
                if b != 0 {
                    return 0.0;
                }
                if a % 2 == 1 {
                    0.0
                } else {
                    2.0 / (a as f64 + 1.0)
                }
            }
            Geometry::Quad => 1.0 / ((a as f64 + 1.0) * (b as f64 + 1.0)),
            // a! b! / (a + b + 2)!
            Geometry::Triangle => {
                let fact = |n: i32| (1..=n).map(f64::from).product::<f64>();
                fact(a) * fact(b) / fact(a + b + 2)
            }
        }
    }

    #[test]
    fn one_point_rule() {
        let r = gauss_legendre_1d(1).unwrap();
        assert_eq!(r.points, vec![[0.0, 0.0]]);
        assert_eq!(r.weights, vec![2.0]);
    }

    #[test]
    fn two_point_rule_matches_moment_solution() {
        let r = gauss_legendre_1d(2).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!((r.points[0][0] + s).abs() < 1e-15);
        assert!((r.points[1][0] - s).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15 && (r.weights[1] - 1.0).abs() < 1e-15);
        assert!(r.integrate(|p| p[0].powi(3)).abs() < 1e-16);
    }

    #[test]
    fn point_count_range_enforced() {
        assert_eq!(gauss_legendre_1d(0), Err(QuadratureError::PointCount(0)));
        assert_eq!(gauss_legendre_1d(33), Err(QuadratureError::PointCount(33)));
        assert!(gauss_legendre_1d(32).is_ok());
    }

    #[test]
    fn required_order_formula() {
        assert_eq!(required_order(0), 2);
        assert_eq!(required_order(1), 3);
        assert_eq!(required_order(2), 5);
    }

    #[test]
    fn midpoint_quad_rule() {
        let r = rule_for_geometry(Geometry::Quad, 1).unwrap();
        assert_eq!(r.points, vec![[0.5, 0.5]]);
        assert_eq!(r.weights, vec![1.0]);
        let r3 = rule_for_geometry(Geometry::Quad, 3).unwrap();
        assert!((r3.integrate(|p| p[0] * p[1]) - 0.25).abs() < 1e-15);
        let t = rule_for_geometry(Geometry::Triangle, 1).unwrap();
        assert!((t.integrate(|_| 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monomials_integrated_exactly() {
        for geometry in [Geometry::Segment, Geometry::Triangle, Geometry::Quad] {
            for accuracy in 0..=20usize {
                let rule = rule_for_geometry(geometry, accuracy).unwrap();
                let sum: f64 = rule.weights.iter().sum();
                assert!((sum - geometry.measure()).abs() < 1e-14);
                assert!(rule.weights.iter().all(|&w| w > 0.0));
                assert!(rule.points.iter().all(|&p| geometry.contains(p, 0.0)));
                for a in 0..=accuracy as i32 {
                    let bmax = match geometry {
                        Geometry::Segment => 0,
                        Geometry::Triangle => accuracy as i32 - a,
                        Geometry::Quad => accuracy as i32,
                    };
                    for b in 0..=bmax {
                        let exact = monomial_integral(geometry, a, b);
                        let got = rule.integrate(|p| p[0].powi(a) * p[1].powi(b));
                        assert!(
                            (got - exact).abs() <= 1e-13 * exact.abs().max(1.0),
                            "{geometry:?} acc {accuracy} x^{a} y^{b}: {got} vs {exact}"
                        );
                    }
                }
            }
        }
    }
}
