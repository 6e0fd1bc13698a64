//! Primal polynomial bases that the nodal/moment bases are expanded in.
//!
//! Products of shifted Legendre polynomials on quads and Dubiner polynomials
//! on triangles keep the generalized Vandermonde matrices well conditioned
//! up to the highest supported orders.

use crate::Point;

/// Values and t-derivatives of `L_n(2t - 1)` for `n = 0..=deg`.
pub(crate) fn shifted_legendre(deg: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let s = 2.0 * t - 1.0;
    let mut v = vec![0.0; deg + 1];
    let mut d = vec![0.0; deg + 1];
    v[0] = 1.0;
    if deg >= 1 {
        v[1] = s;
        d[1] = 1.0;
    }
    for n in 1..deg {
        let nf = n as f64;
        v[n + 1] = ((2.0 * nf + 1.0) * s * v[n] - nf * v[n - 1]) / (nf + 1.0);
        d[n + 1] = d[n - 1] + (2.0 * nf + 1.0) * v[n];
    }
    // d/dt = 2 d/ds
    d.iter_mut().for_each(|x| *x *= 2.0);
    (v, d)
}

/// Scalar primal function `L_a(x) L_b(y)`.
pub(crate) type Exponents = [usize; 2];

/// Vector primal functions for H(div) spaces.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum VectorPrimal {
    /// (L_a(x) L_b(y), 0)
    X(Exponents),
    /// (0, L_a(x) L_b(y))
    Y(Exponents),
    /// (x − c, y − c) L_a(x) L_b(y) with a + b = k and c the triangle
    /// centroid coordinate; together with [P_k]² these span RT_k.
    Radial(Exponents),
}

const RADIAL_CENTER: f64 = 1.0 / 3.0;

/// Primal scalar functions tabulated at one point, enough for degree `deg`:
/// Legendre products on quads, Dubiner polynomials on triangles.
pub(crate) struct PrimalTable {
    tensor: Option<[Vec<f64>; 4]>,
    simplex: Vec<(f64, [f64; 2])>,
    deg: usize,
    point: Point,
}

impl PrimalTable {
    pub(crate) fn new(deg: usize, p: Point, triangle: bool) -> Self {
        if triangle {
            let mut simplex = vec![(0.0, [0.0; 2]); (deg + 1) * (deg + 1)];
            for a in 0..=deg {
                for b in 0..=deg - a {
                    simplex[a * (deg + 1) + b] = dubiner_with_gradient([a, b], p);
                }
            }
            PrimalTable { tensor: None, simplex, deg, point: p }
        } else {
            let (vx, dx) = shifted_legendre(deg, p[0]);
            let (vy, dy) = shifted_legendre(deg, p[1]);
            PrimalTable { tensor: Some([vx, dx, vy, dy]), simplex: Vec::new(), deg, point: p }
        }
    }

    pub(crate) fn scalar(&self, [a, b]: Exponents) -> (f64, [f64; 2]) {
        match &self.tensor {
            Some([vx, dx, vy, dy]) => (vx[a] * vy[b], [dx[a] * vy[b], vx[a] * dy[b]]),
            None => self.simplex[a * (self.deg + 1) + b],
        }
    }

    /// Value and divergence.
    pub(crate) fn vector(&self, f: VectorPrimal) -> ([f64; 2], f64) {
        match f {
            VectorPrimal::X(e) => {
                let (v, g) = self.scalar(e);
                ([v, 0.0], g[0])
            }
            VectorPrimal::Y(e) => {
                let (v, g) = self.scalar(e);
                ([0.0, v], g[1])
            }
            VectorPrimal::Radial(e) => {
                let (m, g) = self.scalar(e);
                let (x, y) = (self.point[0] - RADIAL_CENTER, self.point[1] - RADIAL_CENTER);
                ([x * m, y * m], 2.0 * m + x * g[0] + y * g[1])
            }
        }
    }
}

/// Jacobi polynomial `P_n^{(α,0)}(s)` and its s-derivative.
fn jacobi_alpha0(n: usize, alpha: f64, s: f64) -> (f64, f64) {
    let (mut prev, mut dprev) = (1.0, 0.0);
    if n == 0 {
        return (prev, dprev);
    }
    let (mut cur, mut dcur) = (((alpha + 2.0) * s + alpha) / 2.0, (alpha + 2.0) / 2.0);
    for m in 2..=n {
        let m = m as f64;
        let c = 2.0 * m + alpha;
        let lin = c * (c - 2.0) * s + alpha * alpha;
        let back = 2.0 * (m + alpha - 1.0) * (m - 1.0) * c;
        let den = 2.0 * m * (m + alpha) * (c - 2.0);
        let next = ((c - 1.0) * lin * cur - back * prev) / den;
        let dnext = ((c - 1.0) * (c * (c - 2.0) * cur + lin * dcur) - back * dprev) / den;
        (prev, dprev, cur, dcur) = (cur, dcur, next, dnext);
    }
    (cur, dcur)
}

/// Dubiner polynomial `ψ_ab`, orthogonal on the reference triangle:
/// `(1 − y)^a L_a((2x + y − 1)/(1 − y)) P_b^{(2a+1,0)}(2y − 1)`.
pub(crate) fn dubiner(e: Exponents, p: Point) -> f64 {
    dubiner_with_gradient(e, p).0
}

fn dubiner_with_gradient([a, b]: Exponents, [x, y]: Point) -> (f64, [f64; 2]) {
    // Homogeneous Legendre recurrence in (x, y) avoids dividing by 1 − y.
    let q1 = (2.0 * x + y - 1.0, [2.0, 1.0]);
    let w2 = ((1.0 - y) * (1.0 - y), [0.0, -2.0 * (1.0 - y)]);
    let mut prev = (1.0, [0.0, 0.0]);
    let mut cur = if a == 0 { prev } else { q1 };
    for n in 1..a {
        let n = n as f64;
        let (f, g) = (2.0 * n + 1.0, n);
        let value = (f * q1.0 * cur.0 - g * w2.0 * prev.0) / (n + 1.0);
        let grad = [0, 1].map(|i| {
            (f * (q1.1[i] * cur.0 + q1.0 * cur.1[i]) - g * (w2.1[i] * prev.0 + w2.0 * prev.1[i])) / (n + 1.0)
        });
        prev = cur;
        cur = (value, grad);
    }
    let (r, dr) = jacobi_alpha0(b, (2 * a + 1) as f64, 2.0 * y - 1.0);
    (cur.0 * r, [cur.1[0] * r, cur.1[1] * r + cur.0 * 2.0 * dr])
}

/// Exponent pairs spanning P_k (triangle) or Q_k (quad).
pub(crate) fn scalar_exponents(k: usize, total_degree: bool) -> Vec<Exponents> {
    let mut out = Vec::new();
    for b in 0..=k {
        for a in 0..=k {
            if !total_degree || a + b <= k {
                out.push([a, b]);
            }
        }
    }
    out
}

/// Exponent pairs with `a <= ka`, `b <= kb`.
pub(crate) fn tensor_exponents(ka: usize, kb: usize) -> Vec<Exponents> {
    let mut out = Vec::with_capacity((ka + 1) * (kb + 1));
    for b in 0..=kb {
        for a in 0..=ka {
            out.push([a, b]);
        }
    }
    out
}

/// Lagrange polynomial through `nodes` that is 1 at `nodes[m]`.
pub(crate) fn lagrange_1d(nodes: &[f64], m: usize, t: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != m)
        .map(|(_, &ti)| (t - ti) / (nodes[m] - ti))
        .product()
}
