//! Helpers shared by the integration tests. Everything here is written
//! independently of the library's own quadrature and polynomial code.
#![allow(dead_code)]

use lagmix::experiment::STAR_MESH;
use lagmix::mesh::{parse_mfem_mesh, BoundaryEdge, Element, Mesh, Vertex};
use lagmix::reference::Geometry;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn star() -> Mesh {
    parse_mfem_mesh(STAR_MESH).expect("bundled star mesh parses")
}

/// Gauss-Legendre rule on [0, 1] from the eigen-decomposition of the
/// Jacobi matrix.
pub fn gauss_unit(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let k = i as f64;
        let b = k / (4.0 * k * k - 1.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let w = 2.0 * eig.eigenvectors[(0, i)].powi(2);
            ((x + 1.0) / 2.0, w / 2.0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

/// Tensor rule on the unit square, or a collapsed tensor rule on the
/// reference triangle.
pub fn cell_rule(geometry: Geometry, n: usize) -> Vec<([f64; 2], f64)> {
    let g = gauss_unit(n);
    let mut out = Vec::with_capacity(n * n);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            match geometry {
                Geometry::Triangle => out.push(([u, v * (1.0 - u)], wu * wv * (1.0 - u))),
                _ => out.push(([u, v], wu * wv)),
            }
        }
    }
    out
}

/// `P_n(2t − 1)` by the three-term recurrence.
pub fn legendre01(n: usize, t: f64) -> f64 {
    let s = 2.0 * t - 1.0;
    let (mut p0, mut p1) = (1.0, s);
    if n == 0 {
        return p0;
    }
    for m in 1..n {
        let m = m as f64;
        let p2 = ((2.0 * m + 1.0) * s * p1 - m * p0) / (m + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Orthogonal polynomial `ψ_ab` on the reference triangle from the
/// collapsed-coordinate formula and the explicit Jacobi sum.
pub fn dubiner_explicit(a: usize, b: usize, [x, y]: [f64; 2]) -> f64 {
    let w = 1.0 - y;
    let first = if a == 0 { 1.0 } else { w.powi(a as i32) * legendre01(a, (x / w).clamp(0.0, 1.0)) };
    let alpha = 2 * a + 1;
    let s = 2.0 * y - 1.0;
    let jacobi: f64 = (0..=b)
        .map(|m| {
            binomial(b + alpha, b - m)
                * binomial(b, m)
                * ((s - 1.0) / 2.0).powi(m as i32)
                * ((s + 1.0) / 2.0).powi((b - m) as i32)
        })
        .sum();
    first * jacobi
}

pub fn lagrange(nodes: &[f64], m: usize, t: f64) -> f64 {
    let mut v = 1.0;
    for (i, &x) in nodes.iter().enumerate() {
        if i != m {
            v *= (t - x) / (nodes[m] - x);
        }
    }
    v
}

/// `nx × ny` grid on `[0, 1]²` with interior vertices displaced by up to
/// `amplitude` cell widths. Amplitudes below 0.25 keep every cell convex.
pub fn perturbed_square(nx: usize, ny: usize, kind: Geometry, amplitude: f64, seed: u64) -> Mesh {
    let base = Mesh::unit_square(nx, ny, kind).expect("grid");
    let mut rng = StdRng::seed_from_u64(seed);
    let (hx, hy) = (1.0 / nx as f64, 1.0 / ny as f64);
    let vertices: Vec<Vertex> = base
        .vertices()
        .iter()
        .map(|v| {
            let interior = v.x > 1e-12 && v.x < 1.0 - 1e-12 && v.y > 1e-12 && v.y < 1.0 - 1e-12;
            if interior {
                Vertex::new(
                    v.x + amplitude * hx * rng.gen_range(-1.0..1.0),
                    v.y + amplitude * hy * rng.gen_range(-1.0..1.0),
                )
            } else {
                *v
            }
        })
        .collect();
    let elements: Vec<Element> = base.elements().to_vec();
    let boundary: Vec<BoundaryEdge> = base.boundary().to_vec();
    Mesh::new(vertices, elements, boundary).expect("perturbed grid stays valid")
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

use std::sync::Arc;

use lagmix::assembly::{assemble_lagrange_system, assemble_mixed_system, BlockSystem, ProblemSpec, SparseMatrix};
use lagmix::elements::{build_space, Family};
use lagmix::mesh::refine_times;
use lagmix::solvers::DenseMatrix;

/// Largest system size used for dense oracle comparisons.
pub const ORACLE_MAX_DOFS: usize = 600;

fn oracle_meshes() -> Vec<(String, Arc<Mesh>)> {
    vec![
        ("star".into(), Arc::new(star())),
        ("star r1".into(), Arc::new(refine_times(&star(), 1))),
        ("quads 3x3".into(), Arc::new(Mesh::unit_square(3, 3, Geometry::Quad).unwrap())),
        ("triangles 3x2".into(), Arc::new(Mesh::unit_square(3, 2, Geometry::Triangle).unwrap())),
        ("skewed quads".into(), Arc::new(perturbed_square(3, 3, Geometry::Quad, 0.2, 7))),
        ("skewed triangles".into(), Arc::new(perturbed_square(2, 3, Geometry::Triangle, 0.2, 11))),
    ]
}

fn problems() -> [(&'static str, ProblemSpec); 2] {
    [("unit source", ProblemSpec::unit_source()), ("sine", ProblemSpec::manufactured_sine())]
}

/// Every BC-eliminated Lagrange system up to [`ORACLE_MAX_DOFS`] unknowns.
pub fn lagrange_systems() -> Vec<(String, SparseMatrix, Vec<f64>)> {
    let mut out = Vec::new();
    for (name, mesh) in oracle_meshes() {
        for k in 1..=4 {
            let h1 = build_space(mesh.clone(), Family::H1Lagrange, k, 1).unwrap();
            if h1.ndofs() > ORACLE_MAX_DOFS {
                continue;
            }
            for (pname, spec) in problems() {
                let (a, b) = assemble_lagrange_system(&h1, &spec).unwrap();
                out.push((format!("{name} H1 k={k} {pname}"), a, b));
            }
        }
    }
    out
}

/// Every mixed system up to [`ORACLE_MAX_DOFS`] unknowns.
pub fn mixed_systems() -> Vec<(String, BlockSystem)> {
    let mut out = Vec::new();
    for (name, mesh) in oracle_meshes() {
        for k in 0..=3 {
            let rt = build_space(mesh.clone(), Family::RaviartThomas, k, 1).unwrap();
            let l2 = build_space(mesh.clone(), Family::L2Disc, k, 1).unwrap();
            if rt.ndofs() + l2.ndofs() > ORACLE_MAX_DOFS {
                continue;
            }
            for (pname, spec) in problems() {
                let sys = assemble_mixed_system(&rt, &l2, &spec).unwrap();
                out.push((format!("{name} RT{k} {pname}"), sys));
            }
        }
    }
    out
}

pub fn to_nalgebra(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a.row(i)[j])
}

/// Solution by nalgebra's LU factorization.
pub fn nalgebra_solve(a: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let lu = to_nalgebra(a).lu();
    lu.solve(&nalgebra::DVector::from_column_slice(b)).expect("nonsingular").as_slice().to_vec()
}

/// CSV text with the trailing `wall_ms` column removed from every line.
pub fn without_wall_time(csv: &str) -> String {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn shared_edges(mesh: &Mesh) -> Vec<(usize, usize, usize)> {
    (0..mesh.num_edges())
        .filter_map(|e| match mesh.edge_elements(e) {
            [a, b] => Some((e, *a, *b)),
            _ => None,
        })
        .collect()
}

/// Reference points of the same physical point seen from both neighbours
/// of an interior edge, plus the edge tangent.
pub fn edge_point_pair(
    mesh: &Mesh,
    edge: usize,
    ea: usize,
    eb: usize,
    t: f64,
) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let (ga, gb) = (mesh.element_geometry(ea).unwrap(), mesh.element_geometry(eb).unwrap());
    let (la, lb) = (mesh.local_edge(ea, edge).unwrap(), mesh.local_edge(eb, edge).unwrap());
    let ra = ga.kind().edge_point(la, t);
    let x = ga.map(ra);
    let candidates = [gb.kind().edge_point(lb, t), gb.kind().edge_point(lb, 1.0 - t)];
    let dist = |r: [f64; 2]| {
        let y = gb.map(r);
        (y[0] - x[0]).hypot(y[1] - x[1])
    };
    let rb = if dist(candidates[0]) <= dist(candidates[1]) { candidates[0] } else { candidates[1] };
    let [v0, v1] = mesh.edge(edge);
    let (p0, p1) = (mesh.vertices()[v0], mesh.vertices()[v1]);
    (ra, rb, [p1.x - p0.x, p1.y - p0.y])
}
