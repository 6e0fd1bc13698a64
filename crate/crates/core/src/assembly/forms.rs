use super::{AssemblyError, SparseMatrix, TripletBuilder};
use crate::elements::{FESpace, Family};
use crate::mesh::ElementGeometry;
use crate::quadrature::{gauss_legendre_unit, points_for_accuracy, required_order, rule_for_geometry, QuadRule};
use crate::reference::Geometry;
use crate::solvers::DenseMatrix;
use crate::Point;

/// Quadrature point data handed to element kernels.
pub(crate) struct QuadPoint {
    pub reference: Point,
    pub physical: Point,
    /// Quadrature weight times det J.
    pub weight: f64,
}

/// Calls `kernel` for each element with its geometry and mapped quadrature
/// points of the given accuracy.
pub(crate) fn for_each_element<E>(
    space: &FESpace,
    accuracy: usize,
    mut kernel: impl FnMut(usize, &ElementGeometry, &[QuadPoint]) -> Result<(), E>,
) -> Result<(), E>
where
    E: From<AssemblyError>,
{
    let mesh = space.mesh();
    let mut rules: [Option<QuadRule>; 2] = [None, None];
    let mut points = Vec::new();
    for e in 0..mesh.num_elements() {
        let geo = mesh.element_geometry(e).map_err(AssemblyError::from)?;
        let slot = usize::from(geo.kind() == Geometry::Quad);
        if rules[slot].is_none() {
            rules[slot] = Some(rule_for_geometry(geo.kind(), accuracy).map_err(AssemblyError::from)?);
        }
        let rule = rules[slot].as_ref().expect("rule cached");
        points.clear();
        for (p, w) in rule.iter() {
            points.push(QuadPoint { reference: p, physical: geo.map(p), weight: w * geo.det_jacobian(p) });
        }
        kernel(e, &geo, &points)?;
    }
    Ok(())
}

fn expect_family(space: &FESpace, family: Family, expected: &'static str) -> Result<(), AssemblyError> {
    if space.family() != family || space.vdim() != 1 {
        return Err(AssemblyError::WrongSpace { expected, found: space.family(), vdim: space.vdim() });
    }
    Ok(())
}

fn expect_scalar(space: &FESpace) -> Result<(), AssemblyError> {
    if space.family().is_vector() || space.vdim() != 1 {
        return Err(AssemblyError::WrongSpace {
            expected: "scalar",
            found: space.family(),
            vdim: space.vdim(),
        });
    }
    Ok(())
}

/// Stiffness matrix `A[i][j] = ∫ coeff ∇φ_i · ∇φ_j`.
pub fn assemble_diffusion(space: &FESpace, coeff: &dyn Fn(Point) -> f64) -> Result<SparseMatrix, AssemblyError> {
    expect_family(space, Family::H1Lagrange, "H1")?;
    let n = space.ndofs();
    let mut builder = TripletBuilder::new(n, n);
    for_each_element(space, required_order(space.polynomial_degree()), |e, geo, qps| {
        let dofs = space.element_dofs(e);
        let mut local = DenseMatrix::zeros(dofs.len(), dofs.len());
        for qp in qps {
            let (_, grads) = space.physical_scalar_basis(geo, e, qp.reference)?;
            let c = coeff(qp.physical) * qp.weight;
            for i in 0..dofs.len() {
                for j in 0..dofs.len() {
                    local[(i, j)] += c * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                }
            }
        }
        builder.add_block(dofs, dofs, &local);
        Ok::<(), AssemblyError>(())
    })?;
    Ok(builder.build())
}

/// Mass matrix `M[i][j] = ∫ coeff φ_i · φ_j` of a Raviart-Thomas space.
pub fn assemble_vector_mass(space: &FESpace, coeff: &dyn Fn(Point) -> f64) -> Result<SparseMatrix, AssemblyError> {
    expect_family(space, Family::RaviartThomas, "Raviart-Thomas")?;
    let n = space.ndofs();
    let mut builder = TripletBuilder::new(n, n);
    for_each_element(space, required_order(space.polynomial_degree()), |e, geo, qps| {
        let dofs = space.element_dofs(e);
        let mut local = DenseMatrix::zeros(dofs.len(), dofs.len());
        for qp in qps {
            let (vals, _) = space.physical_vector_basis(geo, e, qp.reference)?;
            let c = coeff(qp.physical) * qp.weight;
            for i in 0..dofs.len() {
                for j in 0..dofs.len() {
                    local[(i, j)] += c * (vals[i][0] * vals[j][0] + vals[i][1] * vals[j][1]);
                }
            }
        }
        builder.add_block(dofs, dofs, &local);
        Ok::<(), AssemblyError>(())
    })?;
    Ok(builder.build())
}

/// `B[l][i] = −∫ ψ_l div φ_i`, shape `n_p × n_u`.
pub fn assemble_divergence(rt_space: &FESpace, l2_space: &FESpace) -> Result<SparseMatrix, AssemblyError> {
    expect_family(rt_space, Family::RaviartThomas, "Raviart-Thomas")?;
    expect_scalar(l2_space)?;
    if !rt_space.same_mesh(l2_space) {
        return Err(AssemblyError::MeshMismatch);
    }
    let accuracy = required_order(rt_space.polynomial_degree().max(l2_space.polynomial_degree()));
    let mut builder = TripletBuilder::new(l2_space.ndofs(), rt_space.ndofs());
    for_each_element(rt_space, accuracy, |e, geo, qps| {
        let cols = rt_space.element_dofs(e);
        let rows = l2_space.element_dofs(e);
        let mut local = DenseMatrix::zeros(rows.len(), cols.len());
        for qp in qps {
            let (_, divs) = rt_space.physical_vector_basis(geo, e, qp.reference)?;
            let (psi, _) = l2_space.physical_scalar_basis(geo, e, qp.reference)?;
            for l in 0..rows.len() {
                for i in 0..cols.len() {
                    local[(l, i)] -= qp.weight * psi[l] * divs[i];
                }
            }
        }
        builder.add_block(rows, cols, &local);
        Ok::<(), AssemblyError>(())
    })?;
    Ok(builder.build())
}

/// Load vector `b[i] = ∫ field φ_i` of a scalar space.
pub fn assemble_load(space: &FESpace, field: &dyn Fn(Point) -> f64) -> Result<Vec<f64>, AssemblyError> {
    expect_scalar(space)?;
    let mut b = vec![0.0; space.ndofs()];
    for_each_element(space, required_order(space.polynomial_degree()), |e, geo, qps| {
        let dofs = space.element_dofs(e);
        for qp in qps {
            let (vals, _) = space.physical_scalar_basis(geo, e, qp.reference)?;
            let f = field(qp.physical) * qp.weight;
            for (d, v) in dofs.iter().zip(&vals) {
                b[*d] += f * v;
            }
        }
        Ok::<(), AssemblyError>(())
    })?;
    Ok(b)
}

/// `b[i] = ∫ field · φ_i` of a Raviart-Thomas space.
pub fn assemble_vector_load(space: &FESpace, field: &dyn Fn(Point) -> [f64; 2]) -> Result<Vec<f64>, AssemblyError> {
    expect_family(space, Family::RaviartThomas, "Raviart-Thomas")?;
    let mut b = vec![0.0; space.ndofs()];
    for_each_element(space, required_order(space.polynomial_degree()), |e, geo, qps| {
        let dofs = space.element_dofs(e);
        for qp in qps {
            let (vals, _) = space.physical_vector_basis(geo, e, qp.reference)?;
            let f = field(qp.physical);
            for (d, v) in dofs.iter().zip(&vals) {
                b[*d] += qp.weight * (f[0] * v[0] + f[1] * v[1]);
            }
        }
        Ok::<(), AssemblyError>(())
    })?;
    Ok(b)
}

/// Boundary flux vector `b[i] = ∫_Γ field (φ_i · n)` of a Raviart-Thomas space.
pub fn assemble_boundary_flux(space: &FESpace, field: &dyn Fn(Point) -> f64) -> Result<Vec<f64>, AssemblyError> {
    expect_family(space, Family::RaviartThomas, "Raviart-Thomas")?;
    let mesh = space.mesh();
    let mut b = vec![0.0; space.ndofs()];
    let n = points_for_accuracy(required_order(space.polynomial_degree()));
    let (ts, ws) = gauss_legendre_unit(n)?;
    for &gid in mesh.boundary_edge_ids() {
        let e = mesh.edge_elements(gid)[0];
        let local = mesh.local_edge(e, gid).expect("edge belongs to its element");
        let geo = mesh.element_geometry(e)?;
        let kind = geo.kind();
        let [a, c] = kind.edges()[local];
        let (xa, xc) = (geo.map(kind.vertices()[a]), geo.map(kind.vertices()[c]));
        // Outward normal scaled by the edge length (straight edges).
        let normal = [xc[1] - xa[1], xa[0] - xc[0]];
        let dofs = space.element_dofs(e);
        for (&t, &w) in ts.iter().zip(&ws) {
            let p = kind.edge_point(local, t);
            let (vals, _) = space.physical_vector_basis(&geo, e, p)?;
            let f = field(geo.map(p)) * w;
            for (d, v) in dofs.iter().zip(&vals) {
                b[*d] += f * (v[0] * normal[0] + v[1] * normal[1]);
            }
        }
    }
    Ok(b)
}

/// Symmetric elimination of essential conditions `x[d] = value`: moves the
/// known columns to the right-hand side, zeroes the rows and columns and puts
/// 1 on the diagonal. Duplicate ids are allowed.
pub fn apply_essential_bc(
    a: &mut SparseMatrix,
    b: &mut [f64],
    dofs: &[usize],
    value: f64,
) -> Result<(), AssemblyError> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(AssemblyError::DimensionMismatch { expected: n, got: if a.ncols() != n { a.ncols() } else { b.len() } });
    }
    let mut fixed = vec![false; n];
    for &d in dofs {
        if d >= n {
            return Err(AssemblyError::DofOutOfRange { dof: d, ndofs: n });
        }
        fixed[d] = true;
    }
    for i in 0..n {
        let (cols, vals) = a.row_mut(i);
        if fixed[i] {
            for (c, v) in cols.iter().zip(vals.iter_mut()) {
                *v = if *c == i { 1.0 } else { 0.0 };
            }
        } else {
            for (c, v) in cols.iter().zip(vals.iter_mut()) {
                if fixed[*c] {
                    b[i] -= *v * value;
                    *v = 0.0;
                }
            }
        }
    }
    for i in 0..n {
        if fixed[i] {
            if a.get(i, i) != 1.0 {
                // Constrained row without a stored diagonal.
                let mut t = TripletBuilder::new(n, n);
                t.add(i, i, 1.0);
                *a = add(a, &t.build());
            }
            b[i] = value;
        }
    }
    Ok(())
}

fn add(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    let mut t = TripletBuilder::new(a.nrows(), a.ncols());
    for m in [a, b] {
        for i in 0..m.nrows() {
            let (cols, vals) = m.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                t.add(i, c, v);
            }
        }
    }
    t.build()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::elements::build_space;
    use crate::mesh::Mesh;

    fn single_quad() -> Arc<Mesh> {
        Arc::new(Mesh::unit_square(1, 1, Geometry::Quad).unwrap())
    }

    #[test]
    fn q1_stiffness_on_unit_square() {
        let h1 = build_space(single_quad(), Family::H1Lagrange, 1, 1).unwrap();
        let a = assemble_diffusion(&h1, &|_| 1.0).unwrap();
        // Vertices 0 and 3, 1 and 2 are diagonally opposite.
        let opposite = |i: usize, j: usize| i + j == 3;
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j {
                    2.0 / 3.0
                } else if opposite(i, j) {
                    -1.0 / 3.0
                } else {
                    -1.0 / 6.0
                };
                assert!((a.get(i, j) - expected).abs() < 1e-13, "A[{i}][{j}] = {}", a.get(i, j));
            }
        }
    }

    #[test]
    fn q1_stiffness_on_stretched_rectangle() {
        let mesh = Arc::new(Mesh::rectangle([0.0, 0.0], [2.0, 1.0], 1, 1, Geometry::Quad).unwrap());
        let h1 = build_space(mesh, Family::H1Lagrange, 1, 1).unwrap();
        let a = assemble_diffusion(&h1, &|_| 1.0).unwrap();
        let (r, s) = (2.0_f64, 0.5_f64);
        assert!((a.get(0, 0) - (r + s) / 3.0).abs() < 1e-13);
        // Neighbours along x share a long edge.
        assert!((a.get(0, 1) - (r / 6.0 - s / 3.0)).abs() < 1e-13);
        assert!((a.get(0, 2) - (s / 6.0 - r / 3.0)).abs() < 1e-13);
        assert!((a.get(0, 3) + (r + s) / 6.0).abs() < 1e-13);
    }

    #[test]
    fn q1_unit_load() {
        let h1 = build_space(single_quad(), Family::H1Lagrange, 1, 1).unwrap();
        let b = assemble_load(&h1, &|_| 1.0).unwrap();
        for v in b {
            assert!((v - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn rt0_mass_and_divergence() {
        let mesh = single_quad();
        let rt = build_space(mesh.clone(), Family::RaviartThomas, 0, 1).unwrap();
        let l2 = build_space(mesh, Family::L2Disc, 0, 1).unwrap();
        let m = assemble_vector_mass(&rt, &|_| 1.0).unwrap();
        let b = assemble_divergence(&rt, &l2).unwrap();
        assert_eq!((b.nrows(), b.ncols()), (1, 4));
        for i in 0..4 {
            assert!((m.get(i, i) - 1.0 / 3.0).abs() < 1e-14);
            assert!((b.get(0, i).abs() - 1.0).abs() < 1e-14);
            for j in 0..4 {
                let off = m.get(i, j).abs();
                if i != j {
                    assert!(off < 1e-14 || (off - 1.0 / 6.0).abs() < 1e-14);
                }
            }
        }
        // Each basis function couples to exactly one other (the opposite edge).
        for i in 0..4 {
            let coupled = (0..4).filter(|&j| j != i && m.get(i, j).abs() > 1e-14).count();
            assert_eq!(coupled, 1);
        }
    }

    #[test]
    fn boundary_flux_of_constant_is_edge_flux() {
        let rt = build_space(single_quad(), Family::RaviartThomas, 0, 1).unwrap();
        let flux = assemble_boundary_flux(&rt, &|_| 2.0).unwrap();
        for v in flux {
            assert!((v.abs() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn essential_elimination_toy() {
        let dense = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let mut a = SparseMatrix::from_dense(&dense);
        let mut b = vec![1.0, 2.0];
        apply_essential_bc(&mut a, &mut b, &[0, 0], 0.5).unwrap();
        assert_eq!(b, vec![0.5, 1.5]);
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.get(1, 1), 3.0);
    }

    #[test]
    fn elimination_rejects_bad_ids() {
        let mut a = SparseMatrix::identity(2);
        let mut b = vec![0.0; 2];
        assert!(matches!(
            apply_essential_bc(&mut a, &mut b, &[2], 0.0),
            Err(AssemblyError::DofOutOfRange { dof: 2, ndofs: 2 })
        ));
    }

    #[test]
    fn wrong_space_is_rejected() {
        let mesh = single_quad();
        let h1 = build_space(mesh.clone(), Family::H1Lagrange, 1, 1).unwrap();
        let rt = build_space(mesh, Family::RaviartThomas, 0, 1).unwrap();
        assert!(assemble_vector_mass(&h1, &|_| 1.0).is_err());
        assert!(assemble_diffusion(&rt, &|_| 1.0).is_err());
        assert!(assemble_load(&rt, &|_| 1.0).is_err());
        assert!(assemble_divergence(&rt, &rt).is_err());
    }

    #[test]
    fn divergence_rejects_foreign_mesh() {
        let rt = build_space(single_quad(), Family::RaviartThomas, 0, 1).unwrap();
        let other = Arc::new(Mesh::unit_square(2, 1, Geometry::Quad).unwrap());
        let l2 = build_space(other, Family::L2Disc, 0, 1).unwrap();
        assert!(matches!(assemble_divergence(&rt, &l2), Err(AssemblyError::MeshMismatch)));
    }
}
