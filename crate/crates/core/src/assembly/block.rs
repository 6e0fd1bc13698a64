use std::f64::consts::PI;
use std::sync::Arc;

use super::{
    apply_essential_bc, assemble_boundary_flux, assemble_diffusion, assemble_divergence, assemble_load,
    assemble_vector_load, assemble_vector_mass, AssemblyError, SparseMatrix,
};
use crate::elements::FESpace;
use crate::solvers::{DenseMatrix, LinearOperator};
use crate::Point;

pub type ScalarField = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

/// The saddle-point operator `[[M, Bᵀ], [B, 0]]` with its right-hand side.
#[derive(Clone, Debug)]
pub struct BlockSystem {
    m: SparseMatrix,
    b: SparseMatrix,
    rhs_u: Vec<f64>,
    rhs_p: Vec<f64>,
}

pub fn build_block_system(
    m: SparseMatrix,
    b: SparseMatrix,
    rhs_u: Vec<f64>,
    rhs_p: Vec<f64>,
) -> Result<BlockSystem, AssemblyError> {
    let n_u = m.nrows();
    for got in [m.ncols(), b.ncols(), rhs_u.len()] {
        if got != n_u {
            return Err(AssemblyError::DimensionMismatch { expected: n_u, got });
        }
    }
    if rhs_p.len() != b.nrows() {
        return Err(AssemblyError::DimensionMismatch { expected: b.nrows(), got: rhs_p.len() });
    }
    Ok(BlockSystem { m, b, rhs_u, rhs_p })
}

impl BlockSystem {
    pub fn mass(&self) -> &SparseMatrix {
        &self.m
    }

    pub fn divergence(&self) -> &SparseMatrix {
        &self.b
    }

    pub fn n_u(&self) -> usize {
        self.m.nrows()
    }

    pub fn n_p(&self) -> usize {
        self.b.nrows()
    }

    /// Block offsets `[0, n_u, n_u + n_p]`.
    pub fn offsets(&self) -> [usize; 3] {
        [0, self.n_u(), self.n_u() + self.n_p()]
    }

    pub fn rhs_u(&self) -> &[f64] {
        &self.rhs_u
    }

    pub fn rhs_p(&self) -> &[f64] {
        &self.rhs_p
    }

    /// Concatenated right-hand side `(rhs_u, rhs_p)`.
    pub fn rhs(&self) -> Vec<f64> {
        [self.rhs_u.as_slice(), self.rhs_p.as_slice()].concat()
    }

    /// Splits a block vector into its velocity and pressure parts.
    pub fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        x.split_at(self.n_u())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let (n_u, n) = (self.n_u(), self.offsets()[2]);
        let mut d = DenseMatrix::zeros(n, n);
        let m = self.m.to_dense();
        let b = self.b.to_dense();
        for i in 0..n_u {
            for j in 0..n_u {
                d[(i, j)] = m[(i, j)];
            }
        }
        for l in 0..self.n_p() {
            for i in 0..n_u {
                d[(n_u + l, i)] = b[(l, i)];
                d[(i, n_u + l)] = b[(l, i)];
            }
        }
        d
    }
}

impl LinearOperator for BlockSystem {
    fn dim(&self) -> usize {
        self.offsets()[2]
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n_u = self.n_u();
        let (xu, xp) = x.split_at(n_u);
        let (yu, yp) = y.split_at_mut(n_u);
        self.m.mul_vec_into(xu, yu);
        self.b.transpose_mul_add(xp, yu);
        self.b.mul_vec_into(xu, yp);
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = self.m.diagonal();
        d.resize(self.dim(), 0.0);
        d
    }
}

/// Data of the model problem in both formulations.
///
/// Lagrange form: `−div(a ∇p) = lagrange_rhs` with `p = dirichlet` on the
/// boundary. Mixed form, with `B` the negated divergence:
/// `M u + Bᵀ p = ∫ velocity_source·v + ∫_Γ natural_bc (v·n)` and
/// `B u = ∫ pressure_source q`. A consistent pair has
/// `pressure_source = −lagrange_rhs` and `natural_bc = −p` on the boundary.
#[derive(Clone)]
pub struct ProblemSpec {
    pub diffusion_coefficient: ScalarField,
    pub mass_coefficient: ScalarField,
    pub velocity_source: VectorField,
    pub pressure_source: ScalarField,
    pub natural_bc: ScalarField,
    pub lagrange_rhs: ScalarField,
    pub dirichlet: f64,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec").field("dirichlet", &self.dirichlet).finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// `−Δp = 1`, `p = 0` on the boundary, unit coefficients, no velocity source.
    pub fn unit_source() -> Self {
        ProblemSpec {
            diffusion_coefficient: Arc::new(|_| 1.0),
            mass_coefficient: Arc::new(|_| 1.0),
            velocity_source: Arc::new(|_| [0.0, 0.0]),
            pressure_source: Arc::new(|_| -1.0),
            natural_bc: Arc::new(|_| 0.0),
            lagrange_rhs: Arc::new(|_| 1.0),
            dirichlet: 0.0,
        }
    }

    /// `−Δp = 2π² sin(πx) sin(πy)` with exact solution `sin(πx) sin(πy)`,
    /// which vanishes on the boundary of the unit square.
    pub fn manufactured_sine() -> Self {
        let rhs = |p: Point| 2.0 * PI * PI * (PI * p[0]).sin() * (PI * p[1]).sin();
        ProblemSpec {
            pressure_source: Arc::new(move |p| -rhs(p)),
            lagrange_rhs: Arc::new(rhs),
            ..Self::unit_source()
        }
    }
}

/// Stiffness matrix and load vector with the essential condition eliminated.
pub fn assemble_lagrange_system(
    h1: &FESpace,
    spec: &ProblemSpec,
) -> Result<(SparseMatrix, Vec<f64>), AssemblyError> {
    let mut a = assemble_diffusion(h1, &*spec.diffusion_coefficient)?;
    let mut b = assemble_load(h1, &*spec.lagrange_rhs)?;
    let dofs = h1.essential_boundary_dofs()?;
    apply_essential_bc(&mut a, &mut b, &dofs, spec.dirichlet)?;
    Ok((a, b))
}

pub fn assemble_mixed_system(
    rt: &FESpace,
    l2: &FESpace,
    spec: &ProblemSpec,
) -> Result<BlockSystem, AssemblyError> {
    let m = assemble_vector_mass(rt, &*spec.mass_coefficient)?;
    let b = assemble_divergence(rt, l2)?;
    let mut rhs_u = assemble_vector_load(rt, &*spec.velocity_source)?;
    let flux = assemble_boundary_flux(rt, &*spec.natural_bc)?;
    rhs_u.iter_mut().zip(&flux).for_each(|(r, f)| *r += f);
    let rhs_p = assemble_load(l2, &*spec.pressure_source)?;
    build_block_system(m, b, rhs_u, rhs_p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elements::{build_space, Family};
    use crate::mesh::Mesh;
    use crate::reference::Geometry;

    fn mixed(order: usize) -> BlockSystem {
        let mesh = Arc::new(Mesh::unit_square(2, 2, Geometry::Quad).unwrap());
        let rt = build_space(mesh.clone(), Family::RaviartThomas, order, 1).unwrap();
        let l2 = build_space(mesh, Family::L2Disc, order, 1).unwrap();
        assemble_mixed_system(&rt, &l2, &ProblemSpec::unit_source()).unwrap()
    }

    #[test]
    fn block_operator_is_symmetric_and_matches_dense() {
        let sys = mixed(1);
        let d = sys.to_dense();
        let n = sys.dim();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(d[(i, j)], d[(j, i)]);
            }
            for j in sys.n_u()..n {
                if i >= sys.n_u() {
                    assert_eq!(d[(i, j)], 0.0);
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut y = vec![0.0; n];
        sys.apply(&x, &mut y);
        for (a, b) in y.iter().zip(d.mul_vec(&x)) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(sys.mass().max_asymmetry() < 1e-14);
    }

    #[test]
    fn unit_source_pressure_rhs_is_minus_cell_area() {
        let sys = mixed(0);
        for v in sys.rhs_p() {
            assert!((v + 0.25).abs() < 1e-14);
        }
        assert!(sys.rhs_u().iter().all(|&v| v == 0.0));
        assert_eq!(sys.rhs().len(), sys.offsets()[2]);
    }

    #[test]
    fn lagrange_system_has_unit_boundary_rows() {
        let mesh = Arc::new(Mesh::unit_square(2, 2, Geometry::Quad).unwrap());
        let h1 = build_space(mesh, Family::H1Lagrange, 2, 1).unwrap();
        let (a, b) = assemble_lagrange_system(&h1, &ProblemSpec::unit_source()).unwrap();
        for d in h1.essential_boundary_dofs().unwrap() {
            assert_eq!(a.get(d, d), 1.0);
            assert_eq!(b[d], 0.0);
            let (cols, vals) = a.row(d);
            for (&c, &v) in cols.iter().zip(vals) {
                assert!(c == d || v == 0.0);
            }
        }
        assert!(a.max_asymmetry() < 1e-14);
    }

    #[test]
    fn block_dimension_checks() {
        let m = SparseMatrix::identity(3);
        let b = SparseMatrix::zeros(2, 3);
        assert!(build_block_system(m.clone(), b.clone(), vec![0.0; 3], vec![0.0; 2]).is_ok());
        assert!(build_block_system(m.clone(), b.clone(), vec![0.0; 2], vec![0.0; 2]).is_err());
        assert!(build_block_system(m, b, vec![0.0; 3], vec![0.0; 3]).is_err());
    }
}
