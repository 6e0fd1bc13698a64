//! The refinement study: one run per (order, refinements) pair.

mod convergence;
mod report;

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::assembly::{assemble_lagrange_system, assemble_mixed_system, ProblemSpec};
use crate::elements::{build_space, FESpace, Family, MAX_H1_ORDER};
use crate::mesh::{parse_mfem_mesh, refine_times, Mesh};
use crate::postprocess::{
    combine_velocity_error, comparison_error_with_accuracy, compute_l2_error, compute_vector_l2_error, l2_norm,
    project_rt_components, recover_gradient, vector_l2_norm, GridFunction, ProjectionKind, ReferenceFields,
};
use crate::quadrature::required_order;
use crate::solvers::{cg_solve, minres_solve, SolveReport, SolverConfig};
use crate::Error;

pub use convergence::{manufactured_study, observed_rates, ConvergenceRow};
pub use report::{
    emit_plot_data, format_sci, parse_csv, parse_plot_data, read_csv, write_csv, PlotData, CSV_HEADER, PLOT_COLUMNS,
};

/// The 20-quad star-shaped mesh from the MFEM distribution.
pub const STAR_MESH: &str = include_str!("../../data/star.mesh");

/// One line of the study table. Raw norms plus the same norms divided by
/// the reference field norms.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub order: usize,
    pub refinements: usize,
    /// Largest element diameter.
    pub h: f64,
    /// Largest singular value of the element Jacobians at the cell centers.
    pub h_jacobian: f64,
    pub p_comp: f64,
    pub p_err: f64,
    pub pmx_err: f64,
    pub u_comp: f64,
    pub u_err: f64,
    pub umx_err: f64,
    pub p_comp_normalized: f64,
    pub p_err_normalized: f64,
    pub pmx_err_normalized: f64,
    pub u_comp_normalized: f64,
    pub u_err_normalized: f64,
    pub umx_err_normalized: f64,
    pub cg_iters: usize,
    pub minres_iters: usize,
    pub cg_converged: bool,
    pub minres_converged: bool,
    pub wall_ms: f64,
}

/// Which reference fields and data a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Study {
    /// `−Δp = 1`, errors measured against `eˣ sin y`.
    #[default]
    UnitSource,
    /// `−Δp = 2π² sin(πx) sin(πy)`, errors against the exact solution.
    Manufactured,
}

impl Study {
    pub fn problem(self) -> ProblemSpec {
        match self {
            Study::UnitSource => ProblemSpec::unit_source(),
            Study::Manufactured => ProblemSpec::manufactured_sine(),
        }
    }

    pub fn reference(self) -> ReferenceFields {
        match self {
            Study::UnitSource => ReferenceFields::exp_sin(),
            Study::Manufactured => ReferenceFields::sine(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    /// Lagrange order `k`; the mixed pair uses order `k − 1`.
    pub order: usize,
    pub refinements: usize,
    pub solver: SolverConfig,
    pub projection: ProjectionKind,
    pub study: Study,
}

impl RunConfig {
    pub fn new(order: usize, refinements: usize) -> Self {
        RunConfig {
            order,
            refinements,
            solver: SolverConfig::default(),
            projection: ProjectionKind::default(),
            study: Study::default(),
        }
    }
}

/// Discrete solutions of one run, kept for export.
#[derive(Clone, Debug)]
pub struct Solutions {
    pub mesh: Arc<Mesh>,
    pub pressure: GridFunction,
    pub velocity_x: GridFunction,
    pub velocity_y: GridFunction,
    pub mixed_pressure: GridFunction,
    pub mixed_velocity: GridFunction,
    pub mixed_velocity_x: GridFunction,
    pub mixed_velocity_y: GridFunction,
    pub cg: SolveReport,
    pub minres: SolveReport,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub row: ExperimentRow,
    pub solutions: Solutions,
}

pub fn load_mesh(path: &Path) -> Result<Mesh, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_mfem_mesh(&text)?)
}

fn space(mesh: &Arc<Mesh>, family: Family, order: usize) -> Result<Arc<FESpace>, Error> {
    Ok(Arc::new(build_space(mesh.clone(), family, order, 1)?))
}

/// Refines `base`, solves both formulations and measures every metric.
pub fn run_single(base: &Mesh, cfg: &RunConfig) -> Result<RunOutput, Error> {
    let k = cfg.order;
    if !(1..=MAX_H1_ORDER).contains(&k) {
        return Err(Error::InvalidInput(format!("order {k} outside 1..={MAX_H1_ORDER}")));
    }
    let start = Instant::now();
    let mesh = Arc::new(refine_times(base, cfg.refinements));
    let h1 = space(&mesh, Family::H1Lagrange, k)?;
    let rt = space(&mesh, Family::RaviartThomas, k - 1)?;
    let l2 = space(&mesh, Family::L2Disc, k - 1)?;
    let problem = cfg.study.problem();
    let reference = cfg.study.reference();

    let (a, b) = assemble_lagrange_system(&h1, &problem)?;
    let (x, cg) = cg_solve(&a, &b, &vec![0.0; b.len()], &cfg.solver)?;
    let system = assemble_mixed_system(&rt, &l2, &problem)?;
    let rhs = system.rhs();
    let (xm, minres) = minres_solve(&system, &rhs, &vec![0.0; rhs.len()], &cfg.solver)?;
    let (xu, xp) = system.split(&xm);

    let pressure = GridFunction::new(h1, x)?;
    let mixed_velocity = GridFunction::new(rt, xu.to_vec())?;
    let mixed_pressure = GridFunction::new(l2.clone(), xp.to_vec())?;
    let (velocity_x, velocity_y) = recover_gradient(&pressure, &l2, cfg.projection)?;
    let (mixed_velocity_x, mixed_velocity_y) = project_rt_components(&mixed_velocity, &l2, cfg.projection)?;

    let acc = required_order(k);
    let p_exact = &*reference.pressure;
    let u_exact = &*reference.velocity;
    let p_norm = l2_norm(&mesh, p_exact, acc)?;
    let u_norm = vector_l2_norm(&mesh, u_exact, acc)?;
    let p_comp = comparison_error_with_accuracy(&mixed_pressure, &pressure, acc)?;
    let p_err = compute_l2_error(&pressure, p_exact, acc)?;
    let pmx_err = compute_l2_error(&mixed_pressure, p_exact, acc)?;
    let u_comp = combine_velocity_error(
        comparison_error_with_accuracy(&mixed_velocity_x, &velocity_x, acc)?,
        comparison_error_with_accuracy(&mixed_velocity_y, &velocity_y, acc)?,
    );
    let u_err = combine_velocity_error(
        compute_l2_error(&velocity_x, &|p| u_exact(p)[0], acc)?,
        compute_l2_error(&velocity_y, &|p| u_exact(p)[1], acc)?,
    );
    let umx_err = compute_vector_l2_error(&mixed_velocity, u_exact, acc)?;
    let scale = |v: f64, n: f64| if n > 0.0 { v / n } else { f64::NAN };

    let row = ExperimentRow {
        order: k,
        refinements: cfg.refinements,
        h: mesh.h(),
        h_jacobian: mesh.h_jacobian(),
        p_comp,
        p_err,
        pmx_err,
        u_comp,
        u_err,
        umx_err,
        p_comp_normalized: scale(p_comp, p_norm),
        p_err_normalized: scale(p_err, p_norm),
        pmx_err_normalized: scale(pmx_err, p_norm),
        u_comp_normalized: scale(u_comp, u_norm),
        u_err_normalized: scale(u_err, u_norm),
        umx_err_normalized: scale(umx_err, u_norm),
        cg_iters: cg.iterations,
        minres_iters: minres.iterations,
        cg_converged: cg.converged,
        minres_converged: minres.converged,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(RunOutput {
        row,
        solutions: Solutions {
            mesh,
            pressure,
            velocity_x,
            velocity_y,
            mixed_pressure,
            mixed_velocity,
            mixed_velocity_x,
            mixed_velocity_y,
            cg,
            minres,
        },
    })
}

/// A sweep that stopped at a failing case. `rows` holds every row that
/// precedes the failure in sweep order.
#[derive(Debug)]
pub struct SweepFailure {
    pub rows: Vec<ExperimentRow>,
    pub order: usize,
    pub refinements: usize,
    pub error: Error,
}

/// Runs every `(orders[i], r)` with `r ≤ max_refinements[i]`, in parallel,
/// returning rows ordered by order and then refinements.
pub fn run_sweep(
    base: &Mesh,
    orders: &[usize],
    max_refinements: &[usize],
    template: &RunConfig,
) -> Result<Vec<ExperimentRow>, Box<SweepFailure>> {
    let fail = |error| Box::new(SweepFailure { rows: Vec::new(), order: 0, refinements: 0, error });
    if orders.is_empty() || orders.len() != max_refinements.len() {
        return Err(fail(Error::InvalidInput(format!(
            "need one refinement bound per order, got {} orders and {} bounds",
            orders.len(),
            max_refinements.len()
        ))));
    }
    let cases: Vec<(usize, usize)> = orders
        .iter()
        .zip(max_refinements)
        .flat_map(|(&k, &r)| (0..=r).map(move |r| (k, r)))
        .collect();
    let results: Vec<Result<ExperimentRow, Error>> = cases
        .par_iter()
        .map(|&(order, refinements)| {
            let cfg = RunConfig { order, refinements, ..*template };
            run_single(base, &cfg).map(|out| out.row)
        })
        .collect();
    let mut rows = Vec::with_capacity(cases.len());
    for ((order, refinements), result) in cases.into_iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(error) => return Err(Box::new(SweepFailure { rows, order, refinements, error })),
        }
    }
    Ok(rows)
}
