use rayon::prelude::*;

use super::{run_single, RunConfig, Study};
use crate::mesh::Mesh;
use crate::reference::Geometry;
use crate::solvers::SolverConfig;
use crate::Error;

/// Errors against the exact solution on one mesh, with the observed rate
/// relative to the previous (coarser) mesh of the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub order: usize,
    pub refinements: usize,
    pub h: f64,
    pub lagrange_pressure: f64,
    pub mixed_pressure: f64,
    pub mixed_velocity: f64,
    pub lagrange_pressure_rate: Option<f64>,
    pub mixed_pressure_rate: Option<f64>,
    pub mixed_velocity_rate: Option<f64>,
}

/// `log(e_{i-1}/e_i) / log(h_{i-1}/h_i)` for consecutive pairs.
pub fn observed_rates(h: &[f64], err: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(err.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

/// Sine manufactured solution on the unit square, starting from a single
/// quad refined `1..=refinements` times.
pub fn manufactured_study(
    orders: &[usize],
    refinements: usize,
    solver: SolverConfig,
) -> Result<Vec<ConvergenceRow>, Error> {
    let base = Mesh::unit_square(1, 1, Geometry::Quad)?;
    let cases: Vec<(usize, usize)> =
        orders.iter().flat_map(|&k| (1..=refinements).map(move |r| (k, r))).collect();
    let rows = cases
        .par_iter()
        .map(|&(order, r)| {
            let cfg = RunConfig { solver, study: Study::Manufactured, ..RunConfig::new(order, r) };
            run_single(&base, &cfg).map(|out| out.row)
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut out: Vec<ConvergenceRow> = Vec::with_capacity(rows.len());
    for row in rows {
        let prev = out.last().filter(|p| p.order == row.order);
        let rate = |e0: f64, e1: f64, h0: f64| (e0 / e1).ln() / (h0 / row.h).ln();
        out.push(ConvergenceRow {
            order: row.order,
            refinements: row.refinements,
            h: row.h,
            lagrange_pressure: row.p_err,
            mixed_pressure: row.pmx_err,
            mixed_velocity: row.umx_err,
            lagrange_pressure_rate: prev.map(|p| rate(p.lagrange_pressure, row.p_err, p.h)),
            mixed_pressure_rate: prev.map(|p| rate(p.mixed_pressure, row.pmx_err, p.h)),
            mixed_velocity_rate: prev.map(|p| rate(p.mixed_velocity, row.umx_err, p.h)),
        });
    }
    Ok(out)
}
