use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use lagmix::experiment::{
    emit_plot_data, format_sci, load_mesh, manufactured_study, run_single, run_sweep, write_csv, ExperimentRow,
    RunConfig, Study, STAR_MESH,
};
use lagmix::mesh::{parse_mfem_mesh, Mesh};
use lagmix::postprocess::{write_vtk, ProjectionKind};
use lagmix::solvers::{Preconditioner, SolverConfig};
use lagmix::Error;

/// Highest Lagrange order accepted without `--allow-high-order`.
const DEFAULT_MAX_ORDER: usize = 6;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Projection {
    /// Elementwise L2 projection.
    L2,
    /// Interpolation at Gauss-Legendre points.
    Gauss,
}

/// Solve -Δp = 1 with Lagrange and Raviart-Thomas mixed elements and
/// compare the two.
#[derive(Debug, Parser)]
#[command(version, about)]
struct Cli {
    /// MFEM v1.0 mesh file (defaults to the bundled star mesh).
    #[arg(short, long)]
    mesh: Option<PathBuf>,
    /// Lagrange order k; the mixed method uses order k-1.
    #[arg(short, long, default_value_t = 1)]
    order: usize,
    /// Uniform refinements of the input mesh.
    #[arg(short, long, default_value_t = 0)]
    refinements: usize,
    /// Run every (order, r) with r from 0 to the matching --max-refs entry.
    #[arg(long)]
    sweep: bool,
    #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3])]
    orders: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [3, 2, 1])]
    max_refs: Vec<usize>,
    /// Write the result table here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write VTK files of a single run into this directory.
    #[arg(long)]
    vtk: Option<PathBuf>,
    /// Write per-order plot data files into this directory.
    #[arg(long)]
    plot_dir: Option<PathBuf>,
    /// Convergence study with the sine manufactured solution on the unit
    /// square; uses --orders and --refinements (default 4).
    #[arg(long)]
    manufactured: bool,
    #[arg(long, default_value_t = 1e-6)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-10)]
    atol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Diagonal scaling for both Krylov solvers.
    #[arg(long)]
    jacobi: bool,
    #[arg(long, value_enum, default_value_t = Projection::Gauss)]
    projection: Projection,
    /// Permit Lagrange orders above 6.
    #[arg(long)]
    allow_high_order: bool,
}

impl Cli {
    fn solver(&self) -> Result<SolverConfig, Error> {
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.max_iter > 0) {
            return Err(Error::InvalidInput("--rtol, --atol and --max-iter must be positive".into()));
        }
        Ok(SolverConfig {
            rtol: self.rtol,
            atol: self.atol,
            max_iter: self.max_iter,
            preconditioner: if self.jacobi { Preconditioner::Jacobi } else { Preconditioner::None },
        })
    }

    fn check_orders(&self, orders: &[usize]) -> Result<(), Error> {
        let cap = if self.allow_high_order { lagmix::elements::MAX_H1_ORDER } else { DEFAULT_MAX_ORDER };
        match orders.iter().find(|&&k| k == 0 || k > cap) {
            Some(k) => Err(Error::InvalidInput(format!(
                "order {k} outside 1..={cap}{}",
                if self.allow_high_order { "" } else { " (use --allow-high-order for more)" }
            ))),
            None => Ok(()),
        }
    }

    fn mesh(&self) -> Result<Mesh, Error> {
        match &self.mesh {
            Some(path) => load_mesh(path),
            None => Ok(parse_mfem_mesh(STAR_MESH)?),
        }
    }
}

fn write_table(cli: &Cli, rows: &[ExperimentRow]) -> Result<(), Error> {
    match &cli.csv {
        Some(path) => write_csv(BufWriter::new(File::create(path)?), rows),
        None => write_csv(io::stdout().lock(), rows),
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let solver = cli.solver()?;
    if cli.manufactured {
        cli.check_orders(&cli.orders)?;
        let refs = if cli.refinements == 0 { 4 } else { cli.refinements };
        let rows = manufactured_study(&cli.orders, refs, solver)?;
        let rate = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.3}"));
        let mut out = io::stdout().lock();
        writeln!(out, "order,refinements,h,p_lagrange,rate,p_mixed,rate,u_mixed,rate")?;
        for r in rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.order,
                r.refinements,
                format_sci(r.h),
                format_sci(r.lagrange_pressure),
                rate(r.lagrange_pressure_rate),
                format_sci(r.mixed_pressure),
                rate(r.mixed_pressure_rate),
                format_sci(r.mixed_velocity),
                rate(r.mixed_velocity_rate),
            )?;
        }
        return Ok(());
    }

    let mesh = cli.mesh()?;
    let template = RunConfig {
        order: cli.order,
        refinements: cli.refinements,
        solver,
        projection: match cli.projection {
            Projection::L2 => ProjectionKind::L2,
            Projection::Gauss => ProjectionKind::GaussInterpolation,
        },
        study: Study::UnitSource,
    };

    let rows = if cli.sweep {
        cli.check_orders(&cli.orders)?;
        match run_sweep(&mesh, &cli.orders, &cli.max_refs, &template) {
            Ok(rows) => rows,
            Err(failure) => {
                write_table(cli, &failure.rows)?;
                return Err(Error::InvalidInput(format!(
                    "order {} with {} refinements failed: {}",
                    failure.order, failure.refinements, failure.error
                )));
            }
        }
    } else {
        cli.check_orders(&[cli.order])?;
        let out = run_single(&mesh, &template)?;
        if let Some(dir) = &cli.vtk {
            std::fs::create_dir_all(dir)?;
            let s = &out.solutions;
            let path = dir.join(format!("solution_o{}_r{}.vtk", cli.order, cli.refinements));
            write_vtk(
                BufWriter::new(File::create(&path)?),
                &s.mesh,
                &[
                    ("pressure", &s.pressure),
                    ("velocity_x", &s.velocity_x),
                    ("velocity_y", &s.velocity_y),
                    ("mixed_pressure", &s.mixed_pressure),
                    ("mixed_velocity", &s.mixed_velocity),
                ],
            )?;
            eprintln!("wrote {}", path.display());
        }
        for (name, r) in [("CG", &out.solutions.cg), ("MINRES", &out.solutions.minres)] {
            eprintln!(
                "{name} {} in {} iterations, residual {}",
                if r.converged { "converged" } else { "did not converge" },
                r.iterations,
                format_sci(r.final_residual)
            );
        }
        vec![out.row]
    };
    for r in rows.iter().filter(|r| !(r.cg_converged && r.minres_converged)) {
        eprintln!("warning: solver did not converge for order {} refinements {}", r.order, r.refinements);
    }
    write_table(cli, &rows)?;
    if let Some(dir) = &cli.plot_dir {
        for path in emit_plot_data(&rows, dir)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
