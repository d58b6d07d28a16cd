//! End-to-end run driver: build a problem from a config, integrate it,
//! write artifacts, and run convergence studies against the exact Burgers
//! solution.

use crate::basis::Basis;
use crate::config::{RunConfig, TimeMode};
use crate::error::{Error, Result};
use crate::imex::{integrate, RunStats, TimeControl};
use crate::mesh::Mesh;
use crate::output;
use crate::output::FieldGrid;
use crate::problem::Problem;
use crate::problems::{burgers_exact, make_problem};
use crate::sipdg::Operators;
use crate::solution::DgSolution;
use std::path::PathBuf;
use std::time::Instant;

/// Problem from the catalog with the config's parameter overrides applied.
pub fn build_problem(config: &RunConfig) -> Result<Problem> {
    let mut problem = make_problem(&config.problem, config.tau, config.u_b)?;
    if let Some(eps) = config.epsilon {
        if !(eps >= 0.0) {
            return Err(Error::config("epsilon must be >= 0"));
        }
        problem.epsilon = eps;
    }
    problem.t_end = config.t_end;
    Ok(problem)
}

pub fn build_operators(config: &RunConfig) -> Result<Operators> {
    let problem = build_problem(config)?;
    let mesh = if problem.dim == 1 {
        Mesh::new_1d(problem.x0, problem.x1, config.n)
    } else {
        let ny = config.ny.unwrap_or(config.n);
        Mesh::new_2d(problem.x0, problem.x1, config.n, problem.y0, problem.y1, ny)
    };
    let basis = Basis::new(problem.dim, config.k);
    Operators::assemble(problem, mesh, basis)
}

pub fn initial_solution(ops: &Operators) -> DgSolution {
    let init = ops.problem.initial.clone();
    DgSolution::project(
        ops.mesh.clone(),
        ops.basis.clone(),
        2 * (ops.basis.degree + 1),
        move |x, y| init(x, y),
    )
}

pub fn time_control(config: &RunConfig) -> TimeControl {
    match config.time_mode {
        TimeMode::Fixed => TimeControl::Fixed(config.dt.expect("validated")),
        TimeMode::Cfl => TimeControl::Cfl {
            cfl: config.cfl,
            dt_max: config.dt_max,
        },
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub solution: DgSolution,
    pub stats: RunStats,
    pub mass_initial: f64,
    pub mass_final: f64,
    pub wall_seconds: f64,
}

/// Integrate the configured problem without touching the filesystem.
pub fn run_in_memory(config: &RunConfig) -> Result<RunOutput> {
    let ops = build_operators(config)?;
    let mut sol = initial_solution(&ops);
    let mass_initial = sol.total_mass();
    let start = Instant::now();
    let mut last = (0usize, 0.0f64);
    let stats = integrate(
        &ops,
        &mut sol,
        0.0,
        config.t_end,
        time_control(config),
        &config.limiter,
        config.max_steps,
        |info, _| last = (info.step, info.t),
    )
    .map_err(|e| match e {
        Error::Solver(msg) => Error::Solver(format!(
            "failed during step {} (last completed time t = {}): {msg}",
            last.0 + 1,
            last.1
        )),
        other => other,
    })?;
    Ok(RunOutput {
        solution: sol,
        stats,
        mass_initial,
        mass_final: 0.0,
        wall_seconds: start.elapsed().as_secs_f64(),
    }
    .finish())
}

impl RunOutput {
    fn finish(mut self) -> Self {
        self.mass_final = self.solution.total_mass();
        self
    }
}

/// Full run: integrate and write the selected artifact files into
/// `config.out_dir`. Returns the written paths alongside the run output.
pub fn run_simulation(config: &RunConfig) -> Result<(RunOutput, Vec<PathBuf>)> {
    if config.slice_axis.is_some() && !config.problem.starts_with("mbl2d") {
        return Err(Error::config("slice output requires a 2D problem"));
    }
    let run = run_in_memory(config)?;
    let dir = PathBuf::from(&config.out_dir);
    let mut files = Vec::new();
    let emit = |name: &str, text: String, files: &mut Vec<PathBuf>| -> Result<()> {
        let path = dir.join(name);
        output::write_text(&path, &text)?;
        files.push(path);
        Ok(())
    };
    if config.field {
        emit("field.csv", output::field_csv(&run.solution), &mut files)?;
    }
    if config.modal {
        emit("modal.csv", output::modal_csv(&run.solution), &mut files)?;
    }
    let two_d = run.solution.mesh.dim == 2;
    if two_d {
        let grid = FieldGrid::from_solution(&run.solution);
        if let (Some(axis), Some(coord)) = (config.slice_axis, config.slice_coord) {
            emit("slice.csv", output::slice_csv(&grid, axis, coord)?, &mut files)?;
        }
        let levels = output::default_levels(config.contour_levels);
        emit("contour.csv", output::contour_csv(&grid, &levels)?, &mut files)?;
    }
    let stats: Vec<(&str, String)> = vec![
        ("steps", run.stats.steps.to_string()),
        ("final_time", format!("{}", config.t_end)),
        ("last_dt", format!("{}", run.stats.last_dt)),
        ("cg_iterations", run.stats.cg_iterations.to_string()),
        (
            "troubled_cells_total",
            run.stats.troubled_cells_total.to_string(),
        ),
        ("mass_initial", output::fmt_csv(run.mass_initial)),
        ("mass_final", output::fmt_csv(run.mass_final)),
        ("wall_seconds", format!("{:.3}", run.wall_seconds)),
    ];
    emit(
        "manifest.txt",
        output::manifest_text(config, &stats),
        &mut files,
    )?;
    Ok((run, files))
}

#[derive(Debug, Clone)]
pub struct StudyRow {
    pub k: usize,
    pub n: usize,
    pub limiter: String,
    pub error: f64,
    pub order: Option<f64>,
}

/// Domain-RMS L2 error against the exact Burgers profile, integrated with
/// 2(k+1) quadrature points per axis and divided by sqrt(|domain|) so the
/// value is comparable across domain sizes.
pub fn burgers_l2_error(sol: &DgSolution, t: f64) -> f64 {
    let raw = sol.l2_error(2 * (sol.basis.degree + 1), |x, _| {
        burgers_exact(x, t).expect("safeguarded iteration converges on the bracket")
    });
    raw / (sol.mesh.x1 - sol.mesh.x0).sqrt()
}

/// Run the refinement list at fixed dt and tabulate errors and observed
/// orders against the exact Burgers solution.
pub fn convergence_study(config: &RunConfig) -> Result<Vec<StudyRow>> {
    if config.problem != "burgers" {
        return Err(Error::config(
            "convergence studies need an exact-solution oracle (problem = burgers)",
        ));
    }
    if config.study.is_empty() {
        return Err(Error::config("convergence study needs a refinement list"));
    }
    let dt = config.dt.unwrap_or(5e-4);
    let mut rows: Vec<StudyRow> = Vec::new();
    for &n in &config.study {
        let mut c = config.clone();
        c.n = n;
        c.time_mode = TimeMode::Fixed;
        c.dt = Some(dt);
        let run = run_in_memory(&c)?;
        let error = burgers_l2_error(&run.solution, config.t_end);
        let order = rows.last().map(|prev: &StudyRow| {
            (prev.error / error).ln() / (n as f64 / prev.n as f64).ln()
        });
        rows.push(StudyRow {
            k: config.k,
            n,
            limiter: config.limiter.kind_name().to_string(),
            error,
            order,
        });
    }
    Ok(rows)
}

pub fn study_csv(rows: &[StudyRow]) -> String {
    let mut s = String::from("k,n,limiter,error,order\n");
    for r in rows {
        let order = r.order.map(output::fmt_csv).unwrap_or_default();
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k,
            r.n,
            r.limiter,
            output::fmt_csv(r.error),
            order
        ));
    }
    s
}
