//! Implicit-explicit SSP Runge-Kutta time stepping.
//!
//! The semi-discrete system is
//!
//! ```text
//! W du/dt = -A_adv(u, t) - eps A2 u + r(t),    W = M + tau eps^2 A1,
//! ```
//!
//! advanced with a third-order SSP IMEX pair: the advection residual is
//! explicit, the linear diffusion term and its Dirichlet data are implicit.
//! Every implicit stage solves an SPD system (W + dt a_ii eps A2) by
//! Jacobi-preconditioned CG, warm-started from the previous stage. Limiters
//! run once after each completed step, never inside stages.

use crate::cg::solve_pcg;
use crate::error::{Error, Result};
use crate::limiter::{apply_limiter, LimiterConfig};
use crate::solution::DgSolution;
use crate::sipdg::Operators;
use crate::sparse::CsrMatrix;

const MAX_STAGES: usize = 4;
const CG_REL_TOL: f64 = 1e-12;

/// Additive Butcher pair: explicit part (a, b, c) with zero diagonal,
/// diagonally implicit part (at, bt, ct).
#[derive(Debug, Clone)]
pub struct Tableau {
    pub stages: usize,
    pub a: [[f64; MAX_STAGES]; MAX_STAGES],
    pub b: [f64; MAX_STAGES],
    pub c: [f64; MAX_STAGES],
    pub at: [[f64; MAX_STAGES]; MAX_STAGES],
    pub bt: [f64; MAX_STAGES],
    pub ct: [f64; MAX_STAGES],
    pub name: &'static str,
}

/// Third-order SSP IMEX pair whose explicit part is the Shu-Osher SSP RK3
/// scheme (padded by an inert first stage) and whose implicit part is
/// singly diagonally implicit with diagonal `ALPHA`. Every third-order
/// condition holds separately for each part.
pub fn ssp3_tableau() -> Tableau {
    const ALPHA: f64 = 0.24169426078821;
    let beta = ALPHA / 4.0;
    let eta = (1.0 - 2.0 * ALPHA) / 4.0;
    let mut a = [[0.0; MAX_STAGES]; MAX_STAGES];
    a[2][1] = 1.0;
    a[3][1] = 0.25;
    a[3][2] = 0.25;
    let mut at = [[0.0; MAX_STAGES]; MAX_STAGES];
    at[0][0] = ALPHA;
    at[1][0] = -ALPHA;
    at[1][1] = ALPHA;
    at[2][1] = 1.0 - ALPHA;
    at[2][2] = ALPHA;
    at[3][0] = beta;
    at[3][1] = eta;
    at[3][2] = (1.0 - 3.0 * ALPHA) / 4.0;
    at[3][3] = ALPHA;
    Tableau {
        stages: 4,
        a,
        b: [0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
        c: [0.0, 0.0, 1.0, 0.5],
        at,
        bt: [0.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
        ct: [ALPHA, 0.0, 1.0, 0.5],
        name: "SSP3(4,3,3)",
    }
}

/// Largest violation over the row-sum and third-order conditions of both
/// parts: sum b = 1, sum b c = 1/2, sum b c^2 = 1/3, sum b_i a_ij c_j = 1/6.
pub fn order_condition_residual(t: &Tableau) -> f64 {
    let s = t.stages;
    let mut worst = 0.0f64;
    let mut check = |v: f64| worst = worst.max(v.abs());
    for (a, b, c) in [(&t.a, &t.b, &t.c), (&t.at, &t.bt, &t.ct)] {
        for i in 0..s {
            let row: f64 = (0..s).map(|j| a[i][j]).sum();
            check(row - c[i]);
        }
        check((0..s).map(|i| b[i]).sum::<f64>() - 1.0);
        check((0..s).map(|i| b[i] * c[i]).sum::<f64>() - 0.5);
        check((0..s).map(|i| b[i] * c[i] * c[i]).sum::<f64>() - 1.0 / 3.0);
        let bac: f64 = (0..s)
            .map(|i| b[i] * (0..s).map(|j| a[i][j] * c[j]).sum::<f64>())
            .sum();
        check(bac - 1.0 / 6.0);
    }
    // Explicit diagonal must be zero, implicit diagonal nonnegative.
    for i in 0..s {
        check(t.a[i][i]);
        if t.at[i][i] < 0.0 {
            check(t.at[i][i]);
        }
    }
    worst
}

/// CFL time step dt = CFL min(dx/max|F'|, dy/max|G'|) with CFL = 1/(2k+1)
/// unless overridden; wave speeds are maximized over the solution's sampled
/// value range. Degenerate (zero-speed) problems fall back to `dt_max`.
pub fn cfl_dt(ops: &Operators, sol: &DgSolution, cfl_override: Option<f64>, dt_max: f64) -> f64 {
    let k = ops.basis.degree;
    let cfl = cfl_override.unwrap_or(1.0 / (2.0 * k as f64 + 1.0));
    let (lo, hi) = sol.value_range(&ops.tables);
    let mut dt = f64::INFINITY;
    for axis in 0..ops.mesh.dim {
        let h = if axis == 0 { ops.mesh.dx } else { ops.mesh.dy };
        let speed = ops.problem.flux(axis).max_abs_speed(lo, hi);
        if speed > 0.0 {
            dt = dt.min(cfl * h / speed);
        }
    }
    dt.min(dt_max)
}

/// Time-step selection for `integrate`.
#[derive(Debug, Clone, Copy)]
pub enum TimeControl {
    /// dt from the CFL bound each step; `None` fields take defaults
    /// (CFL = 1/(2k+1), dt_max = (t_end - t0)/100).
    Cfl {
        cfl: Option<f64>,
        dt_max: Option<f64>,
    },
    Fixed(f64),
}

/// Per-step observer payload.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub troubled_cells: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunStats {
    pub steps: usize,
    pub cg_iterations: usize,
    pub troubled_cells_total: usize,
    pub last_dt: f64,
}

/// One-step integrator with a cached stage matrix (the implicit diagonal
/// is constant, so a single matrix serves every stage at a given dt).
pub struct Stepper<'a> {
    ops: &'a Operators,
    tableau: Tableau,
    cached: Option<(f64, f64, CsrMatrix)>,
    pub cg_iterations: usize,
}

impl<'a> Stepper<'a> {
    pub fn new(ops: &'a Operators) -> Self {
        Stepper {
            ops,
            tableau: ssp3_tableau(),
            cached: None,
            cg_iterations: 0,
        }
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    fn stage_matrix(&mut self, dt: f64, diag: f64) -> &CsrMatrix {
        let scale = dt * diag * self.ops.problem.epsilon;
        let hit = matches!(&self.cached, Some((d, s, _)) if *d == dt && *s == scale);
        if !hit {
            let m = if scale == 0.0 {
                self.ops.w.clone()
            } else {
                self.ops.w.linear_combination(1.0, &self.ops.a2, scale)
            };
            self.cached = Some((dt, scale, m));
        }
        &self.cached.as_ref().unwrap().2
    }

    /// Advance `u` (modal coefficients) from `t` by `dt`.
    pub fn step(&mut self, u: &mut [f64], t: f64, dt: f64) -> Result<()> {
        let ops = self.ops;
        let tab = self.tableau.clone();
        let s = tab.stages;
        let n = u.len();
        let eps = ops.problem.epsilon;

        let w_un = ops.w.mul_vec_alloc(u);
        let mut f_stages: Vec<Vec<f64>> = Vec::with_capacity(s);
        let mut g_stages: Vec<Vec<f64>> = Vec::with_capacity(s);
        // Skip explicit residuals that no later coefficient references.
        let f_needed: Vec<bool> = (0..s)
            .map(|i| tab.b[i] != 0.0 || (i + 1..s).any(|j| tab.a[j][i] != 0.0))
            .collect();

        let mut stage_u = u.to_vec();
        for i in 0..s {
            let mut rhs = w_un.clone();
            for j in 0..i {
                axpy(dt * tab.a[i][j], &f_stages[j], &mut rhs);
                axpy(dt * tab.at[i][j], &g_stages[j], &mut rhs);
            }
            let r_d = ops.boundary_rhs(t + tab.ct[i] * dt);
            axpy(dt * tab.at[i][i], &r_d, &mut rhs);
            let mat = self.stage_matrix(dt, tab.at[i][i]);
            let out = solve_pcg(mat, &rhs, &mut stage_u, CG_REL_TOL)?;
            self.cg_iterations += out.iterations;
            if stage_u.iter().any(|v| !v.is_finite()) {
                return Err(Error::solver(format!(
                    "stage {i} diverged at t = {t} (non-finite coefficients)"
                )));
            }

            let f_i = if f_needed[i] {
                let mut r = ops.advection_residual(&stage_u, t + tab.c[i] * dt)?;
                for v in r.iter_mut() {
                    *v = -*v;
                }
                r
            } else {
                vec![0.0; n]
            };
            let mut g_i = if eps != 0.0 {
                let mut y = ops.a2.mul_vec_alloc(&stage_u);
                for v in y.iter_mut() {
                    *v = -eps * *v;
                }
                y
            } else {
                vec![0.0; n]
            };
            axpy(1.0, &r_d, &mut g_i);
            f_stages.push(f_i);
            g_stages.push(g_i);
        }

        let mut rhs = w_un;
        for i in 0..s {
            axpy(dt * tab.b[i], &f_stages[i], &mut rhs);
            axpy(dt * tab.bt[i], &g_stages[i], &mut rhs);
        }
        let out = solve_pcg(&ops.w, &rhs, u, CG_REL_TOL)?;
        self.cg_iterations += out.iterations;
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::solver(format!(
                "step update diverged at t = {t} (non-finite coefficients)"
            )));
        }
        Ok(())
    }
}

/// Integrate from `t0` to `t_end`, limiting after each completed step.
/// Returns accumulated statistics; `on_step` observes each accepted step.
pub fn integrate(
    ops: &Operators,
    sol: &mut DgSolution,
    t0: f64,
    t_end: f64,
    control: TimeControl,
    limiter: &LimiterConfig,
    max_steps: usize,
    mut on_step: impl FnMut(&StepInfo, &DgSolution),
) -> Result<RunStats> {
    if t_end < t0 {
        return Err(Error::config("end time earlier than start time"));
    }
    let mut stepper = Stepper::new(ops);
    let mut stats = RunStats::default();
    let mut t = t0;
    let span = t_end - t0;
    let default_dt_max = span / 100.0;
    while t < t_end - 1e-14 * span.max(1.0) {
        let dt_raw = match control {
            TimeControl::Fixed(dt) => dt,
            TimeControl::Cfl { cfl, dt_max } => {
                cfl_dt(ops, sol, cfl, dt_max.unwrap_or(default_dt_max))
            }
        };
        if !(dt_raw > 0.0) {
            return Err(Error::solver("nonpositive time step"));
        }
        let dt = dt_raw.min(t_end - t);
        stepper.step(&mut sol.coeffs, t, dt)?;
        t += dt;
        if t_end - t < 1e-14 * span.max(1.0) {
            t = t_end;
        }
        let troubled = apply_limiter(ops, limiter, sol)?;
        stats.steps += 1;
        stats.troubled_cells_total += troubled;
        stats.last_dt = dt;
        on_step(
            &StepInfo {
                step: stats.steps,
                t,
                dt,
                troubled_cells: troubled,
            },
            sol,
        );
        if stats.steps >= max_steps {
            return Err(Error::solver(format!(
                "step cap {max_steps} reached at t = {t} before t_end = {t_end}"
            )));
        }
    }
    stats.cg_iterations = stepper.cg_iterations;
    Ok(stats)
}

/// One IMEX step of the scalar split ODE y' = f_expl(t) + (lambda y + s(t)),
/// used to measure the stepper's temporal order on a stiff problem.
pub fn scalar_imex_step(
    tab: &Tableau,
    y: f64,
    t: f64,
    dt: f64,
    f_expl: impl Fn(f64) -> f64,
    lambda: f64,
    s_impl: impl Fn(f64) -> f64,
) -> f64 {
    let s = tab.stages;
    let mut f = [0.0; MAX_STAGES];
    let mut g = [0.0; MAX_STAGES];
    let mut stage = [0.0; MAX_STAGES];
    for i in 0..s {
        let mut rhs = y;
        for j in 0..i {
            rhs += dt * tab.a[i][j] * f[j] + dt * tab.at[i][j] * g[j];
        }
        let ti_impl = t + tab.ct[i] * dt;
        rhs += dt * tab.at[i][i] * s_impl(ti_impl);
        stage[i] = rhs / (1.0 - dt * tab.at[i][i] * lambda);
        f[i] = f_expl(t + tab.c[i] * dt);
        g[i] = lambda * stage[i] + s_impl(ti_impl);
    }
    let mut out = y;
    for i in 0..s {
        out += dt * (tab.b[i] * f[i] + tab.bt[i] * g[i]);
    }
    out
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    if alpha == 0.0 {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
