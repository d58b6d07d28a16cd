//! Built-in problem catalog: Burgers and the modified Buckley-Leverett
//! equation in 1D and 2D, plus the exact pre-shock Burgers solution.

use crate::error::{Error, Result};
use crate::problem::{BoundaryCondition, FluxFunction, Problem};
use std::f64::consts::PI;
use std::sync::Arc;

/// F(u) = u^2 / 2.
pub fn burgers_flux() -> FluxFunction {
    FluxFunction::with_derivative(Arc::new(|u| 0.5 * u * u), Arc::new(|u| u))
}

/// 1D fractional flow F(u) = u^2 / (u^2 + 0.5 (1-u)^2).
pub fn mbl_flux_1d() -> FluxFunction {
    FluxFunction::with_derivative(
        Arc::new(|u: f64| {
            let d = u * u + 0.5 * (1.0 - u) * (1.0 - u);
            u * u / d
        }),
        Arc::new(|u: f64| {
            let d = u * u + 0.5 * (1.0 - u) * (1.0 - u);
            let dd = 3.0 * u - 1.0;
            (2.0 * u * d - u * u * dd) / (d * d)
        }),
    )
}

/// 2D x-flux F(u) = u^2 / (u^2 + (1-u)^2).
pub fn mbl_flux_2d_x() -> FluxFunction {
    FluxFunction::with_derivative(
        Arc::new(|u: f64| {
            let d = u * u + (1.0 - u) * (1.0 - u);
            u * u / d
        }),
        Arc::new(|u: f64| {
            let d = u * u + (1.0 - u) * (1.0 - u);
            let dd = 4.0 * u - 2.0;
            (2.0 * u * d - u * u * dd) / (d * d)
        }),
    )
}

/// 2D y-flux G(u) = F(u) (1 - 5 (1-u)^2) with F from the 2D x-flux.
pub fn mbl_flux_2d_y() -> FluxFunction {
    let fx = mbl_flux_2d_x();
    let fx2 = fx.clone();
    FluxFunction::with_derivative(
        Arc::new(move |u: f64| {
            let w = 1.0 - u;
            fx.value(u) * (1.0 - 5.0 * w * w)
        }),
        Arc::new(move |u: f64| {
            let w = 1.0 - u;
            fx2.derivative(u) * (1.0 - 5.0 * w * w) + fx2.value(u) * 10.0 * w
        }),
    )
}

/// Solution of u = sin(pi (x - t u)) by safeguarded Newton iteration,
/// valid while the solution is smooth (t < 1/pi).
pub fn burgers_exact(x: f64, t: f64) -> Result<f64> {
    let g = |u: f64| u - (PI * (x - t * u)).sin();
    let dg = |u: f64| 1.0 + PI * t * (PI * (x - t * u)).cos();
    let (mut lo, mut hi) = (-1.2, 1.2);
    debug_assert!(g(lo) < 0.0 && g(hi) > 0.0);
    let mut u = (PI * x).sin();
    for _ in 0..200 {
        let r = g(u);
        if r.abs() <= 1e-13 {
            return Ok(u);
        }
        if r > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let step = r / dg(u);
        let mut next = u - step;
        if !(lo..=hi).contains(&next) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        u = next;
    }
    Err(Error::solver(format!(
        "Newton iteration for the exact Burgers solution stalled at (x, t) = ({x}, {t})"
    )))
}

fn neumann_all() -> [BoundaryCondition; 4] {
    [
        BoundaryCondition::Neumann,
        BoundaryCondition::Neumann,
        BoundaryCondition::Neumann,
        BoundaryCondition::Neumann,
    ]
}

/// Build a named problem. `tau` and `u_block` override the defaults where
/// the problem uses them (`u_block` is the 1D initial block height).
pub fn make_problem(name: &str, tau: Option<f64>, u_block: Option<f64>) -> Result<Problem> {
    match name {
        "burgers" => Ok(Problem {
            dim: 1,
            x0: 0.0,
            x1: 2.0,
            y0: 0.0,
            y1: 0.0,
            flux_x: burgers_flux(),
            flux_y: FluxFunction::zero(),
            epsilon: 0.0,
            tau: 0.0,
            initial: Arc::new(|x, _| (PI * x).sin()),
            bcs: [
                BoundaryCondition::Periodic,
                BoundaryCondition::Periodic,
                BoundaryCondition::Neumann,
                BoundaryCondition::Neumann,
            ],
            t_end: 0.75 / PI,
        }),
        "mbl1d" => {
            let ub = u_block.unwrap_or(0.66);
            Ok(Problem {
                dim: 1,
                x0: 0.0,
                x1: 3.0,
                y0: 0.0,
                y1: 0.0,
                flux_x: mbl_flux_1d(),
                flux_y: FluxFunction::zero(),
                epsilon: 1e-3,
                tau: tau.unwrap_or(5.0),
                initial: Arc::new(move |x, _| {
                    if x > 0.75 && x < 2.25 {
                        ub
                    } else {
                        0.0
                    }
                }),
                bcs: neumann_all(),
                t_end: 0.5,
            })
        }
        "mbl2d_ex4" | "mbl2d_ex5_cyl" | "mbl2d_ex5_cube" => {
            let (default_tau, height) = match name {
                "mbl2d_ex4" => (0.0, 1.0),
                _ => (0.5, 0.9),
            };
            let cube = name == "mbl2d_ex5_cube";
            Ok(Problem {
                dim: 2,
                x0: -1.5,
                x1: 1.5,
                y0: -1.5,
                y1: 1.5,
                flux_x: mbl_flux_2d_x(),
                flux_y: mbl_flux_2d_y(),
                epsilon: 0.01,
                tau: tau.unwrap_or(default_tau),
                initial: Arc::new(move |x, y| {
                    let inside = if cube {
                        x * x < 0.5 && y * y < 0.5
                    } else {
                        x * x + y * y < 0.5
                    };
                    if inside {
                        height
                    } else {
                        0.0
                    }
                }),
                bcs: neumann_all(),
                t_end: 0.5,
            })
        }
        other => Err(Error::config(format!("unknown problem name '{other}'"))),
    }
}
