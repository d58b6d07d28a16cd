//! Problem descriptions: fluxes, coefficients, initial and boundary data.

use crate::error::{Error, Result};
use std::sync::Arc;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A scalar flux component with an optional analytic derivative. Without
/// one, derivatives fall back to a centered difference with h = 1e-6.
#[derive(Clone)]
pub struct FluxFunction {
    eval: ScalarFn,
    deriv: Option<ScalarFn>,
}

impl FluxFunction {
    pub fn new(eval: ScalarFn) -> Self {
        FluxFunction { eval, deriv: None }
    }

    pub fn with_derivative(eval: ScalarFn, deriv: ScalarFn) -> Self {
        FluxFunction {
            eval,
            deriv: Some(deriv),
        }
    }

    pub fn zero() -> Self {
        FluxFunction::with_derivative(Arc::new(|_| 0.0), Arc::new(|_| 0.0))
    }

    pub fn value(&self, u: f64) -> f64 {
        (self.eval)(u)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match &self.deriv {
            Some(d) => d(u),
            None => {
                let h = 1e-6;
                ((self.eval)(u + h) - (self.eval)(u - h)) / (2.0 * h)
            }
        }
    }

    /// max |flux'(u)| over [min(a,b), max(a,b)], sampled at 65 evenly
    /// spaced points including both endpoints.
    pub fn max_abs_speed(&self, a: f64, b: f64) -> f64 {
        let lo = a.min(b);
        let hi = a.max(b);
        let mut worst = 0.0f64;
        for j in 0..=64 {
            let u = lo + (hi - lo) * j as f64 / 64.0;
            worst = worst.max(self.derivative(u).abs());
        }
        worst
    }
}

impl std::fmt::Debug for FluxFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FluxFunction")
            .field("analytic_derivative", &self.deriv.is_some())
            .finish()
    }
}

#[derive(Clone)]
pub enum BoundaryCondition {
    Periodic,
    /// Prescribed boundary data u^D(x, y, t).
    Dirichlet(SpaceTimeFn),
    /// Homogeneous Neumann: no diffusive face flux, advective outflow
    /// from the interior trace.
    Neumann,
}

impl std::fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Periodic => write!(f, "Periodic"),
            BoundaryCondition::Dirichlet(_) => write!(f, "Dirichlet(..)"),
            BoundaryCondition::Neumann => write!(f, "Neumann"),
        }
    }
}

impl BoundaryCondition {
    pub fn is_periodic(&self) -> bool {
        matches!(self, BoundaryCondition::Periodic)
    }
}

/// Full problem statement for u_t + F(u)_x + G(u)_y = eps*Lap(u)
/// + tau*eps^2*Lap(u_t) on a rectangle.
#[derive(Clone)]
pub struct Problem {
    pub dim: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub flux_x: FluxFunction,
    pub flux_y: FluxFunction,
    pub epsilon: f64,
    pub tau: f64,
    pub initial: SpaceFn,
    /// Boundary conditions indexed by side: 0 = x-low, 1 = x-high,
    /// 2 = y-low, 3 = y-high. Sides 2 and 3 are ignored in 1D.
    pub bcs: [BoundaryCondition; 4],
    pub t_end: f64,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("dim", &self.dim)
            .field("domain", &((self.x0, self.x1), (self.y0, self.y1)))
            .field("epsilon", &self.epsilon)
            .field("tau", &self.tau)
            .field("bcs", &self.bcs)
            .field("t_end", &self.t_end)
            .finish()
    }
}

impl Problem {
    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::config("dimension must be 1 or 2"));
        }
        if !(self.x1 > self.x0) || (self.dim == 2 && !(self.y1 > self.y0)) {
            return Err(Error::config("domain bounds must be increasing"));
        }
        if self.epsilon < 0.0 || self.tau < 0.0 {
            return Err(Error::config("epsilon and tau must be nonnegative"));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::config("end time must be positive"));
        }
        let n_axes = self.dim;
        for axis in 0..n_axes {
            let lo = self.bcs[2 * axis].is_periodic();
            let hi = self.bcs[2 * axis + 1].is_periodic();
            if lo != hi {
                return Err(Error::config(format!(
                    "periodic boundary on axis {axis} must apply to both sides"
                )));
            }
        }
        Ok(())
    }

    pub fn periodic_axis(&self, axis: usize) -> bool {
        self.bcs[2 * axis].is_periodic()
    }

    pub fn flux(&self, axis: usize) -> &FluxFunction {
        if axis == 0 {
            &self.flux_x
        } else {
            &self.flux_y
        }
    }
}
