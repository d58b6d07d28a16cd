//! Modal DG solution storage and evaluation.
//!
//! Coefficients are stored cell-major: the block
//! `coeffs[c * n_modes .. (c + 1) * n_modes]` holds the modal coefficients
//! of cell `c`. With the orthonormal reference basis the first coefficient
//! of each block equals the cell average.

use crate::basis::{Basis, QuadTables};
use crate::error::Result;
use crate::mesh::Mesh;
use crate::quadrature::GaussRule;

#[derive(Debug, Clone)]
pub struct DgSolution {
    pub mesh: Mesh,
    pub basis: Basis,
    pub coeffs: Vec<f64>,
}

impl DgSolution {
    pub fn zeros(mesh: Mesh, basis: Basis) -> Self {
        let n = mesh.n_cells() * basis.n_modes();
        DgSolution {
            mesh,
            basis,
            coeffs: vec![0.0; n],
        }
    }

    /// L2 projection of `f(x, y)` onto the DG space, cell by cell, using a
    /// Gauss rule with `quad_pts` points per axis.
    pub fn project<F: Fn(f64, f64) -> f64>(
        mesh: Mesh,
        basis: Basis,
        quad_pts: usize,
        f: F,
    ) -> Self {
        let rule = GaussRule::new(quad_pts);
        let nm = basis.n_modes();
        let mut coeffs = vec![0.0; mesh.n_cells() * nm];
        let points: Vec<(f64, f64, f64)> = if basis.dim == 1 {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| (x, 0.0, w))
                .collect()
        } else {
            let mut pts = Vec::with_capacity(quad_pts * quad_pts);
            for (&eta, &wy) in rule.nodes.iter().zip(&rule.weights) {
                for (&xi, &wx) in rule.nodes.iter().zip(&rule.weights) {
                    pts.push((xi, eta, wx * wy));
                }
            }
            pts
        };
        for c in 0..mesh.n_cells() {
            let block = &mut coeffs[c * nm..(c + 1) * nm];
            for &(xi, eta, w) in &points {
                let (x, y) = mesh.from_reference(c, xi, eta);
                let fv = f(x, y);
                for (m, cm) in block.iter_mut().enumerate() {
                    *cm += w * fv * basis.eval(m, xi, eta);
                }
            }
        }
        DgSolution {
            mesh,
            basis,
            coeffs,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.basis.n_modes()
    }

    pub fn cell(&self, c: usize) -> &[f64] {
        let nm = self.n_modes();
        &self.coeffs[c * nm..(c + 1) * nm]
    }

    pub fn cell_mut(&mut self, c: usize) -> &mut [f64] {
        let nm = self.n_modes();
        &mut self.coeffs[c * nm..(c + 1) * nm]
    }

    pub fn cell_average(&self, c: usize) -> f64 {
        self.coeffs[c * self.n_modes()]
    }

    /// Value at reference coordinates within cell `c`.
    pub fn eval_ref(&self, c: usize, xi: f64, eta: f64) -> f64 {
        self.cell(c)
            .iter()
            .enumerate()
            .map(|(m, &cm)| cm * self.basis.eval(m, xi, eta))
            .sum()
    }

    /// Value at a physical point; a point on a cell boundary is evaluated
    /// in the cell on the positive side.
    pub fn eval_at(&self, x: f64, y: f64) -> Result<f64> {
        let c = self.mesh.cell_containing(x, y)?;
        let (xi, eta) = self.mesh.to_reference(c, x, y)?;
        Ok(self.eval_ref(c, xi, eta))
    }

    /// Integral of the solution over the domain.
    pub fn total_mass(&self) -> f64 {
        let vol = self.mesh.cell_volume();
        (0..self.mesh.n_cells())
            .map(|c| vol * self.cell_average(c))
            .sum()
    }

    /// Min and max over all volume, face, and corner quadrature points.
    pub fn value_range(&self, tables: &QuadTables) -> (f64, f64) {
        let nm = self.n_modes();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let n_sides = 2 * self.basis.dim;
        for c in 0..self.mesh.n_cells() {
            let block = self.cell(c);
            for q in 0..tables.n_vol {
                let v: f64 = (0..nm).map(|m| block[m] * tables.vol_vals[m][q]).sum();
                lo = lo.min(v);
                hi = hi.max(v);
            }
            for s in 0..n_sides {
                for q in 0..tables.n_face {
                    let v: f64 = (0..nm)
                        .map(|m| block[m] * tables.face_vals[s][m][q])
                        .sum();
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            for corner in 0..tables.corner_vals[0].len() {
                let v: f64 = (0..nm)
                    .map(|m| block[m] * tables.corner_vals[m][corner])
                    .sum();
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// L2 norm of the difference against a reference function, integrated
    /// with a Gauss rule of `quad_pts` points per axis.
    pub fn l2_error<F: Fn(f64, f64) -> f64>(&self, quad_pts: usize, exact: F) -> f64 {
        let rule = GaussRule::new(quad_pts);
        let vol = self.mesh.cell_volume();
        let mut acc = 0.0;
        for c in 0..self.mesh.n_cells() {
            if self.basis.dim == 1 {
                for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let (x, _) = self.mesh.from_reference(c, xi, 0.0);
                    let d = self.eval_ref(c, xi, 0.0) - exact(x, 0.0);
                    acc += vol * w * d * d;
                }
            } else {
                for (&eta, &wy) in rule.nodes.iter().zip(&rule.weights) {
                    for (&xi, &wx) in rule.nodes.iter().zip(&rule.weights) {
                        let (x, y) = self.mesh.from_reference(c, xi, eta);
                        let d = self.eval_ref(c, xi, eta) - exact(x, y);
                        acc += vol * wx * wy * d * d;
                    }
                }
            }
        }
        acc.sqrt()
    }
}
