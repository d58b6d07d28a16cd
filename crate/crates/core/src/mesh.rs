//! Uniform rectangular meshes in 1D and 2D.
//!
//! Cells are indexed row-major with the x index fastest: cell (i, j) has
//! linear index `j * nx + i`. The affine map to the reference element
//! [0,1]^dim is `xi = (x - x_i) / dx + 1/2` with `x_i` the cell center.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Mesh {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Mesh {
    pub fn new_1d(x0: f64, x1: f64, nx: usize) -> Self {
        assert!(nx >= 1 && x1 > x0);
        Mesh {
            dim: 1,
            nx,
            ny: 1,
            x0,
            x1,
            y0: 0.0,
            y1: 0.0,
            dx: (x1 - x0) / nx as f64,
            dy: 0.0,
        }
    }

    pub fn new_2d(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Self {
        assert!(nx >= 1 && ny >= 1 && x1 > x0 && y1 > y0);
        Mesh {
            dim: 2,
            nx,
            ny,
            x0,
            x1,
            y0,
            y1,
            dx: (x1 - x0) / nx as f64,
            dy: (y1 - y0) / ny as f64,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Cell measure: dx in 1D, dx*dy in 2D.
    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.dx
        } else {
            self.dx * self.dy
        }
    }

    /// Measure of a face with normal along `axis`; 1 by convention in 1D.
    pub fn face_area(&self, axis: usize) -> f64 {
        if self.dim == 1 {
            1.0
        } else if axis == 0 {
            self.dy
        } else {
            self.dx
        }
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    pub fn cell_coords(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    pub fn cell_center(&self, c: usize) -> (f64, f64) {
        let (i, j) = self.cell_coords(c);
        let x = self.x0 + (i as f64 + 0.5) * self.dx;
        let y = if self.dim == 1 {
            0.0
        } else {
            self.y0 + (j as f64 + 0.5) * self.dy
        };
        (x, y)
    }

    /// Neighbor of `c` one step along `axis` (0 = x, 1 = y) in direction
    /// `dir` (+1 or -1); None past the domain boundary.
    pub fn neighbor(&self, c: usize, axis: usize, dir: i64) -> Option<usize> {
        let (i, j) = self.cell_coords(c);
        let (ni, nj) = if axis == 0 {
            (i as i64 + dir, j as i64)
        } else {
            (i as i64, j as i64 + dir)
        };
        if ni < 0 || nj < 0 || ni >= self.nx as i64 || nj >= self.ny as i64 {
            None
        } else {
            Some(self.cell_index(ni as usize, nj as usize))
        }
    }

    /// Neighbor with wrap-around along `axis` (used by periodic boundaries).
    pub fn neighbor_periodic(&self, c: usize, axis: usize, dir: i64) -> usize {
        let (i, j) = self.cell_coords(c);
        let n = if axis == 0 { self.nx } else { self.ny } as i64;
        let v = if axis == 0 { i } else { j } as i64;
        let w = (v + dir).rem_euclid(n) as usize;
        if axis == 0 {
            self.cell_index(w, j)
        } else {
            self.cell_index(i, w)
        }
    }

    /// Map a physical point inside cell `c` to reference coordinates.
    pub fn to_reference(&self, c: usize, x: f64, y: f64) -> Result<(f64, f64)> {
        let (cx, cy) = self.cell_center(c);
        let xi = (x - cx) / self.dx + 0.5;
        let eta = if self.dim == 1 {
            0.0
        } else {
            (y - cy) / self.dy + 0.5
        };
        let tol = 1e-12;
        if !(-tol..=1.0 + tol).contains(&xi) || !(-tol..=1.0 + tol).contains(&eta) {
            return Err(Error::solver(format!(
                "point ({x}, {y}) lies outside cell {c}"
            )));
        }
        Ok((xi, eta))
    }

    pub fn from_reference(&self, c: usize, xi: f64, eta: f64) -> (f64, f64) {
        let (cx, cy) = self.cell_center(c);
        let x = cx + (xi - 0.5) * self.dx;
        let y = if self.dim == 1 {
            0.0
        } else {
            cy + (eta - 0.5) * self.dy
        };
        (x, y)
    }

    /// Index of the cell row/column offset containing coordinate `v` along
    /// `axis`. A coordinate on an interior cell boundary is assigned to the
    /// cell on the positive side.
    pub fn strip_containing(&self, axis: usize, v: f64) -> Result<usize> {
        let (lo, h, n) = if axis == 0 {
            (self.x0, self.dx, self.nx)
        } else {
            (self.y0, self.dy, self.ny)
        };
        let t = (v - lo) / h;
        let snapped = t.round();
        let mut idx = if (t - snapped).abs() <= 1e-9 * (1.0 + t.abs()) {
            snapped as i64
        } else {
            t.floor() as i64
        };
        // The domain endpoint itself belongs to the last cell.
        if idx == n as i64 && (t - n as f64).abs() <= 1e-9 * (1.0 + t.abs()) {
            idx = n as i64 - 1;
        }
        if idx < 0 || idx >= n as i64 {
            return Err(Error::solver(format!(
                "coordinate {v} is outside the domain along axis {axis}"
            )));
        }
        Ok(idx as usize)
    }

    pub fn cell_containing(&self, x: f64, y: f64) -> Result<usize> {
        let i = self.strip_containing(0, x)?;
        let j = if self.dim == 1 {
            0
        } else {
            self.strip_containing(1, y)?
        };
        Ok(self.cell_index(i, j))
    }
}
