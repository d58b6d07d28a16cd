//! Orthonormal Legendre bases on the reference element [0,1]^dim.
//!
//! The 1D functions are the shifted Legendre polynomials normalized to unit
//! L2 norm on [0,1]; 2D modes are tensor products with total degree <= k,
//! ordered by y-degree then x-degree: for k=2 the sequence is
//! {1, psi_x, psi_xx, psi_y, psi_xy, psi_yy}. The first mode is the constant
//! 1, so the first coefficient of an expansion is the cell average.

use crate::quadrature::GaussRule;

/// Evaluate the n-th orthonormal 1D mode at xi (valid for any real xi).
pub fn eval_1d(n: usize, xi: f64) -> f64 {
    let y = xi - 0.5;
    match n {
        0 => 1.0,
        1 => 2.0 * 3.0f64.sqrt() * y,
        2 => 0.5 * 5.0f64.sqrt() * (12.0 * y * y - 1.0),
        3 => 0.5 * 7.0f64.sqrt() * (40.0 * y * y * y - 6.0 * y),
        _ => panic!("1D basis implemented for degree <= 3, got mode {n}"),
    }
}

/// Derivative of the n-th orthonormal 1D mode with respect to xi.
pub fn grad_1d(n: usize, xi: f64) -> f64 {
    let y = xi - 0.5;
    match n {
        0 => 0.0,
        1 => 2.0 * 3.0f64.sqrt(),
        2 => 0.5 * 5.0f64.sqrt() * 24.0 * y,
        3 => 0.5 * 7.0f64.sqrt() * (120.0 * y * y - 6.0),
        _ => panic!("1D basis implemented for degree <= 3, got mode {n}"),
    }
}

/// Modal basis of total degree <= k on the reference element.
#[derive(Debug, Clone)]
pub struct Basis {
    pub dim: usize,
    pub degree: usize,
    /// Tensor exponents (x-degree, y-degree) per mode; y-degree is 0 in 1D.
    modes: Vec<(usize, usize)>,
}

impl Basis {
    pub fn new(dim: usize, degree: usize) -> Self {
        assert!(dim == 1 || dim == 2, "dim must be 1 or 2");
        assert!(degree <= 3, "basis implemented for degree <= 3");
        let mut modes = Vec::new();
        if dim == 1 {
            for i in 0..=degree {
                modes.push((i, 0));
            }
        } else {
            for j in 0..=degree {
                for i in 0..=(degree - j) {
                    modes.push((i, j));
                }
            }
        }
        Basis { dim, degree, modes }
    }

    /// Number of modes: k+1 in 1D, (k+1)(k+2)/2 in 2D.
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn mode_exponents(&self) -> &[(usize, usize)] {
        &self.modes
    }

    /// Value of mode `m` at a reference point (eta ignored in 1D).
    pub fn eval(&self, m: usize, xi: f64, eta: f64) -> f64 {
        let (i, j) = self.modes[m];
        if self.dim == 1 {
            eval_1d(i, xi)
        } else {
            eval_1d(i, xi) * eval_1d(j, eta)
        }
    }

    /// Reference gradient of mode `m`; the second component is 0 in 1D.
    pub fn grad(&self, m: usize, xi: f64, eta: f64) -> [f64; 2] {
        let (i, j) = self.modes[m];
        if self.dim == 1 {
            [grad_1d(i, xi), 0.0]
        } else {
            [
                grad_1d(i, xi) * eval_1d(j, eta),
                eval_1d(i, xi) * grad_1d(j, eta),
            ]
        }
    }

    /// Mixed reference derivative d^(ax+ay) psi_m / dxi^ax deta^ay.
    pub fn deriv(&self, m: usize, ax: usize, ay: usize, xi: f64, eta: f64) -> f64 {
        let (i, j) = self.modes[m];
        let dx = deriv_1d(i, ax, xi);
        if self.dim == 1 {
            if ay > 0 {
                0.0
            } else {
                dx
            }
        } else {
            dx * deriv_1d(j, ay, eta)
        }
    }

    /// Precompute values at quadrature points for assembly and limiting.
    pub fn tables(&self, quad: &GaussRule) -> QuadTables {
        QuadTables::new(self, quad)
    }
}

fn deriv_1d(n: usize, order: usize, xi: f64) -> f64 {
    let y = xi - 0.5;
    match order {
        0 => eval_1d(n, xi),
        1 => grad_1d(n, xi),
        2 => match n {
            0 | 1 => 0.0,
            2 => 12.0 * 5.0f64.sqrt(),
            3 => 120.0 * 7.0f64.sqrt() * y,
            _ => unreachable!(),
        },
        3 => match n {
            0..=2 => 0.0,
            3 => 120.0 * 7.0f64.sqrt(),
            _ => unreachable!(),
        },
        _ => 0.0,
    }
}

/// Domain side identifier: `2*axis + high`, i.e. 0 = x-low, 1 = x-high,
/// 2 = y-low, 3 = y-high.
pub fn side_index(axis: usize, high: bool) -> usize {
    2 * axis + usize::from(high)
}

/// Basis values tabulated at volume and face quadrature points.
///
/// Volume points are the tensor grid of the supplied rule, x fastest.
/// Face points run along the face with the same rule (a single unit-weight
/// point in 1D). Corners are ordered x fastest as well.
#[derive(Debug, Clone)]
pub struct QuadTables {
    pub n_vol: usize,
    pub vol_weights: Vec<f64>,
    /// Volume point coordinates (xi, eta).
    pub vol_points: Vec<(f64, f64)>,
    /// `vol_vals[m][q]`
    pub vol_vals: Vec<Vec<f64>>,
    /// `vol_grads[m][q]`, reference gradients.
    pub vol_grads: Vec<Vec<[f64; 2]>>,
    pub n_face: usize,
    pub face_weights: Vec<f64>,
    /// Reference coordinates of face quadrature points: `face_points[side][q]`.
    pub face_points: Vec<Vec<(f64, f64)>>,
    /// `face_vals[side][m][q]`
    pub face_vals: Vec<Vec<Vec<f64>>>,
    /// `face_grads[side][m][q]`, reference gradients at face points.
    pub face_grads: Vec<Vec<Vec<[f64; 2]>>>,
    /// Mean of each mode over each face: `face_means[side][m]`.
    pub face_means: Vec<Vec<f64>>,
    /// `corner_vals[m][c]`.
    pub corner_vals: Vec<Vec<f64>>,
}

impl QuadTables {
    fn new(basis: &Basis, quad: &GaussRule) -> Self {
        let nm = basis.n_modes();
        let nq = quad.len();
        let dim = basis.dim;

        let (vol_points, vol_weights) = if dim == 1 {
            (
                quad.nodes.iter().map(|&x| (x, 0.0)).collect::<Vec<_>>(),
                quad.weights.clone(),
            )
        } else {
            let mut pts = Vec::with_capacity(nq * nq);
            let mut w = Vec::with_capacity(nq * nq);
            for qy in 0..nq {
                for qx in 0..nq {
                    pts.push((quad.nodes[qx], quad.nodes[qy]));
                    w.push(quad.weights[qx] * quad.weights[qy]);
                }
            }
            (pts, w)
        };
        let n_vol = vol_points.len();

        let vol_vals: Vec<Vec<f64>> = (0..nm)
            .map(|m| vol_points.iter().map(|&(x, y)| basis.eval(m, x, y)).collect())
            .collect();
        let vol_grads: Vec<Vec<[f64; 2]>> = (0..nm)
            .map(|m| vol_points.iter().map(|&(x, y)| basis.grad(m, x, y)).collect())
            .collect();

        let (face_point_sets, face_weights): (Vec<Vec<(f64, f64)>>, Vec<f64>) = if dim == 1 {
            (vec![vec![(0.0, 0.0)], vec![(1.0, 0.0)]], vec![1.0])
        } else {
            let mk = |side: usize| -> Vec<(f64, f64)> {
                quad.nodes
                    .iter()
                    .map(|&t| match side {
                        0 => (0.0, t),
                        1 => (1.0, t),
                        2 => (t, 0.0),
                        _ => (t, 1.0),
                    })
                    .collect()
            };
            ((0..4).map(mk).collect(), quad.weights.clone())
        };
        let n_face = face_weights.len();

        let face_vals: Vec<Vec<Vec<f64>>> = face_point_sets
            .iter()
            .map(|pts| {
                (0..nm)
                    .map(|m| pts.iter().map(|&(x, y)| basis.eval(m, x, y)).collect())
                    .collect()
            })
            .collect();
        let face_grads: Vec<Vec<Vec<[f64; 2]>>> = face_point_sets
            .iter()
            .map(|pts| {
                (0..nm)
                    .map(|m| pts.iter().map(|&(x, y)| basis.grad(m, x, y)).collect())
                    .collect()
            })
            .collect();
        let face_means: Vec<Vec<f64>> = face_vals
            .iter()
            .map(|per_side| {
                per_side
                    .iter()
                    .map(|vals| {
                        vals.iter()
                            .zip(&face_weights)
                            .map(|(&v, &w)| v * w)
                            .sum::<f64>()
                    })
                    .collect()
            })
            .collect();

        let corners: Vec<(f64, f64)> = if dim == 1 {
            vec![(0.0, 0.0), (1.0, 0.0)]
        } else {
            vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
        };
        let corner_vals: Vec<Vec<f64>> = (0..nm)
            .map(|m| corners.iter().map(|&(x, y)| basis.eval(m, x, y)).collect())
            .collect();

        QuadTables {
            n_vol,
            vol_weights,
            vol_points,
            vol_vals,
            vol_grads,
            n_face,
            face_weights,
            face_points: face_point_sets,
            face_vals,
            face_grads,
            face_means,
            corner_vals,
        }
    }
}
