//! Jacobi-preconditioned conjugate gradients for SPD systems.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

pub struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
}

/// Solve A x = b in place, starting from the initial guess already in `x`.
///
/// Converges when ||b - A x|| <= rel_tol * ||b|| (absolute tolerance
/// rel_tol when b = 0). Fails on non-SPD curvature or iteration overrun.
pub fn solve_pcg(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
) -> Result<CgOutcome> {
    let n = a.n;
    assert_eq!(b.len(), n);
    assert_eq!(x.len(), n);
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| {
            if d <= 0.0 {
                return f64::NAN;
            }
            1.0 / d
        })
        .collect();
    if inv_diag.iter().any(|v| !v.is_finite()) {
        return Err(Error::solver(
            "matrix has a non-positive diagonal entry; system is not SPD",
        ));
    }

    let norm_b = norm(b).max(f64::MIN_POSITIVE);
    let tol = rel_tol * if norm(b) == 0.0 { 1.0 } else { norm_b };

    let mut r = vec![0.0; n];
    a.mul_vec(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    if norm(&r) <= tol {
        return Ok(CgOutcome {
            iterations: 0,
            residual: norm(&r),
        });
    }

    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(&ri, &di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let max_iter = 10 * n.max(1);

    for it in 1..=max_iter {
        a.mul_vec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::solver(format!(
                "non-positive curvature p'Ap = {pap:e} in CG; matrix is not SPD"
            )));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = norm(&r);
        if res <= tol {
            return Ok(CgOutcome {
                iterations: it,
                residual: res,
            });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::solver(format!(
        "CG failed to converge within {max_iter} iterations (residual {:e}, tol {tol:e})",
        norm(&r)
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
