//! Troubled-cell detection and slope limiting.
//!
//! Three limiters operate on flagged cells only: a minmod-TVB limiter, the
//! Zhong-Shu simple WENO limiter, and the Moe-Rossmanith-Seal moment limiter.
//! The detector is the minmod limiter with threshold zero applied to the
//! face-mean trace differences. All limiters preserve the cell average and
//! read neighbor data from a pre-limit snapshot, so the result does not
//! depend on cell traversal order.

use crate::basis::{side_index, Basis, QuadTables};
use crate::error::{Error, Result};
use crate::sipdg::Operators;
use crate::solution::DgSolution;

pub const WENO_EPS0: f64 = 1e-6;
pub const WENO_R: i32 = 2;
/// Linear weights: target cell first, then the face neighbors.
pub const WENO_GAMMA_1D: [f64; 3] = [0.998, 0.001, 0.001];
pub const WENO_GAMMA_2D: [f64; 5] = [0.996, 0.001, 0.001, 0.001, 0.001];
pub const MOE_EPS1: f64 = 1e-6;
pub const MOE_CUTOFF: f64 = 1.1;
/// Relative tolerance deciding whether a limited value "changed".
const CHANGE_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimiterConfig {
    None,
    /// Slope threshold M: values |a1| <= M h^2 pass through unlimited.
    MinmodTvb { m_tvb: f64 },
    Weno,
    /// Tolerance alpha(h) = alpha h^1.5 relaxes the neighborhood bounds.
    Moe { alpha: f64 },
}

impl LimiterConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LimiterConfig::MinmodTvb { m_tvb } if !(m_tvb >= 0.0) => {
                Err(Error::config("limiter threshold M must be >= 0"))
            }
            LimiterConfig::Moe { alpha } if !(alpha >= 0.0) => {
                Err(Error::config("limiter tolerance alpha must be >= 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            LimiterConfig::None => "none",
            LimiterConfig::MinmodTvb { .. } => "minmod_tvb",
            LimiterConfig::Weno => "weno",
            LimiterConfig::Moe { .. } => "moe",
        }
    }
}

/// min of the arguments if all are positive, max if all are negative, else 0.
pub fn minmod(args: &[f64]) -> f64 {
    debug_assert!(!args.is_empty());
    if args.iter().all(|&a| a > 0.0) {
        args.iter().cloned().fold(f64::INFINITY, f64::min)
    } else if args.iter().all(|&a| a < 0.0) {
        args.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    } else {
        0.0
    }
}

/// TVB-modified minmod: returns the first argument unchanged when
/// |a1| <= M h^2, otherwise falls back to `minmod`.
pub fn minmod_tvb(args: &[f64], m_tvb: f64, h: f64) -> f64 {
    if args[0].abs() <= m_tvb * h * h {
        args[0]
    } else {
        minmod(args)
    }
}

/// Cells flagged for limiting; `flags` is indexable by cell, `cells` sorted.
#[derive(Debug, Clone)]
pub struct TroubledSet {
    pub flags: Vec<bool>,
    pub cells: Vec<usize>,
}

/// Directional trace and average differences for one cell:
/// forward/backward face-mean differences and the halved neighbor
/// average jumps entering the minmod arguments.
struct AxisData {
    u_fwd: f64,
    u_bwd: f64,
    half_dp: f64,
    half_dm: f64,
    h: f64,
}

fn neighbor_cell(ops: &Operators, cell: usize, axis: usize, dir: i64) -> Option<usize> {
    if ops.problem.periodic_axis(axis) {
        Some(ops.mesh.neighbor_periodic(cell, axis, dir))
    } else {
        ops.mesh.neighbor(cell, axis, dir)
    }
}

fn face_mean(tables: &QuadTables, cell: &[f64], side: usize) -> f64 {
    cell.iter()
        .zip(&tables.face_means[side])
        .map(|(c, f)| c * f)
        .sum()
}

fn axis_data(ops: &Operators, snap: &[f64], cell: usize, axis: usize) -> AxisData {
    let nm = ops.basis.n_modes();
    let coeffs = &snap[cell * nm..(cell + 1) * nm];
    let ubar = coeffs[0];
    let u_fwd = face_mean(&ops.tables, coeffs, side_index(axis, true)) - ubar;
    let u_bwd = ubar - face_mean(&ops.tables, coeffs, side_index(axis, false));
    let avg = |c: usize| snap[c * nm];
    let dp = neighbor_cell(ops, cell, axis, 1).map(|n| avg(n) - ubar);
    let dm = neighbor_cell(ops, cell, axis, -1).map(|n| ubar - avg(n));
    // A missing neighbor mirrors the available one-sided difference so
    // boundary cells of globally linear data stay unflagged.
    let (dp, dm) = match (dp, dm) {
        (Some(p), Some(m)) => (p, m),
        (Some(p), None) => (p, p),
        (None, Some(m)) => (m, m),
        (None, None) => (0.0, 0.0),
    };
    AxisData {
        u_fwd,
        u_bwd,
        half_dp: 0.5 * dp,
        half_dm: 0.5 * dm,
        h: if axis == 0 { ops.mesh.dx } else { ops.mesh.dy },
    }
}

/// Relative comparison against both the compared value and the cell scale,
/// so round-off slopes on near-constant data never register as changes.
fn changed(limited: f64, original: f64, scale: f64) -> bool {
    (limited - original).abs() > CHANGE_REL_TOL * original.abs().max(scale.abs())
}

/// Flag cells where the threshold-zero minmod alters either trace
/// difference in any direction.
pub fn detect_troubled(ops: &Operators, sol: &DgSolution) -> TroubledSet {
    let n = ops.mesh.n_cells();
    let mut flags = vec![false; n];
    let mut cells = Vec::new();
    let nm = ops.basis.n_modes();
    for c in 0..n {
        let ubar = sol.coeffs[c * nm];
        'outer: for axis in 0..ops.mesh.dim {
            let d = axis_data(ops, &sol.coeffs, c, axis);
            for a1 in [d.u_fwd, d.u_bwd] {
                if changed(minmod(&[a1, d.half_dp, d.half_dm]), a1, ubar) {
                    flags[c] = true;
                    cells.push(c);
                    break 'outer;
                }
            }
        }
    }
    TroubledSet { flags, cells }
}

/// Detect troubled cells and limit them against a frozen snapshot.
/// Returns the number of flagged cells.
pub fn apply_limiter(
    ops: &Operators,
    config: &LimiterConfig,
    sol: &mut DgSolution,
) -> Result<usize> {
    config.validate()?;
    if *config == LimiterConfig::None {
        return Ok(0);
    }
    let troubled = detect_troubled(ops, sol);
    if troubled.cells.is_empty() {
        return Ok(0);
    }
    let snap = sol.coeffs.clone();
    match *config {
        LimiterConfig::MinmodTvb { m_tvb } => {
            for &c in &troubled.cells {
                limit_tvb_cell(ops, &snap, sol, c, m_tvb);
            }
        }
        LimiterConfig::Weno => {
            for &c in &troubled.cells {
                limit_weno_cell(ops, &snap, sol, c);
            }
        }
        LimiterConfig::Moe { alpha } => {
            let extrema = cell_extrema(ops, &snap);
            for &c in &troubled.cells {
                limit_moe_cell(ops, &snap, &extrema, sol, c, alpha);
            }
        }
        LimiterConfig::None => unreachable!(),
    }
    Ok(troubled.cells.len())
}

fn pure_mode(basis: &Basis, axis: usize, order: usize) -> usize {
    let target = if axis == 0 { (order, 0) } else { (0, order) };
    basis
        .mode_exponents()
        .iter()
        .position(|&e| e == target)
        .expect("pure mode present for order <= degree")
}

/// Reconstruct the cell from limited trace differences. Orders k <= 2 are
/// interpolated exactly from (average, two traces); k >= 3 limits the
/// slope of the P1 projection. A change in either direction zeroes the
/// mixed 2D modes.
fn limit_tvb_cell(ops: &Operators, snap: &[f64], sol: &mut DgSolution, cell: usize, m_tvb: f64) {
    let basis = &ops.basis;
    let nm = basis.n_modes();
    let k = basis.degree;
    let sqrt3 = 3.0_f64.sqrt();
    let sqrt5 = 5.0_f64.sqrt();
    let mut out = snap[cell * nm..(cell + 1) * nm].to_vec();
    let ubar = out[0];
    let mut any_change = false;
    for axis in 0..ops.mesh.dim {
        let d = axis_data(ops, snap, cell, axis);
        let fwd_m = minmod_tvb(&[d.u_fwd, d.half_dp, d.half_dm], m_tvb, d.h);
        let bwd_m = minmod_tvb(&[d.u_bwd, d.half_dp, d.half_dm], m_tvb, d.h);
        if !changed(fwd_m, d.u_fwd, ubar) && !changed(bwd_m, d.u_bwd, ubar) {
            continue;
        }
        any_change = true;
        match k {
            1 => out[pure_mode(basis, axis, 1)] = fwd_m / sqrt3,
            2 => {
                out[pure_mode(basis, axis, 1)] = (fwd_m + bwd_m) / (2.0 * sqrt3);
                out[pure_mode(basis, axis, 2)] = (fwd_m - bwd_m) / (2.0 * sqrt5);
            }
            _ => {
                let p1_slope = sqrt3 * out[pure_mode(basis, axis, 1)];
                let limited = minmod_tvb(&[p1_slope, d.half_dp, d.half_dm], m_tvb, d.h);
                out[pure_mode(basis, axis, 1)] = limited / sqrt3;
                for order in 2..=k {
                    out[pure_mode(basis, axis, order)] = 0.0;
                }
            }
        }
    }
    if any_change {
        if ops.mesh.dim == 2 {
            for (m, &(ax, ay)) in basis.mode_exponents().iter().enumerate() {
                if ax > 0 && ay > 0 {
                    out[m] = 0.0;
                }
            }
        }
        sol.cell_mut(cell).copy_from_slice(&out);
    }
}

/// Modal coefficients, on the target cell, of a neighbor polynomial
/// shifted by a whole cell and recentered to the target average.
fn shifted_candidate(
    ops: &Operators,
    nb: &[f64],
    shift: (f64, f64),
    target_avg: f64,
) -> Vec<f64> {
    let t = &ops.tables;
    let b = &ops.basis;
    let nm = b.n_modes();
    let mut d = vec![0.0; nm];
    for q in 0..t.n_vol {
        let (x, y) = t.vol_points[q];
        let mut val = 0.0;
        for m in 0..nm {
            val += nb[m] * b.eval(m, x + shift.0, y + shift.1);
        }
        let wq = t.vol_weights[q];
        for m in 0..nm {
            d[m] += wq * val * t.vol_vals[m][q];
        }
    }
    d[0] = target_avg;
    d
}

/// Smoothness indicator: sum over derivative multi-orders 1..k of the
/// squared derivative integral, scaled so uniform meshes are scale-free.
fn smoothness(ops: &Operators, coeffs: &[f64]) -> f64 {
    let t = &ops.tables;
    let b = &ops.basis;
    let k = b.degree;
    let (dx, dy) = (ops.mesh.dx, ops.mesh.dy);
    let mut beta = 0.0;
    for ax in 0..=k {
        for ay in 0..=(k - ax) {
            if ax + ay == 0 || (ops.mesh.dim == 1 && ay > 0) {
                continue;
            }
            let mut integral = 0.0;
            for q in 0..t.n_vol {
                let (x, y) = t.vol_points[q];
                let mut v = 0.0;
                for (m, &c) in coeffs.iter().enumerate() {
                    if c != 0.0 {
                        v += c * b.deriv(m, ax, ay, x, y);
                    }
                }
                integral += t.vol_weights[q] * v * v;
            }
            let scale = if ops.mesh.dim == 1 {
                1.0
            } else {
                (dy / dx).powi(ax as i32 - ay as i32)
            };
            beta += scale * integral;
        }
    }
    beta
}

/// Normalized nonlinear weights from linear weights and smoothness values.
pub fn weno_weights(gammas: &[f64], betas: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = gammas
        .iter()
        .zip(betas)
        .map(|(g, b)| g / (WENO_EPS0 + b).powi(WENO_R))
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

/// Convex combination of the cell polynomial and recentered, shifted
/// neighbor polynomials, weighted by smoothness. Missing neighbors are
/// dropped and the linear weights renormalized.
fn limit_weno_cell(ops: &Operators, snap: &[f64], sol: &mut DgSolution, cell: usize) {
    let nm = ops.basis.n_modes();
    let own = &snap[cell * nm..(cell + 1) * nm];
    let ubar = own[0];
    let gamma_all: &[f64] = if ops.mesh.dim == 1 {
        &WENO_GAMMA_1D
    } else {
        &WENO_GAMMA_2D
    };
    let mut cands = vec![own.to_vec()];
    let mut gammas = vec![gamma_all[0]];
    let mut slot = 1;
    for axis in 0..ops.mesh.dim {
        for dir in [-1i64, 1] {
            if let Some(n) = neighbor_cell(ops, cell, axis, dir) {
                let nb = &snap[n * nm..(n + 1) * nm];
                // The low-side neighbor extends to reference coordinate
                // xi + 1 on the target cell, the high side to xi - 1.
                let mut shift = (0.0, 0.0);
                if axis == 0 {
                    shift.0 = -dir as f64;
                } else {
                    shift.1 = -dir as f64;
                }
                cands.push(shifted_candidate(ops, nb, shift, ubar));
                gammas.push(gamma_all[slot]);
            }
            slot += 1;
        }
    }
    let gsum: f64 = gammas.iter().sum();
    for g in gammas.iter_mut() {
        *g /= gsum;
    }
    let betas: Vec<f64> = cands.iter().map(|c| smoothness(ops, c)).collect();
    let weights = weno_weights(&gammas, &betas);
    let out = sol.cell_mut(cell);
    for m in 0..nm {
        out[m] = weights
            .iter()
            .zip(&cands)
            .map(|(w, c)| w * c[m])
            .sum();
    }
    out[0] = ubar;
}

/// Per-cell (min, max) over the evaluation point set: volume quadrature
/// points, face quadrature points, and corners.
fn cell_extrema(ops: &Operators, snap: &[f64]) -> Vec<(f64, f64)> {
    let t = &ops.tables;
    let nm = ops.basis.n_modes();
    let n_sides = 2 * ops.mesh.dim;
    let mut out = Vec::with_capacity(ops.mesh.n_cells());
    for c in 0..ops.mesh.n_cells() {
        let coeffs = &snap[c * nm..(c + 1) * nm];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut take = |v: f64| {
            lo = lo.min(v);
            hi = hi.max(v);
        };
        for q in 0..t.n_vol {
            take((0..nm).map(|m| coeffs[m] * t.vol_vals[m][q]).sum());
        }
        for side in 0..n_sides {
            for q in 0..t.n_face {
                take((0..nm).map(|m| coeffs[m] * t.face_vals[side][m][q]).sum());
            }
        }
        for corner in 0..t.corner_vals[0].len() {
            take((0..nm).map(|m| coeffs[m] * t.corner_vals[m][corner]).sum());
        }
        out.push((lo, hi));
    }
    out
}

fn moe_neighbors(ops: &Operators, cell: usize) -> Vec<usize> {
    let mesh = &ops.mesh;
    let (ci, cj) = mesh.cell_coords(cell);
    let wrap = |idx: i64, n: usize, periodic: bool| -> Option<usize> {
        if idx >= 0 && (idx as usize) < n {
            Some(idx as usize)
        } else if periodic {
            Some(idx.rem_euclid(n as i64) as usize)
        } else {
            None
        }
    };
    let mut out = Vec::new();
    let jrange: &[i64] = if mesh.dim == 1 { &[0] } else { &[-1, 0, 1] };
    for &dj in jrange {
        for di in [-1i64, 0, 1] {
            if di == 0 && dj == 0 {
                continue;
            }
            let i = wrap(ci as i64 + di, mesh.nx, ops.problem.periodic_axis(0));
            let j = wrap(cj as i64 + dj, mesh.ny, ops.problem.periodic_axis(1));
            if let (Some(i), Some(j)) = (i, j) {
                out.push(mesh.cell_index(i, j));
            }
        }
    }
    out
}

fn moe_cutoff(s: f64) -> f64 {
    (s / MOE_CUTOFF).min(1.0).max(0.0)
}

/// Rescale the deviation from the cell average so point values respect
/// bounds built from neighbor extrema and the tolerance alpha h^1.5.
fn limit_moe_cell(
    ops: &Operators,
    snap: &[f64],
    extrema: &[(f64, f64)],
    sol: &mut DgSolution,
    cell: usize,
    alpha: f64,
) {
    let nm = ops.basis.n_modes();
    let ubar = snap[cell * nm];
    let h = if ops.mesh.dim == 1 {
        ops.mesh.dx
    } else {
        ops.mesh.dx.min(ops.mesh.dy)
    };
    let tol = alpha * h.powf(1.5);
    let mut upper = ubar + tol;
    let mut lower = ubar - tol;
    for n in moe_neighbors(ops, cell) {
        lower = lower.min(extrema[n].0);
        upper = upper.max(extrema[n].1);
    }
    let (u_min, u_max) = extrema[cell];
    let theta_hi = moe_cutoff((upper - ubar) / (u_max - ubar + MOE_EPS1));
    let theta_lo = moe_cutoff((lower - ubar) / (u_min - ubar - MOE_EPS1));
    let theta = 1.0_f64.min(theta_hi).min(theta_lo);
    if theta < 1.0 {
        let out = sol.cell_mut(cell);
        for m in 1..nm {
            out[m] = theta * snap[cell * nm + m];
        }
    }
}
