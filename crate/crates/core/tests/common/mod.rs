//! Brute-force dense reimplementations of the operator assembly, used as
//! oracles by the integration tests. Faces are enumerated cell by cell
//! rather than strip by strip, and all integrals are evaluated from raw
//! basis calls instead of the precomputed tables.

#![allow(dead_code)]

use std::sync::Arc;

use mble_core::basis::Basis;
use mble_core::mesh::Mesh;
use mble_core::problem::{BoundaryCondition, FluxFunction, Problem};
use mble_core::quadrature::GaussRule;

/// One face of the mesh, listed from the cell on its low side.
enum OracleFace {
    /// `minus` is the low cell, `plus` the high cell; the normal points
    /// from minus to plus along `axis`.
    Interior { minus: usize, plus: usize, axis: usize },
    /// Domain boundary face of `cell` on side (`axis`, `high`).
    Boundary { cell: usize, axis: usize, high: bool },
}

/// Enumerate faces by scanning every cell's high side and the low sides on
/// the domain boundary. Periodic wrap faces count as interior.
fn oracle_faces(mesh: &Mesh, problem: &Problem) -> Vec<OracleFace> {
    let mut faces = Vec::new();
    for c in 0..mesh.n_cells() {
        for axis in 0..mesh.dim {
            match mesh.neighbor(c, axis, 1) {
                Some(nb) => faces.push(OracleFace::Interior { minus: c, plus: nb, axis }),
                None => {
                    let high = 2 * axis + 1;
                    if matches!(problem.bcs[high], BoundaryCondition::Periodic) {
                        faces.push(OracleFace::Interior {
                            minus: c,
                            plus: mesh.neighbor_periodic(c, axis, 1),
                            axis,
                        });
                    } else {
                        faces.push(OracleFace::Boundary { cell: c, axis, high: true });
                    }
                }
            }
            if mesh.neighbor(c, axis, -1).is_none()
                && !matches!(problem.bcs[2 * axis], BoundaryCondition::Periodic)
            {
                faces.push(OracleFace::Boundary { cell: c, axis, high: false });
            }
        }
    }
    faces
}

/// Reference coordinates of a point on a cell face: the axis coordinate is
/// pinned to 0 or 1 and the other runs along the face parameter `t`.
fn face_ref_point(dim: usize, axis: usize, high: bool, t: f64) -> (f64, f64) {
    let pinned = if high { 1.0 } else { 0.0 };
    if dim == 1 {
        (pinned, 0.0)
    } else if axis == 0 {
        (pinned, t)
    } else {
        (t, pinned)
    }
}

/// Quadrature nodes and weights along a face (a single unit-weight point
/// in 1D).
fn face_rule(dim: usize, quad: &GaussRule) -> (Vec<f64>, Vec<f64>) {
    if dim == 1 {
        (vec![0.0], vec![1.0])
    } else {
        (quad.nodes.clone(), quad.weights.clone())
    }
}

fn face_area(mesh: &Mesh, axis: usize) -> f64 {
    if mesh.dim == 1 {
        1.0
    } else if axis == 0 {
        mesh.dy
    } else {
        mesh.dx
    }
}

fn inv_h(mesh: &Mesh, axis: usize) -> f64 {
    if axis == 0 {
        1.0 / mesh.dx
    } else {
        1.0 / mesh.dy
    }
}

/// Dense symmetric interior penalty form with `n_quad` Gauss points per
/// direction. `with_dirichlet` adds the one-sided Dirichlet boundary terms
/// (the A2 variant); without them the form is A1.
pub fn dense_diffusion(
    problem: &Problem,
    mesh: &Mesh,
    basis: &Basis,
    n_quad: usize,
    with_dirichlet: bool,
) -> Vec<Vec<f64>> {
    let nm = basis.n_modes();
    let n = mesh.n_cells() * nm;
    let quad = GaussRule::new(n_quad);
    let vol = mesh.cell_volume();
    let sigma = |axis: usize| {
        basis.degree as f64 * (basis.degree + 1) as f64 * face_area(mesh, axis) / vol
    };
    let mut a = vec![vec![0.0; n]; n];

    // Volume term: integral of grad(phi_j) . grad(phi_i) over each cell.
    let mut vol_pts = Vec::new();
    if mesh.dim == 1 {
        for q in 0..quad.len() {
            vol_pts.push((quad.nodes[q], 0.0, quad.weights[q]));
        }
    } else {
        for qy in 0..quad.len() {
            for qx in 0..quad.len() {
                vol_pts.push((
                    quad.nodes[qx],
                    quad.nodes[qy],
                    quad.weights[qx] * quad.weights[qy],
                ));
            }
        }
    }
    for c in 0..mesh.n_cells() {
        for i in 0..nm {
            for j in 0..nm {
                let mut acc = 0.0;
                for &(x, y, w) in &vol_pts {
                    let gi = basis.grad(i, x, y);
                    let gj = basis.grad(j, x, y);
                    let mut dot = gi[0] * gj[0] * inv_h(mesh, 0) * inv_h(mesh, 0);
                    if mesh.dim == 2 {
                        dot += gi[1] * gj[1] * inv_h(mesh, 1) * inv_h(mesh, 1);
                    }
                    acc += w * dot;
                }
                a[c * nm + i][c * nm + j] += acc * vol;
            }
        }
    }

    // Face terms: -{grad u . n}[phi] - {grad phi . n}[u] + sigma [u][phi],
    // with [v] = v_minus - v_plus and one-sided full-weight traces on
    // Dirichlet boundary faces.
    let (nodes, weights) = face_rule(mesh.dim, &quad);
    for face in oracle_faces(mesh, problem) {
        match face {
            OracleFace::Interior { minus, plus, axis } => {
                let area = face_area(mesh, axis);
                let s = sigma(axis);
                let ih = inv_h(mesh, axis);
                // (cell, trace side, jump sign)
                let sides = [(minus, true, 1.0), (plus, false, -1.0)];
                for &(cu, uhigh, su) in &sides {
                    for &(cp, phigh, sp) in &sides {
                        for j in 0..nm {
                            for i in 0..nm {
                                let mut acc = 0.0;
                                for (q, &t) in nodes.iter().enumerate() {
                                    let (ux, uy) = face_ref_point(mesh.dim, axis, uhigh, t);
                                    let (px, py) = face_ref_point(mesh.dim, axis, phigh, t);
                                    let vu = basis.eval(j, ux, uy);
                                    let gu = basis.grad(j, ux, uy)[axis] * ih;
                                    let vp = basis.eval(i, px, py);
                                    let gp = basis.grad(i, px, py)[axis] * ih;
                                    acc += weights[q]
                                        * (-0.5 * gu * sp * vp - 0.5 * gp * su * vu
                                            + s * su * vu * sp * vp);
                                }
                                a[cp * nm + i][cu * nm + j] += acc * area;
                            }
                        }
                    }
                }
            }
            OracleFace::Boundary { cell, axis, high } => {
                let side = 2 * axis + usize::from(high);
                if !with_dirichlet
                    || !matches!(problem.bcs[side], BoundaryCondition::Dirichlet(_))
                {
                    continue;
                }
                let area = face_area(mesh, axis);
                let s = sigma(axis);
                let ih = inv_h(mesh, axis);
                let outward = if high { 1.0 } else { -1.0 };
                for j in 0..nm {
                    for i in 0..nm {
                        let mut acc = 0.0;
                        for (q, &t) in nodes.iter().enumerate() {
                            let (x, y) = face_ref_point(mesh.dim, axis, high, t);
                            let vu = basis.eval(j, x, y);
                            let gu = basis.grad(j, x, y)[axis] * ih * outward;
                            let vp = basis.eval(i, x, y);
                            let gp = basis.grad(i, x, y)[axis] * ih * outward;
                            acc += weights[q] * (-gu * vp - gp * vu + s * vu * vp);
                        }
                        a[cell * nm + i][cell * nm + j] += acc * area;
                    }
                }
            }
        }
    }
    a
}

/// Dense mass matrix: integral of phi_j phi_i over each cell.
pub fn dense_mass(mesh: &Mesh, basis: &Basis, n_quad: usize) -> Vec<Vec<f64>> {
    let nm = basis.n_modes();
    let n = mesh.n_cells() * nm;
    let quad = GaussRule::new(n_quad);
    let vol = mesh.cell_volume();
    let mut a = vec![vec![0.0; n]; n];
    let integ = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        if mesh.dim == 1 {
            quad.integrate(|x| f(x, 0.0))
        } else {
            quad.integrate_2d(f)
        }
    };
    for c in 0..mesh.n_cells() {
        for i in 0..nm {
            for j in 0..nm {
                a[c * nm + i][c * nm + j] +=
                    vol * integ(&|x, y| basis.eval(i, x, y) * basis.eval(j, x, y));
            }
        }
    }
    a
}

fn llf(um: f64, up: f64, sign: f64, flux: &FluxFunction) -> f64 {
    let c = flux.max_abs_speed(um, up);
    0.5 * sign * (flux.value(um) + flux.value(up)) - 0.5 * c * (up - um)
}

fn eval_solution(basis: &Basis, cell: &[f64], x: f64, y: f64) -> f64 {
    (0..basis.n_modes()).map(|m| cell[m] * basis.eval(m, x, y)).sum()
}

/// Brute-force advective residual: volume term minus flux dotted with test
/// gradients plus local Lax-Friedrichs face fluxes. Must use the same
/// quadrature order as the production operator because the flux is not a
/// polynomial in the state.
pub fn dense_advection_residual(
    problem: &Problem,
    mesh: &Mesh,
    basis: &Basis,
    coeffs: &[f64],
    t: f64,
) -> Vec<f64> {
    let nm = basis.n_modes();
    let quad = GaussRule::new(basis.degree + 1);
    let vol = mesh.cell_volume();
    let mut r = vec![0.0; coeffs.len()];

    let mut vol_pts = Vec::new();
    if mesh.dim == 1 {
        for q in 0..quad.len() {
            vol_pts.push((quad.nodes[q], 0.0, quad.weights[q]));
        }
    } else {
        for qy in 0..quad.len() {
            for qx in 0..quad.len() {
                vol_pts.push((
                    quad.nodes[qx],
                    quad.nodes[qy],
                    quad.weights[qx] * quad.weights[qy],
                ));
            }
        }
    }
    for c in 0..mesh.n_cells() {
        let cell = &coeffs[c * nm..(c + 1) * nm];
        for &(x, y, w) in &vol_pts {
            let u = eval_solution(basis, cell, x, y);
            let fx = problem.flux_x.value(u);
            let fy = if mesh.dim == 2 { problem.flux_y.value(u) } else { 0.0 };
            for i in 0..nm {
                let g = basis.grad(i, x, y);
                let mut dot = fx * g[0] * inv_h(mesh, 0);
                if mesh.dim == 2 {
                    dot += fy * g[1] * inv_h(mesh, 1);
                }
                r[c * nm + i] -= w * vol * dot;
            }
        }
    }

    let (nodes, weights) = face_rule(mesh.dim, &quad);
    for face in oracle_faces(mesh, problem) {
        match face {
            OracleFace::Interior { minus, plus, axis } => {
                let area = face_area(mesh, axis);
                let flux = if axis == 0 { &problem.flux_x } else { &problem.flux_y };
                for (q, &tq) in nodes.iter().enumerate() {
                    let (mx, my) = face_ref_point(mesh.dim, axis, true, tq);
                    let (px, py) = face_ref_point(mesh.dim, axis, false, tq);
                    let um = eval_solution(basis, &coeffs[minus * nm..(minus + 1) * nm], mx, my);
                    let up = eval_solution(basis, &coeffs[plus * nm..(plus + 1) * nm], px, py);
                    let vstar = llf(um, up, 1.0, flux);
                    let w = weights[q] * area;
                    for i in 0..nm {
                        r[minus * nm + i] += w * vstar * basis.eval(i, mx, my);
                        r[plus * nm + i] -= w * vstar * basis.eval(i, px, py);
                    }
                }
            }
            OracleFace::Boundary { cell, axis, high } => {
                let side = 2 * axis + usize::from(high);
                let area = face_area(mesh, axis);
                let flux = if axis == 0 { &problem.flux_x } else { &problem.flux_y };
                let outward = if high { 1.0 } else { -1.0 };
                for (q, &tq) in nodes.iter().enumerate() {
                    let (x, y) = face_ref_point(mesh.dim, axis, high, tq);
                    let um = eval_solution(basis, &coeffs[cell * nm..(cell + 1) * nm], x, y);
                    let up = match &problem.bcs[side] {
                        BoundaryCondition::Dirichlet(g) => {
                            let (px, py) = mesh.from_reference(cell, x, y);
                            g(px, py, t)
                        }
                        BoundaryCondition::Neumann => um,
                        BoundaryCondition::Periodic => unreachable!(),
                    };
                    let vstar = llf(um, up, outward, flux);
                    let w = weights[q] * area;
                    for i in 0..nm {
                        r[cell * nm + i] += w * vstar * basis.eval(i, x, y);
                    }
                }
            }
        }
    }
    r
}

/// Brute-force Dirichlet data vector: eps * integral of u_D (sigma phi_i -
/// grad phi_i . n) over each Dirichlet face.
pub fn dense_boundary_rhs(problem: &Problem, mesh: &Mesh, basis: &Basis, t: f64) -> Vec<f64> {
    let nm = basis.n_modes();
    let mut r = vec![0.0; mesh.n_cells() * nm];
    if problem.epsilon == 0.0 {
        return r;
    }
    let quad = GaussRule::new(basis.degree + 1);
    let (nodes, weights) = face_rule(mesh.dim, &quad);
    let vol = mesh.cell_volume();
    for face in oracle_faces(mesh, problem) {
        let OracleFace::Boundary { cell, axis, high } = face else { continue };
        let side = 2 * axis + usize::from(high);
        let BoundaryCondition::Dirichlet(g) = &problem.bcs[side] else { continue };
        let area = face_area(mesh, axis);
        let sigma = basis.degree as f64 * (basis.degree + 1) as f64 * area / vol;
        let ih = inv_h(mesh, axis);
        let outward = if high { 1.0 } else { -1.0 };
        for (q, &tq) in nodes.iter().enumerate() {
            let (x, y) = face_ref_point(mesh.dim, axis, high, tq);
            let (px, py) = mesh.from_reference(cell, x, y);
            let data = g(px, py, t);
            let w = weights[q] * area * problem.epsilon * data;
            for i in 0..nm {
                let vi = basis.eval(i, x, y);
                let gi = basis.grad(i, x, y)[axis] * ih * outward;
                r[cell * nm + i] += w * (sigma * vi - gi);
            }
        }
    }
    r
}

/// In-place dense Cholesky; returns false if any pivot is not positive.
pub fn is_spd(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

/// Largest entrywise difference between two dense matrices.
pub fn max_entry_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (&x, &y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

/// Largest entrywise difference between two vectors.
pub fn max_vec_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(0.0, f64::max)
}

/// A hand-built problem with explicit boundary conditions on every side.
pub fn custom_problem(
    dim: usize,
    bounds: (f64, f64, f64, f64),
    flux_x: FluxFunction,
    flux_y: FluxFunction,
    epsilon: f64,
    tau: f64,
    bcs: [BoundaryCondition; 4],
) -> Problem {
    Problem {
        dim,
        x0: bounds.0,
        x1: bounds.1,
        y0: bounds.2,
        y1: bounds.3,
        flux_x,
        flux_y,
        epsilon,
        tau,
        initial: Arc::new(|_, _| 0.0),
        bcs,
        t_end: 1.0,
    }
}
