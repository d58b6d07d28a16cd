//! Interior penalty DG assembly and residual evaluation.
//!
//! Two diffusion forms are assembled: `a1` integrates over interior faces
//! only and discretizes the Laplacian acting on u_t; `a2` adds Dirichlet
//! faces and discretizes the Laplacian acting on u. Both share the volume
//! term sum over E of grad u . grad phi and the symmetric face terms
//!   - {grad u . n}[phi] - {grad phi . n}[u] + sigma [u][phi],
//! with [v] = v- - v+ and {v} = (v- + v+)/2 on interior faces, one-sided
//! values on boundary faces. Advection uses the local Lax-Friedrichs flux;
//! Dirichlet data enters the advective part through the flux exterior
//! state and the diffusive part through a time-dependent right-hand side.

use crate::basis::{side_index, Basis, QuadTables};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::problem::{BoundaryCondition, FluxFunction, Problem};
use crate::quadrature::GaussRule;
use crate::sparse::{CsrMatrix, TripletBuilder};

/// Mesh face with orientation. Interior faces (including periodic pairs)
/// have the unit normal along `axis` pointing from `minus` to `plus`;
/// boundary faces carry the outward normal of their domain side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Interior {
        axis: usize,
        minus: usize,
        plus: usize,
    },
    Boundary {
        axis: usize,
        cell: usize,
        /// Domain side index 2*axis + high.
        side: usize,
    },
}

impl Face {
    pub fn axis(&self) -> usize {
        match *self {
            Face::Interior { axis, .. } | Face::Boundary { axis, .. } => axis,
        }
    }
}

/// Per-cell penalty k(k+1)|e|/|E|; interior faces take the average of the
/// two adjacent cells' values, boundary faces their own cell's value.
/// |e| is 1 in 1D and the edge length in 2D.
pub fn penalty_sigma(mesh: &Mesh, degree: usize, face: &Face) -> f64 {
    let axis = face.axis();
    let per_cell = degree as f64 * (degree + 1) as f64 * mesh.face_area(axis) / mesh.cell_volume();
    match face {
        // Uniform mesh: both adjacent values coincide, so the average
        // equals either one.
        Face::Interior { .. } => per_cell,
        Face::Boundary { .. } => per_cell,
    }
}

/// Enumerate the faces of `mesh` under the problem's boundary conditions,
/// x-normal faces first, in row-major cell order.
pub fn build_faces(mesh: &Mesh, problem: &Problem) -> Vec<Face> {
    let mut faces = Vec::new();
    let mut add_axis = |axis: usize| {
        let n_along = if axis == 0 { mesh.nx } else { mesh.ny };
        let n_across = if axis == 0 { mesh.ny } else { mesh.nx };
        let at = |along: usize, across: usize| {
            if axis == 0 {
                mesh.cell_index(along, across)
            } else {
                mesh.cell_index(across, along)
            }
        };
        for across in 0..n_across {
            for along in 0..n_along.saturating_sub(1) {
                faces.push(Face::Interior {
                    axis,
                    minus: at(along, across),
                    plus: at(along + 1, across),
                });
            }
            if problem.periodic_axis(axis) {
                if n_along > 1 {
                    faces.push(Face::Interior {
                        axis,
                        minus: at(n_along - 1, across),
                        plus: at(0, across),
                    });
                }
            } else {
                faces.push(Face::Boundary {
                    axis,
                    cell: at(0, across),
                    side: side_index(axis, false),
                });
                faces.push(Face::Boundary {
                    axis,
                    cell: at(n_along - 1, across),
                    side: side_index(axis, true),
                });
            }
        }
    };
    add_axis(0);
    if mesh.dim == 2 {
        add_axis(1);
    }
    faces
}

/// Local Lax-Friedrichs flux for normal direction `normal`:
/// 1/2 n.(v(u-) + v(u+)) - c/2 (u+ - u-), with the dissipation speed c
/// maximized over the state interval (65 samples including endpoints).
pub fn llf_flux(
    um: f64,
    up: f64,
    normal: [f64; 2],
    flux_x: &FluxFunction,
    flux_y: &FluxFunction,
) -> Result<f64> {
    if !um.is_finite() || !up.is_finite() {
        return Err(Error::solver(format!(
            "non-finite trace values ({um}, {up}) in numerical flux"
        )));
    }
    let nv = |u: f64| normal[0] * flux_x.value(u) + normal[1] * flux_y.value(u);
    let lo = um.min(up);
    let hi = um.max(up);
    let mut c = 0.0f64;
    for j in 0..=64 {
        let u = lo + (hi - lo) * j as f64 / 64.0;
        let s = normal[0] * flux_x.derivative(u) + normal[1] * flux_y.derivative(u);
        c = c.max(s.abs());
    }
    Ok(0.5 * (nv(um) + nv(up)) - 0.5 * c * (up - um))
}

/// Axis-aligned LLF flux: `sign` is the normal component along the axis.
fn llf_flux_axis(um: f64, up: f64, sign: f64, flux: &FluxFunction) -> f64 {
    let c = flux.max_abs_speed(um, up);
    0.5 * sign * (flux.value(um) + flux.value(up)) - 0.5 * c * (up - um)
}

/// Time-independent operators assembled once per run.
pub struct Operators {
    pub mesh: Mesh,
    pub basis: Basis,
    pub tables: QuadTables,
    pub faces: Vec<Face>,
    /// Mass matrix |E| I.
    pub mass: CsrMatrix,
    /// Diffusion form over interior faces only.
    pub a1: CsrMatrix,
    /// Diffusion form over interior and Dirichlet faces.
    pub a2: CsrMatrix,
    /// W = M + tau eps^2 A1.
    pub w: CsrMatrix,
    pub problem: Problem,
}

impl Operators {
    pub fn assemble(problem: Problem, mesh: Mesh, basis: Basis) -> Result<Self> {
        problem.validate()?;
        if mesh.dim != problem.dim || basis.dim != problem.dim {
            return Err(Error::config("mesh, basis, and problem dimensions differ"));
        }
        if basis.degree < 1 {
            return Err(Error::config("spatial degree must be at least 1"));
        }
        for axis in 0..mesh.dim {
            let n = if axis == 0 { mesh.nx } else { mesh.ny };
            if problem.periodic_axis(axis) && n < 2 {
                return Err(Error::config("periodic axes need at least two cells"));
            }
        }
        let tables = basis.tables(&GaussRule::new(basis.degree + 1));
        let faces = build_faces(&mesh, &problem);
        let n = mesh.n_cells() * basis.n_modes();
        let mass = CsrMatrix::scaled_identity(n, mesh.cell_volume());
        let a1 = assemble_diffusion(&mesh, &basis, &tables, &faces, &problem, false);
        let a2 = assemble_diffusion(&mesh, &basis, &tables, &faces, &problem, true);
        let w = mass.linear_combination(1.0, &a1, problem.tau * problem.epsilon * problem.epsilon);
        Ok(Operators {
            mesh,
            basis,
            tables,
            faces,
            mass,
            a1,
            a2,
            w,
            problem,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_cells() * self.basis.n_modes()
    }

    /// A_adv(u_h, phi) for every test function, at time `t`.
    pub fn advection_residual(&self, coeffs: &[f64], t: f64) -> Result<Vec<f64>> {
        advection_residual(
            &self.mesh,
            &self.basis,
            &self.tables,
            &self.faces,
            &self.problem,
            coeffs,
            t,
        )
    }

    /// Diffusive Dirichlet data functional at time `t` (zero without
    /// Dirichlet faces).
    pub fn boundary_rhs(&self, t: f64) -> Vec<f64> {
        boundary_rhs(
            &self.mesh,
            &self.basis,
            &self.tables,
            &self.faces,
            &self.problem,
            t,
        )
    }
}

fn assemble_diffusion(
    mesh: &Mesh,
    basis: &Basis,
    tables: &QuadTables,
    faces: &[Face],
    problem: &Problem,
    include_dirichlet: bool,
) -> CsrMatrix {
    let nm = basis.n_modes();
    let n = mesh.n_cells() * nm;
    let mut trip = TripletBuilder::new(n);
    let vol = mesh.cell_volume();
    let inv_h = [1.0 / mesh.dx, if mesh.dim == 2 { 1.0 / mesh.dy } else { 0.0 }];

    // Volume term, identical local block for every cell.
    let mut local = vec![vec![0.0; nm]; nm];
    for (i, row) in local.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for q in 0..tables.n_vol {
                let gi = tables.vol_grads[i][q];
                let gj = tables.vol_grads[j][q];
                acc += tables.vol_weights[q]
                    * (gi[0] * gj[0] * inv_h[0] * inv_h[0]
                        + gi[1] * gj[1] * inv_h[1] * inv_h[1]);
            }
            *entry = acc * vol;
        }
    }
    for c in 0..mesh.n_cells() {
        for i in 0..nm {
            for j in 0..nm {
                trip.push(c * nm + i, c * nm + j, local[i][j]);
            }
        }
    }

    for face in faces {
        let axis = face.axis();
        let area = mesh.face_area(axis);
        let sigma = penalty_sigma(mesh, basis.degree, face);
        match *face {
            Face::Interior { minus, plus, .. } => {
                let sm = side_index(axis, true);
                let sp = side_index(axis, false);
                // (cell, trace side, jump sign)
                let sides = [(minus, sm, 1.0), (plus, sp, -1.0)];
                for &(ca, sa, ja) in &sides {
                    for &(cb, sb, jb) in &sides {
                        for i in 0..nm {
                            for j in 0..nm {
                                let mut acc = 0.0;
                                for q in 0..tables.n_face {
                                    let va = tables.face_vals[sa][i][q];
                                    let vb = tables.face_vals[sb][j][q];
                                    let ga = tables.face_grads[sa][i][q][axis] * inv_h[axis];
                                    let gb = tables.face_grads[sb][j][q][axis] * inv_h[axis];
                                    acc += tables.face_weights[q]
                                        * (-0.5 * gb * ja * va - 0.5 * ga * jb * vb
                                            + sigma * ja * jb * va * vb);
                                }
                                trip.push(ca * nm + i, cb * nm + j, acc * area);
                            }
                        }
                    }
                }
            }
            Face::Boundary { cell, side, .. } => {
                let dirichlet =
                    matches!(problem.bcs[side], BoundaryCondition::Dirichlet(_));
                if !(include_dirichlet && dirichlet) {
                    continue;
                }
                let outward = if side % 2 == 1 { 1.0 } else { -1.0 };
                for i in 0..nm {
                    for j in 0..nm {
                        let mut acc = 0.0;
                        for q in 0..tables.n_face {
                            let vi = tables.face_vals[side][i][q];
                            let vj = tables.face_vals[side][j][q];
                            let gi = tables.face_grads[side][i][q][axis] * inv_h[axis] * outward;
                            let gj = tables.face_grads[side][j][q][axis] * inv_h[axis] * outward;
                            acc += tables.face_weights[q]
                                * (-gj * vi - gi * vj + sigma * vi * vj);
                        }
                        trip.push(cell * nm + i, cell * nm + j, acc * area);
                    }
                }
            }
        }
    }
    trip.build()
}

#[allow(clippy::too_many_arguments)]
fn advection_residual(
    mesh: &Mesh,
    basis: &Basis,
    tables: &QuadTables,
    faces: &[Face],
    problem: &Problem,
    coeffs: &[f64],
    t: f64,
) -> Result<Vec<f64>> {
    let nm = basis.n_modes();
    let n = mesh.n_cells() * nm;
    assert_eq!(coeffs.len(), n);
    let mut r = vec![0.0; n];
    let vol = mesh.cell_volume();
    let inv_h = [1.0 / mesh.dx, if mesh.dim == 2 { 1.0 / mesh.dy } else { 0.0 }];

    // Volume term: -int v(u_h) . grad phi.
    for c in 0..mesh.n_cells() {
        let block = &coeffs[c * nm..(c + 1) * nm];
        for q in 0..tables.n_vol {
            let u: f64 = (0..nm).map(|m| block[m] * tables.vol_vals[m][q]).sum();
            if !u.is_finite() {
                return Err(Error::solver("non-finite solution value in residual"));
            }
            let fx = problem.flux_x.value(u);
            let fy = if mesh.dim == 2 {
                problem.flux_y.value(u)
            } else {
                0.0
            };
            let w = tables.vol_weights[q] * vol;
            for (i, ri) in r[c * nm..(c + 1) * nm].iter_mut().enumerate() {
                let g = tables.vol_grads[i][q];
                *ri -= w * (fx * g[0] * inv_h[0] + fy * g[1] * inv_h[1]);
            }
        }
    }

    // Face terms: numerical flux against the test traces.
    let trace = |cell: usize, side: usize, q: usize| -> f64 {
        let block = &coeffs[cell * nm..(cell + 1) * nm];
        (0..nm)
            .map(|m| block[m] * tables.face_vals[side][m][q])
            .sum()
    };
    for face in faces {
        let axis = face.axis();
        let area = mesh.face_area(axis);
        let flux = problem.flux(axis);
        match *face {
            Face::Interior { minus, plus, .. } => {
                let sm = side_index(axis, true);
                let sp = side_index(axis, false);
                for q in 0..tables.n_face {
                    let um = trace(minus, sm, q);
                    let up = trace(plus, sp, q);
                    if !um.is_finite() || !up.is_finite() {
                        return Err(Error::solver("non-finite trace in numerical flux"));
                    }
                    let vstar = llf_flux_axis(um, up, 1.0, flux);
                    let w = tables.face_weights[q] * area;
                    for i in 0..nm {
                        r[minus * nm + i] += w * vstar * tables.face_vals[sm][i][q];
                        r[plus * nm + i] -= w * vstar * tables.face_vals[sp][i][q];
                    }
                }
            }
            Face::Boundary { cell, side, .. } => {
                let outward = if side % 2 == 1 { 1.0 } else { -1.0 };
                for q in 0..tables.n_face {
                    let um = trace(cell, side, q);
                    if !um.is_finite() {
                        return Err(Error::solver("non-finite trace in numerical flux"));
                    }
                    let up = match &problem.bcs[side] {
                        BoundaryCondition::Dirichlet(data) => {
                            let (xi, eta) = tables.face_points[side][q];
                            let (x, y) = mesh.from_reference(cell, xi, eta);
                            data(x, y, t)
                        }
                        BoundaryCondition::Neumann => um,
                        BoundaryCondition::Periodic => unreachable!(),
                    };
                    let vstar = llf_flux_axis(um, up, outward, flux);
                    let w = tables.face_weights[q] * area;
                    for i in 0..nm {
                        r[cell * nm + i] += w * vstar * tables.face_vals[side][i][q];
                    }
                }
            }
        }
    }
    Ok(r)
}

fn boundary_rhs(
    mesh: &Mesh,
    basis: &Basis,
    tables: &QuadTables,
    faces: &[Face],
    problem: &Problem,
    t: f64,
) -> Vec<f64> {
    let nm = basis.n_modes();
    let mut r = vec![0.0; mesh.n_cells() * nm];
    if problem.epsilon == 0.0 {
        return r;
    }
    let inv_h = [1.0 / mesh.dx, if mesh.dim == 2 { 1.0 / mesh.dy } else { 0.0 }];
    for face in faces {
        let (cell, side) = match *face {
            Face::Boundary { cell, side, .. } => (cell, side),
            _ => continue,
        };
        let data = match &problem.bcs[side] {
            BoundaryCondition::Dirichlet(data) => data,
            _ => continue,
        };
        let axis = face.axis();
        let area = mesh.face_area(axis);
        let sigma = penalty_sigma(mesh, basis.degree, face);
        let outward = if side % 2 == 1 { 1.0 } else { -1.0 };
        for q in 0..tables.n_face {
            let (xi, eta) = tables.face_points[side][q];
            let (x, y) = mesh.from_reference(cell, xi, eta);
            let ud = data(x, y, t);
            let w = tables.face_weights[q] * area * problem.epsilon * ud;
            for i in 0..nm {
                let vi = tables.face_vals[side][i][q];
                let gi = tables.face_grads[side][i][q][axis] * inv_h[axis] * outward;
                // Data counterpart of the symmetrizing and penalty terms;
                // the penalty contribution enters with a positive sign so
                // that a smooth solution satisfies the scheme exactly.
                r[cell * nm + i] += w * (-gi + sigma * vi);
            }
        }
    }
    r
}
