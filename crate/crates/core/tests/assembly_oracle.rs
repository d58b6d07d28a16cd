//! Entrywise comparison of the sparse operator assembly against dense
//! brute-force reimplementations, plus SPD checks of the implicit system
//! matrices.

mod common;

use std::sync::Arc;

use common::{
    custom_problem, dense_advection_residual, dense_boundary_rhs, dense_diffusion, dense_mass,
    is_spd, max_entry_diff, max_vec_diff,
};
use mble_core::basis::Basis;
use mble_core::imex::ssp3_tableau;
use mble_core::mesh::Mesh;
use mble_core::problem::{BoundaryCondition, FluxFunction, Problem};
use mble_core::problems::make_problem;
use mble_core::sipdg::Operators;
use mble_core::solution::DgSolution;

fn burgers_flux() -> FluxFunction {
    FluxFunction::with_derivative(Arc::new(|u| 0.5 * u * u), Arc::new(|u| u))
}

fn mbl_flux() -> FluxFunction {
    FluxFunction::new(Arc::new(|u: f64| {
        u * u / (u * u + 0.5 * (1.0 - u) * (1.0 - u))
    }))
}

fn dirichlet(v: f64) -> BoundaryCondition {
    BoundaryCondition::Dirichlet(Arc::new(move |_, y, t| v + 0.1 * t + 0.05 * y))
}

/// Assemble and compare mass, A1, and A2 against the dense oracle using a
/// one-point-richer quadrature rule (exact for these polynomial forms).
fn check_matrices(problem: Problem, mesh: Mesh, degree: usize, tol: f64) {
    let basis = Basis::new(problem.dim, degree);
    let oracle_mass = dense_mass(&mesh, &basis, degree + 2);
    let oracle_a1 = dense_diffusion(&problem, &mesh, &basis, degree + 2, false);
    let oracle_a2 = dense_diffusion(&problem, &mesh, &basis, degree + 2, true);
    let ops = Operators::assemble(problem, mesh, basis).unwrap();
    let dm = max_entry_diff(&ops.mass.to_dense(), &oracle_mass);
    let d1 = max_entry_diff(&ops.a1.to_dense(), &oracle_a1);
    let d2 = max_entry_diff(&ops.a2.to_dense(), &oracle_a2);
    assert!(dm < tol, "mass differs from oracle by {dm}");
    assert!(d1 < tol, "a1 differs from oracle by {d1}");
    assert!(d2 < tol, "a2 differs from oracle by {d2}");
}

#[test]
fn test_1d_four_cell_matrices_match_oracle() {
    let bcs_variants: Vec<[BoundaryCondition; 4]> = vec![
        [
            BoundaryCondition::Periodic,
            BoundaryCondition::Periodic,
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
        ],
        [
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
        ],
        [
            dirichlet(0.3),
            dirichlet(0.1),
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
        ],
        [
            dirichlet(0.66),
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
        ],
    ];
    for degree in 1..=3 {
        for bcs in &bcs_variants {
            let problem = custom_problem(
                1,
                (0.0, 4.0, 0.0, 1.0),
                burgers_flux(),
                FluxFunction::zero(),
                1e-3,
                5.0,
                bcs.clone(),
            );
            let mesh = Mesh::new_1d(0.0, 4.0, 4);
            check_matrices(problem, mesh, degree, 1e-12);
        }
    }
}

#[test]
fn test_2d_matrices_match_oracle_on_anisotropic_mesh() {
    // dx = 0.4, dy = 0.3 and nx != ny to expose any axis mix-up.
    let bcs_variants: Vec<[BoundaryCondition; 4]> = vec![
        [
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
        ],
        [
            dirichlet(0.9),
            dirichlet(0.0),
            dirichlet(0.2),
            dirichlet(0.5),
        ],
        [
            BoundaryCondition::Periodic,
            BoundaryCondition::Periodic,
            dirichlet(0.4),
            BoundaryCondition::Neumann,
        ],
    ];
    for degree in 1..=2 {
        for bcs in &bcs_variants {
            let problem = custom_problem(
                2,
                (0.0, 1.6, 0.0, 0.9),
                mbl_flux(),
                burgers_flux(),
                0.01,
                0.5,
                bcs.clone(),
            );
            let mesh = Mesh::new_2d(0.0, 1.6, 4, 0.0, 0.9, 3);
            check_matrices(problem, mesh, degree, 1e-12);
        }
    }
}

#[test]
fn test_catalog_problems_match_oracle() {
    let p1 = make_problem("mbl1d", Some(5.0), Some(0.66)).unwrap();
    let mesh = Mesh::new_1d(p1.x0, p1.x1, 4);
    check_matrices(p1, mesh, 3, 1e-12);

    let p2 = make_problem("mbl2d_ex5_cyl", None, None).unwrap();
    let mesh = Mesh::new_2d(p2.x0, p2.x1, 3, p2.y0, p2.y1, 3);
    check_matrices(p2, mesh, 2, 1e-12);

    let pb = make_problem("burgers", None, None).unwrap();
    let mesh = Mesh::new_1d(pb.x0, pb.x1, 4);
    check_matrices(pb, mesh, 2, 1e-12);
}

#[test]
fn test_advection_residual_matches_brute_force_1d() {
    for degree in 1..=3 {
        // Periodic Burgers with a projected smooth profile.
        let problem = custom_problem(
            1,
            (0.0, 2.0, 0.0, 1.0),
            burgers_flux(),
            FluxFunction::zero(),
            0.0,
            0.0,
            [
                BoundaryCondition::Periodic,
                BoundaryCondition::Periodic,
                BoundaryCondition::Neumann,
                BoundaryCondition::Neumann,
            ],
        );
        let mesh = Mesh::new_1d(0.0, 2.0, 8);
        let basis = Basis::new(1, degree);
        let sol = DgSolution::project(
            mesh.clone(),
            basis.clone(),
            degree + 1,
            |x, _| 0.3 + (std::f64::consts::PI * x).sin(),
        );
        let oracle = dense_advection_residual(&problem, &mesh, &basis, &sol.coeffs, 0.0);
        let ops = Operators::assemble(problem, mesh, basis).unwrap();
        let got = ops.advection_residual(&sol.coeffs, 0.0).unwrap();
        let d = max_vec_diff(&got, &oracle);
        assert!(d < 1e-12, "k={degree}: residual differs by {d}");
    }
}

#[test]
fn test_advection_residual_matches_brute_force_mixed_bcs() {
    // Inflow Dirichlet on the left, outflow Neumann on the right, with the
    // nonconvex two-phase flux and a time-dependent boundary trace.
    for degree in 1..=3 {
        let problem = custom_problem(
            1,
            (0.0, 3.0, 0.0, 1.0),
            mbl_flux(),
            FluxFunction::zero(),
            1e-3,
            5.0,
            [
                dirichlet(0.66),
                BoundaryCondition::Neumann,
                BoundaryCondition::Neumann,
                BoundaryCondition::Neumann,
            ],
        );
        let mesh = Mesh::new_1d(0.0, 3.0, 6);
        let basis = Basis::new(1, degree);
        let sol = DgSolution::project(
            mesh.clone(),
            basis.clone(),
            degree + 1,
            |x, _| 0.4 + 0.25 * (1.7 * x).cos(),
        );
        for t in [0.0, 0.37] {
            let oracle = dense_advection_residual(&problem, &mesh, &basis, &sol.coeffs, t);
            let ops = Operators::assemble(problem.clone(), mesh.clone(), basis.clone()).unwrap();
            let got = ops.advection_residual(&sol.coeffs, t).unwrap();
            let d = max_vec_diff(&got, &oracle);
            assert!(d < 1e-12, "k={degree} t={t}: residual differs by {d}");
        }
    }
}

#[test]
fn test_advection_residual_matches_brute_force_2d() {
    for degree in 1..=2 {
        let problem = custom_problem(
            2,
            (0.0, 1.6, 0.0, 0.9),
            mbl_flux(),
            burgers_flux(),
            0.01,
            0.5,
            [
                dirichlet(0.7),
                BoundaryCondition::Neumann,
                BoundaryCondition::Neumann,
                dirichlet(0.1),
            ],
        );
        let mesh = Mesh::new_2d(0.0, 1.6, 4, 0.0, 0.9, 3);
        let basis = Basis::new(2, degree);
        let sol = DgSolution::project(
            mesh.clone(),
            basis.clone(),
            degree + 1,
            |x, y| 0.45 + 0.3 * (x + 0.4 * y).sin(),
        );
        let oracle = dense_advection_residual(&problem, &mesh, &basis, &sol.coeffs, 0.2);
        let ops = Operators::assemble(problem, mesh, basis).unwrap();
        let got = ops.advection_residual(&sol.coeffs, 0.2).unwrap();
        let d = max_vec_diff(&got, &oracle);
        assert!(d < 1e-12, "k={degree}: residual differs by {d}");
    }
}

#[test]
fn test_boundary_rhs_matches_brute_force() {
    for degree in 1..=3 {
        let problem = custom_problem(
            1,
            (0.0, 3.0, 0.0, 1.0),
            mbl_flux(),
            FluxFunction::zero(),
            1e-3,
            5.0,
            [
                dirichlet(0.66),
                dirichlet(0.05),
                BoundaryCondition::Neumann,
                BoundaryCondition::Neumann,
            ],
        );
        let mesh = Mesh::new_1d(0.0, 3.0, 6);
        let basis = Basis::new(1, degree);
        let oracle = dense_boundary_rhs(&problem, &mesh, &basis, 0.8);
        let ops = Operators::assemble(problem, mesh, basis).unwrap();
        let got = ops.boundary_rhs(0.8);
        let d = max_vec_diff(&got, &oracle);
        assert!(d < 1e-14, "k={degree}: boundary data vector differs by {d}");
        assert!(oracle.iter().any(|&v| v != 0.0));
    }

    // 2D with y-dependent data on an x face.
    let problem = custom_problem(
        2,
        (0.0, 1.6, 0.0, 0.9),
        mbl_flux(),
        burgers_flux(),
        0.01,
        0.5,
        [
            dirichlet(0.9),
            BoundaryCondition::Neumann,
            dirichlet(0.2),
            BoundaryCondition::Neumann,
        ],
    );
    let mesh = Mesh::new_2d(0.0, 1.6, 4, 0.0, 0.9, 3);
    let basis = Basis::new(2, 2);
    let oracle = dense_boundary_rhs(&problem, &mesh, &basis, 0.3);
    let ops = Operators::assemble(problem, mesh, basis).unwrap();
    let got = ops.boundary_rhs(0.3);
    let d = max_vec_diff(&got, &oracle);
    assert!(d < 1e-14, "2d boundary data vector differs by {d}");
}

#[test]
fn test_boundary_rhs_zero_without_diffusion() {
    let problem = custom_problem(
        1,
        (0.0, 3.0, 0.0, 1.0),
        mbl_flux(),
        FluxFunction::zero(),
        0.0,
        0.0,
        [
            dirichlet(0.66),
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
            BoundaryCondition::Neumann,
        ],
    );
    let mesh = Mesh::new_1d(0.0, 3.0, 6);
    let basis = Basis::new(1, 2);
    let oracle = dense_boundary_rhs(&problem, &mesh, &basis, 0.5);
    assert!(oracle.iter().all(|&v| v == 0.0));
    let ops = Operators::assemble(problem, mesh, basis).unwrap();
    assert!(ops.boundary_rhs(0.5).iter().all(|&v| v == 0.0));
}

#[test]
fn test_w_and_stage_matrices_are_spd() {
    let cases = vec![
        (make_problem("mbl1d", Some(5.0), Some(0.66)).unwrap(), Mesh::new_1d(0.0, 3.0, 12), 2),
        (
            make_problem("mbl2d_ex5_cyl", None, None).unwrap(),
            Mesh::new_2d(-1.5, 1.5, 4, -1.5, 1.5, 4),
            1,
        ),
    ];
    let tableau = ssp3_tableau();
    for (problem, mesh, degree) in cases {
        let eps = problem.epsilon;
        let basis = Basis::new(problem.dim, degree);
        let ops = Operators::assemble(problem, mesh, basis).unwrap();
        assert!(ops.a1.asymmetry() < 1e-12, "a1 not symmetric");
        assert!(ops.a2.asymmetry() < 1e-12, "a2 not symmetric");
        assert!(is_spd(&ops.w.to_dense()), "w not SPD");
        for i in 0..tableau.at.len() {
            let aii = tableau.at[i][i];
            if aii == 0.0 {
                continue;
            }
            for dt in [1e-4, 0.01, 1.0] {
                let stage = ops.w.linear_combination(1.0, &ops.a2, dt * aii * eps);
                assert!(is_spd(&stage.to_dense()), "stage matrix not SPD at dt={dt}");
            }
        }
    }
}
