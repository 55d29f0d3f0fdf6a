//! Manufactured solutions, error norms, and the benchmark studies
//! (smooth convergence, inf-sup sequences, L-shape rates, driven cavity).

pub mod cases;
pub mod studies;

pub use cases::{cavity_case, lshape_solution, polynomial_case, smooth_solution, solve_lambda};
pub use studies::{
    convergence_study, infsup_study, lshape_study, log_log_slope, ConvergenceStudy,
    InfSupReport, InfSupSample, LShapeRow, LShapeStudy, Slopes,
};

use crate::assembly::PressureSpace;
use crate::mesh::PolygonalMesh;
use crate::quadrature::{integrate_cell, integrate_segment, MAX_TRIANGLE_DEGREE};
use crate::reconstruction::ReconstructionBasis;
use crate::solver::StokesSolution;
use nalgebra::{Matrix2, Point2, Vector2};

/// A vector-valued field of the plane (velocity, source, boundary datum).
pub type VectorField = Box<dyn Fn(Point2<f64>) -> Vector2<f64> + Send + Sync>;
/// A scalar field of the plane (pressure).
pub type ScalarField = Box<dyn Fn(Point2<f64>) -> f64 + Send + Sync>;
/// A matrix-valued field; row i holds ∇uᵢ = (∂uᵢ/∂x, ∂uᵢ/∂y).
pub type TensorField = Box<dyn Fn(Point2<f64>) -> Matrix2<f64> + Send + Sync>;

/// An analytic Stokes solution (u, p) together with the data (f, g) derived
/// so that −Δu + ∇p = f and ∇·u = 0 hold exactly, enabling error measurement.
pub struct ManufacturedSolution {
    /// Exact velocity u.
    pub u: VectorField,
    /// Exact velocity gradient; entry (i, j) is ∂uᵢ/∂xⱼ.
    pub grad_u: TensorField,
    /// Exact pressure p (the reported error is invariant under constants).
    pub p: ScalarField,
    /// Momentum source f = −Δu + ∇p.
    pub f: VectorField,
    /// Dirichlet datum g = u|_∂Ω.
    pub g: VectorField,
}

/// Problem data alone (source + boundary velocity) for runs without an exact
/// solution, such as the lid-driven cavity.
pub struct StokesData {
    /// Momentum source f.
    pub f: VectorField,
    /// Dirichlet datum g.
    pub g: VectorField,
}

/// Discretization errors of one solve.
#[derive(Debug, Clone, Copy)]
pub struct ErrorReport {
    /// ‖u − u_h‖_{L²(Ω)}.
    pub l2_velocity: f64,
    /// DG energy error: broken H¹ seminorm plus h_e⁻¹-weighted jumps.
    pub dg_velocity: f64,
    /// ‖p − p_h‖_{L²(Ω)} after shifting both sides to zero mean.
    pub l2_pressure: f64,
    /// Reported DOF count: one pressure DOF per cell (velocity has 2× that).
    pub dofs: usize,
    /// Mesh size h (max cell diameter).
    pub h: f64,
}

/// Quadrature exactness used for edge terms when measuring errors against a
/// (generally non-polynomial) exact solution.
fn error_edge_exactness(degree: usize) -> usize {
    2 * degree + 8
}

/// Measures the three error norms of a discrete solution against an exact one.
///
/// The DG energy error is ‖e‖²_DG = Σ_K ‖∇e‖²_K + Σ_e h_e⁻¹‖[[e]]‖²_e with
/// e = u_h − u, where interior jumps of the (continuous) exact velocity
/// vanish and boundary edges contribute the one-sided trace u_h − g. The
/// pressure error shifts both p_h and p to zero mean over Ω, so it is
/// invariant under the gauge constant. The integrands are non-polynomial;
/// cells use the highest available triangle rule and edges a Gauss rule a few
/// orders above the field degree.
pub fn error_norms(
    mesh: &PolygonalMesh,
    basis_u: &ReconstructionBasis,
    pressure: &PressureSpace,
    solution: &StokesSolution,
    exact: &ManufacturedSolution,
) -> ErrorReport {
    let n = mesh.n_cells();
    let ux = basis_u.reconstruct(&solution.velocity[..n]).expect("one DOF per cell");
    let uy = basis_u.reconstruct(&solution.velocity[n..]).expect("one DOF per cell");
    let vol = MAX_TRIANGLE_DEGREE;
    let edge = error_edge_exactness(basis_u.degree().max(pressure.degree()));

    let mut l2u = 0.0;
    let mut broken_h1 = 0.0;
    let mut area = 0.0;
    let mut int_ph = 0.0;
    let mut int_p = 0.0;
    for k in 0..n {
        l2u += integrate_cell(
            mesh,
            k,
            |x| {
                let e = Vector2::new(ux.eval(k, x), uy.eval(k, x)) - (exact.u)(x);
                e.norm_squared()
            },
            vol,
        );
        broken_h1 += integrate_cell(
            mesh,
            k,
            |x| {
                let g = (exact.grad_u)(x);
                let ex = ux.grad(k, x) - Vector2::new(g[(0, 0)], g[(0, 1)]);
                let ey = uy.grad(k, x) - Vector2::new(g[(1, 0)], g[(1, 1)]);
                ex.norm_squared() + ey.norm_squared()
            },
            vol,
        );
        area += mesh.area(k);
        int_ph += integrate_cell(
            mesh,
            k,
            |x| pressure.eval_field(&solution.pressure, k, x),
            vol,
        );
        int_p += integrate_cell(mesh, k, |x| (exact.p)(x), vol);
    }

    let mut jumps = 0.0;
    for e in mesh.interior_edges() {
        let (a, b) = mesh.edge_points(e.vertices);
        jumps += integrate_segment(
            a,
            b,
            |x| {
                let jx = ux.eval(e.left, x) - ux.eval(e.right, x);
                let jy = uy.eval(e.left, x) - uy.eval(e.right, x);
                jx * jx + jy * jy
            },
            edge,
        ) / e.length;
    }
    for e in mesh.boundary_edges() {
        let (a, b) = mesh.edge_points(e.vertices);
        jumps += integrate_segment(
            a,
            b,
            |x| {
                let g = (exact.g)(x);
                let jx = ux.eval(e.owner, x) - g.x;
                let jy = uy.eval(e.owner, x) - g.y;
                jx * jx + jy * jy
            },
            edge,
        ) / e.length;
    }

    let mean_ph = int_ph / area;
    let mean_p = int_p / area;
    let mut l2p = 0.0;
    for k in 0..n {
        l2p += integrate_cell(
            mesh,
            k,
            |x| {
                let d = (pressure.eval_field(&solution.pressure, k, x) - mean_ph)
                    - ((exact.p)(x) - mean_p);
                d * d
            },
            vol,
        );
    }

    ErrorReport {
        l2_velocity: l2u.max(0.0).sqrt(),
        dg_velocity: (broken_h1 + jumps).max(0.0).sqrt(),
        l2_pressure: l2p.max(0.0).sqrt(),
        dofs: n,
        h: mesh.h(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{DGConfig, SpacePair, StokesSystem};
    use crate::mesh::generate_structured_triangular;
    use crate::patch::build_patches;
    use crate::reconstruction::build_basis;
    use crate::solver::solve_stokes;

    fn zero_exact() -> ManufacturedSolution {
        ManufacturedSolution {
            u: Box::new(|_| Vector2::zeros()),
            grad_u: Box::new(|_| Matrix2::zeros()),
            p: Box::new(|_| 0.0),
            f: Box::new(|_| Vector2::zeros()),
            g: Box::new(|_| Vector2::zeros()),
        }
    }

    fn discretize(
        n: usize,
        k: usize,
        k_p: usize,
    ) -> (PolygonalMesh, ReconstructionBasis, PressureSpace) {
        let mesh = generate_structured_triangular(n).unwrap();
        let pair = SpacePair::new(k, k_p).unwrap();
        let basis = build_basis(&mesh, build_patches(&mesh, pair.target_u), pair.k).unwrap();
        let pressure = PressureSpace::build(&mesh, &pair).unwrap();
        (mesh, basis, pressure)
    }

    #[test]
    fn zero_solution_against_zero_exact_has_zero_errors() {
        let (mesh, basis, pressure) = discretize(2, 1, 0);
        let solution = StokesSolution {
            velocity: vec![0.0; 2 * mesh.n_cells()],
            pressure: vec![0.0; pressure.n_dofs()],
            multiplier: 0.0,
            residual_momentum: 0.0,
            residual_mass: 0.0,
        };
        let report = error_norms(&mesh, &basis, &pressure, &solution, &zero_exact());
        assert_eq!(report.l2_velocity, 0.0);
        assert_eq!(report.dg_velocity, 0.0);
        assert_eq!(report.l2_pressure, 0.0);
        assert_eq!(report.dofs, mesh.n_cells());
        assert!(report.h > 0.0);
    }

    #[test]
    fn velocity_error_of_the_nodal_interpolant_matches_a_direct_computation() {
        // Setting u_h to the reconstruction of the exact nodal values makes
        // the L² error the reconstruction-operator error by definition.
        let (mesh, basis, pressure) = discretize(4, 2, 1);
        let exact = smooth_solution();
        let n = mesh.n_cells();
        let mut velocity = vec![0.0; 2 * n];
        for k in 0..n {
            let v = (exact.u)(mesh.barycenter(k));
            velocity[k] = v.x;
            velocity[n + k] = v.y;
        }
        let solution = StokesSolution {
            velocity: velocity.clone(),
            pressure: vec![0.0; pressure.n_dofs()],
            multiplier: 0.0,
            residual_momentum: 0.0,
            residual_mass: 0.0,
        };
        // Make the exact pressure zero so only the velocity terms differ.
        let mut exact = exact;
        exact.p = Box::new(|_| 0.0);
        let report = error_norms(&mesh, &basis, &pressure, &solution, &exact);

        let ux = basis.reconstruct(&velocity[..n]).unwrap();
        let uy = basis.reconstruct(&velocity[n..]).unwrap();
        let mut direct = 0.0;
        for k in 0..n {
            direct += integrate_cell(
                &mesh,
                k,
                |x| {
                    let e = Vector2::new(ux.eval(k, x), uy.eval(k, x)) - (exact.u)(x);
                    e.norm_squared()
                },
                MAX_TRIANGLE_DEGREE,
            );
        }
        assert!((report.l2_velocity - direct.sqrt()).abs() <= 1e-12 * direct.sqrt());
        assert!(report.dg_velocity > report.l2_velocity); // jumps + gradients weigh in
        assert_eq!(report.l2_pressure, 0.0);
    }

    #[test]
    fn pressure_error_is_invariant_under_gauge_constants() {
        let (mesh, basis, pressure) = discretize(3, 1, 1);
        let exact = smooth_solution();
        let system = StokesSystem::assemble(
            &mesh,
            &basis,
            &pressure,
            &DGConfig::for_degree(1),
            &*exact.f,
            &*exact.g,
        );
        let solution = solve_stokes(&system).unwrap();
        let base = error_norms(&mesh, &basis, &pressure, &solution, &exact);

        let mut shifted = smooth_solution();
        shifted.p = Box::new(|x: Point2<f64>| x.x * x.x + x.y * x.y + 17.25);
        let moved = error_norms(&mesh, &basis, &pressure, &solution, &shifted);

        assert!((base.l2_pressure - moved.l2_pressure).abs() <= 1e-10 * (1.0 + base.l2_pressure));
        assert_eq!(base.l2_velocity, moved.l2_velocity);
        assert_eq!(base.dg_velocity, moved.dg_velocity);
    }

    #[test]
    fn polynomial_solutions_are_reproduced_to_solver_accuracy() {
        // Patch test: for these pairs the exact velocity and pressure lie in
        // the discrete spaces, so the scheme must reproduce them exactly (up
        // to solver accuracy) on a coarse mesh.
        for (k, k_p) in [(1usize, 0usize), (2, 1), (2, 2)] {
            let exact = polynomial_case(k, k_p).unwrap();
            let (mesh, basis, pressure) = discretize(4, k, k_p);
            let system = StokesSystem::assemble(
                &mesh,
                &basis,
                &pressure,
                &DGConfig::for_degree(k),
                &*exact.f,
                &*exact.g,
            );
            let solution = solve_stokes(&system).unwrap();
            let report = error_norms(&mesh, &basis, &pressure, &solution, &exact);
            assert!(
                report.l2_velocity <= 1e-7
                    && report.dg_velocity <= 1e-7
                    && report.l2_pressure <= 1e-7,
                "pair ({k},{k_p}): errors {:.3e} {:.3e} {:.3e}",
                report.l2_velocity,
                report.dg_velocity,
                report.l2_pressure,
            );
            // The reported discrete pressure also satisfies the zero-mean gauge.
            let mass: f64 = system
                .pressure_integrals
                .iter()
                .zip(&solution.pressure)
                .map(|(w, p)| w * p)
                .sum();
            assert!(mass.abs() <= 1e-10);
        }
    }
}
