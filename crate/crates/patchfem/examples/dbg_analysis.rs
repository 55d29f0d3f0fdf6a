use patchfem::analysis::*;
use patchfem::assembly::{DGConfig, PressureSpace, SpacePair, StokesSystem};
use patchfem::mesh::generate_structured_triangular;
use patchfem::patch::build_patches;
use patchfem::quadrature::{integrate_cell, integrate_segment};
use patchfem::reconstruction::build_basis;
use patchfem::solver::solve_stokes;
use nalgebra::Vector2;

fn main() {
    let exact = smooth_solution();
    for &mu in &[40.0f64, 20.0, 10.0] {
        println!("== mu = {mu}");
        let mut errs = Vec::new();
        for &n in &[10usize, 20, 40] {
            let mesh = generate_structured_triangular(n).unwrap();
            let pair = SpacePair::new(2, 1).unwrap();
            let basis = build_basis(&mesh, build_patches(&mesh, pair.target_u), pair.k).unwrap();
            let pressure = PressureSpace::build(&mesh, &pair).unwrap();
            let mut config = DGConfig::for_degree(pair.k);
            config.mu = mu;
            let system = StokesSystem::assemble(&mesh, &basis, &pressure, &config, &*exact.f, &*exact.g);
            let sol = solve_stokes(&system).unwrap();
            let nc = mesh.n_cells();
            let ux = basis.reconstruct(&sol.velocity[..nc]).unwrap();
            let uy = basis.reconstruct(&sol.velocity[nc..]).unwrap();
            // decompose
            let mut grad_int = 0.0; let mut grad_bnd = 0.0; let mut l2 = 0.0;
            let boundary_cell: Vec<bool> = {
                let mut b = vec![false; nc];
                for e in mesh.boundary_edges() { b[e.owner] = true; }
                b
            };
            for k in 0..nc {
                let ge = integrate_cell(&mesh, k, |x| {
                    let g = (exact.grad_u)(x);
                    let ex = ux.grad(k, x) - Vector2::new(g[(0,0)], g[(0,1)]);
                    let ey = uy.grad(k, x) - Vector2::new(g[(1,0)], g[(1,1)]);
                    ex.norm_squared() + ey.norm_squared()
                }, 12);
                if boundary_cell[k] { grad_bnd += ge } else { grad_int += ge }
                l2 += integrate_cell(&mesh, k, |x| {
                    (Vector2::new(ux.eval(k,x), uy.eval(k,x)) - (exact.u)(x)).norm_squared()
                }, 12);
            }
            let mut jump_int = 0.0; let mut jump_bnd = 0.0;
            for e in mesh.interior_edges() {
                let (a, b) = mesh.edge_points(e.vertices);
                jump_int += integrate_segment(a, b, |x| {
                    let jx = ux.eval(e.left, x) - ux.eval(e.right, x);
                    let jy = uy.eval(e.left, x) - uy.eval(e.right, x);
                    jx*jx + jy*jy
                }, 12) / e.length;
            }
            for e in mesh.boundary_edges() {
                let (a, b) = mesh.edge_points(e.vertices);
                jump_bnd += integrate_segment(a, b, |x| {
                    let g = (exact.g)(x);
                    let jx = ux.eval(e.owner, x) - g.x;
                    let jy = uy.eval(e.owner, x) - g.y;
                    jx*jx + jy*jy
                }, 12) / e.length;
            }
            let dg = (grad_int + grad_bnd + jump_int + jump_bnd).sqrt();
            println!("n={n:2} l2u={:.4e} dg={dg:.4e} | grad int={:.4e} bnd={:.4e} | jump int={:.4e} bnd={:.4e}",
                l2.sqrt(), grad_int.sqrt(), grad_bnd.sqrt(), jump_int.sqrt(), jump_bnd.sqrt());
            errs.push((mesh.h(), l2.sqrt(), dg));
        }
        let hs: Vec<f64> = errs.iter().map(|e| e.0).collect();
        let l2s: Vec<f64> = errs.iter().map(|e| e.1).collect();
        let dgs: Vec<f64> = errs.iter().map(|e| e.2).collect();
        println!("  LS slopes: l2u={:.3} dgu={:.3}", log_log_slope(&hs, &l2s), log_log_slope(&hs, &dgs));
    }
}
