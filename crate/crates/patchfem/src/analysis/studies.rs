//! Study drivers: convergence sequences, inf-sup sweeps, and the L-shape
//! refinement table. Meshes run sequentially by default; `parallel = true`
//! distributes independent meshes over threads (capped by the
//! `PATCHFEM_THREADS` environment variable) and merges reports back in mesh
//! order, so the output is identical either way.

use super::{error_norms, lshape_solution, ErrorReport, ManufacturedSolution};
use crate::assembly::{DGConfig, PressureSpace, SpacePair, StokesSystem};
use crate::error::{Error, SolverError};
use crate::mesh::{generate_lshape_triangular, PolygonalMesh};
use crate::patch::build_patches;
use crate::reconstruction::build_basis;
use crate::solver::{infsup_mu_min, solve_stokes};
use nalgebra::{Point2, Vector2};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Base resolution of the structured L-mesh (sub-squares per unit length):
/// 6·6² = 216 triangles before refinement, comparable to the coarsest meshes
/// customary for this benchmark.
const LSHAPE_BASE_N: usize = 6;

/// Least-squares slope of log y against log x (the observed convergence
/// order when x = h and y = error). Non-positive y values are clamped to the
/// smallest positive float to keep the fit defined.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "a slope needs at least two samples");
    let lx: Vec<f64> = x.iter().map(|&v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|&v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Observed order between two meshes: log(e₀/e₁) / log(h₀/h₁).
fn pairwise_order(h0: f64, e0: f64, h1: f64, e1: f64) -> f64 {
    (e0.max(f64::MIN_POSITIVE) / e1.max(f64::MIN_POSITIVE)).ln() / (h0 / h1).ln()
}

/// Convergence orders of the three error norms.
#[derive(Debug, Clone, Copy)]
pub struct Slopes {
    pub l2_velocity: f64,
    pub dg_velocity: f64,
    pub l2_pressure: f64,
}

/// Per-mesh errors of a refinement sequence plus the observed orders.
#[derive(Debug)]
pub struct ConvergenceStudy {
    pub k: usize,
    pub k_p: usize,
    /// One report per mesh, ordered coarse → fine.
    pub reports: Vec<ErrorReport>,
    /// Least-squares log–log orders over all meshes.
    pub slopes: Slopes,
    /// Pairwise orders between successive meshes (length = reports − 1).
    pub pairwise: Vec<Slopes>,
}

/// Inf-sup constant of one mesh.
#[derive(Debug, Clone, Copy)]
pub struct InfSupSample {
    pub h: f64,
    pub mu_min: f64,
}

/// μ_min across a mesh sequence with the pass/fail verdict.
#[derive(Debug)]
pub struct InfSupReport {
    pub k: usize,
    pub k_p: usize,
    /// One sample per mesh; h is strictly decreasing.
    pub samples: Vec<InfSupSample>,
    /// PASS iff every successive ratio μ_{i+1}/μ_i ≥ 0.8, the final
    /// μ_min ≥ 0.01, and no mesh produced a degenerate pencil.
    pub passed: bool,
    /// Diagnostics when a mesh failed the eigenvalue test outright.
    pub diagnostic: Option<String>,
}

impl InfSupReport {
    /// Successive ratios μ_{i+1}/μ_i (empty with fewer than two samples).
    pub fn ratios(&self) -> Vec<f64> {
        self.samples.windows(2).map(|w| w[1].mu_min / w[0].mu_min).collect()
    }
}

/// One row of the L-shape refinement table.
#[derive(Debug, Clone, Copy)]
pub struct LShapeRow {
    /// Cell count (the reported DOF convention; velocity unknowns are 2×).
    pub dofs: usize,
    /// Velocity L² error.
    pub l2_velocity: f64,
    /// Observed order against the previous row (`None` on the first).
    pub order: Option<f64>,
}

/// The L-shape singular benchmark: errors per refinement level.
#[derive(Debug)]
pub struct LShapeStudy {
    pub k: usize,
    pub k_p: usize,
    pub rows: Vec<LShapeRow>,
    /// Least-squares order of the velocity L² error over all levels.
    pub slope: f64,
    /// Full error reports (pressure errors are supplementary on this case).
    pub reports: Vec<ErrorReport>,
}

/// Discretizes, solves, and measures one mesh of a study.
fn run_case(
    mesh: &PolygonalMesh,
    pair: &SpacePair,
    exact: &ManufacturedSolution,
) -> crate::Result<ErrorReport> {
    let basis = build_basis(mesh, build_patches(mesh, pair.target_u), pair.k)?;
    let pressure = PressureSpace::build(mesh, pair)?;
    let config = DGConfig::for_degree(pair.k);
    let system = StokesSystem::assemble(mesh, &basis, &pressure, &config, &*exact.f, &*exact.g);
    let solution = solve_stokes(&system)?;
    Ok(error_norms(mesh, &basis, &pressure, &solution, exact))
}

/// Runs a manufactured case over a mesh sequence and reports errors and
/// observed orders. The meshes must be ordered strictly coarse → fine (at
/// least three of them); solver failures propagate with the mesh identified.
pub fn convergence_study(
    exact: &ManufacturedSolution,
    pair: SpacePair,
    meshes: &[PolygonalMesh],
    parallel: bool,
) -> crate::Result<ConvergenceStudy> {
    require_refining(meshes, 3)?;
    let reports = run_meshes(meshes, parallel, |mesh| run_case(mesh, &pair, exact))?;
    let h: Vec<f64> = reports.iter().map(|r| r.h).collect();
    let pick = |f: fn(&ErrorReport) -> f64| -> Vec<f64> { reports.iter().map(f).collect() };
    let (l2u, dgu, l2p) = (
        pick(|r| r.l2_velocity),
        pick(|r| r.dg_velocity),
        pick(|r| r.l2_pressure),
    );
    let slopes = Slopes {
        l2_velocity: log_log_slope(&h, &l2u),
        dg_velocity: log_log_slope(&h, &dgu),
        l2_pressure: log_log_slope(&h, &l2p),
    };
    let pairwise = (1..reports.len())
        .map(|i| Slopes {
            l2_velocity: pairwise_order(h[i - 1], l2u[i - 1], h[i], l2u[i]),
            dg_velocity: pairwise_order(h[i - 1], dgu[i - 1], h[i], dgu[i]),
            l2_pressure: pairwise_order(h[i - 1], l2p[i - 1], h[i], l2p[i]),
        })
        .collect();
    Ok(ConvergenceStudy { k: pair.k, k_p: pair.k_p, reports, slopes, pairwise })
}

/// Monitors μ_min of a pair over a mesh sequence (ordered strictly coarse →
/// fine, at least three meshes). A degenerate pencil on any mesh yields a
/// FAIL verdict with diagnostics rather than an error; other solver failures
/// propagate.
pub fn infsup_study(
    pair: SpacePair,
    meshes: &[PolygonalMesh],
    parallel: bool,
) -> crate::Result<InfSupReport> {
    require_refining(meshes, 3)?;
    let zero = |_: Point2<f64>| Vector2::<f64>::zeros();
    let outcomes = run_meshes(meshes, parallel, |mesh| {
        let basis = build_basis(mesh, build_patches(mesh, pair.target_u), pair.k)?;
        let pressure = PressureSpace::build(mesh, &pair)?;
        let system =
            StokesSystem::assemble(mesh, &basis, &pressure, &DGConfig::for_degree(pair.k), &zero, &zero);
        match infsup_mu_min(&system) {
            Ok(mu) => Ok((mesh.h(), Ok(mu))),
            Err(e @ SolverError::DegeneratePair { .. }) => Ok((mesh.h(), Err(e.to_string()))),
            Err(e) => Err(Error::Solver(e)),
        }
    })?;

    let mut samples = Vec::with_capacity(outcomes.len());
    let mut diagnostic = None;
    for (h, outcome) in outcomes {
        match outcome {
            Ok(mu) => samples.push(InfSupSample { h, mu_min: mu }),
            Err(msg) => {
                samples.push(InfSupSample { h, mu_min: 0.0 });
                diagnostic.get_or_insert(format!("h = {h:.4e}: {msg}"));
            }
        }
    }
    let ratios_ok = samples.windows(2).all(|w| w[1].mu_min / w[0].mu_min >= 0.8);
    let final_ok = samples.last().is_some_and(|s| s.mu_min >= 0.01);
    let passed = diagnostic.is_none() && ratios_ok && final_ok;
    Ok(InfSupReport { k: pair.k, k_p: pair.k_p, samples, passed, diagnostic })
}

/// Runs the singular corner-flow benchmark on the structured L-mesh and its
/// red refinements (`levels` of them), reporting the velocity L² error per
/// level with observed orders.
pub fn lshape_study(pair: SpacePair, levels: usize, parallel: bool) -> crate::Result<LShapeStudy> {
    let exact = lshape_solution();
    let mut meshes = vec![generate_lshape_triangular(LSHAPE_BASE_N)?];
    for _ in 0..levels {
        meshes.push(meshes.last().unwrap().refine_red()?);
    }
    let reports = run_meshes(&meshes, parallel, |mesh| run_case(mesh, &pair, &exact))?;
    let h: Vec<f64> = reports.iter().map(|r| r.h).collect();
    let errors: Vec<f64> = reports.iter().map(|r| r.l2_velocity).collect();
    let rows = reports
        .iter()
        .enumerate()
        .map(|(i, r)| LShapeRow {
            dofs: r.dofs,
            l2_velocity: r.l2_velocity,
            order: (i > 0).then(|| pairwise_order(h[i - 1], errors[i - 1], h[i], errors[i])),
        })
        .collect();
    let slope = log_log_slope(&h, &errors);
    Ok(LShapeStudy { k: pair.k, k_p: pair.k_p, rows, slope, reports })
}

/// Validates that a study sequence has at least `min` meshes, strictly
/// refining (h strictly decreasing).
fn require_refining(meshes: &[PolygonalMesh], min: usize) -> crate::Result<()> {
    if meshes.len() < min {
        return Err(Error::Config(format!(
            "study needs at least {min} meshes, got {}",
            meshes.len()
        )));
    }
    for w in meshes.windows(2) {
        if w[1].h() >= w[0].h() {
            return Err(Error::Config(format!(
                "mesh sequence must refine strictly (h = {:.4e} followed by {:.4e})",
                w[0].h(),
                w[1].h()
            )));
        }
    }
    Ok(())
}

/// Maps `f` over the meshes, sequentially or on a small thread pool, and
/// returns the results in mesh order. Failures carry the mesh index.
fn run_meshes<T, F>(meshes: &[PolygonalMesh], parallel: bool, f: F) -> crate::Result<Vec<T>>
where
    T: Send,
    F: Fn(&PolygonalMesh) -> crate::Result<T> + Sync,
{
    let identify = |i: usize, e: Error| {
        Error::Study(
            format!("mesh {} of {} (h = {:.4e})", i + 1, meshes.len(), meshes[i].h()),
            Box::new(e),
        )
    };
    if !parallel || meshes.len() <= 1 {
        return meshes
            .iter()
            .enumerate()
            .map(|(i, m)| f(m).map_err(|e| identify(i, e)))
            .collect();
    }
    let threads = thread_count().min(meshes.len());
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<crate::Result<T>>>> =
        meshes.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= meshes.len() {
                    break;
                }
                let result = f(&meshes[i]);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .enumerate()
        .map(|(i, slot)| {
            slot.into_inner()
                .unwrap()
                .expect("every index was claimed by a worker")
                .map_err(|e| identify(i, e))
        })
        .collect()
}

/// Worker count: `PATCHFEM_THREADS` if set (≥ 1), else the machine's
/// available parallelism.
fn thread_count() -> usize {
    std::env::var("PATCHFEM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::smooth_solution;
    use crate::mesh::generate_structured_triangular;

    fn square_meshes(sizes: &[usize]) -> Vec<PolygonalMesh> {
        sizes.iter().map(|&n| generate_structured_triangular(n).unwrap()).collect()
    }

    #[test]
    fn slope_of_errors_proportional_to_h_squared_is_two() {
        let h = [0.5, 0.25, 0.125, 0.0625];
        let e: Vec<f64> = h.iter().map(|&x: &f64| 3.7 * x * x).collect();
        assert!((log_log_slope(&h, &e) - 2.0).abs() <= 1e-12);
        assert!((pairwise_order(h[0], e[0], h[1], e[1]) - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn smooth_errors_decrease_monotonically_under_refinement() {
        let exact = smooth_solution();
        let pair = SpacePair::new(1, 0).unwrap();
        let study =
            convergence_study(&exact, pair, &square_meshes(&[4, 8, 16]), false).unwrap();
        assert_eq!(study.reports.len(), 3);
        for w in study.reports.windows(2) {
            assert!(w[1].h < w[0].h);
            assert!(w[1].l2_velocity < w[0].l2_velocity);
            assert!(w[1].dg_velocity < w[0].dg_velocity);
            assert!(w[1].l2_pressure < w[0].l2_pressure);
        }
        // Loose sanity bands; the tight rate checks run on finer sequences.
        assert!(study.slopes.l2_velocity > 1.0);
        assert!(study.slopes.dg_velocity > 0.4);
        assert!(study.slopes.l2_pressure > 0.3);
        assert_eq!(study.pairwise.len(), 2);
        assert!(study.pairwise.iter().all(|s| s.l2_velocity.is_finite()));
    }

    #[test]
    fn parallel_and_sequential_studies_agree_exactly() {
        let exact = smooth_solution();
        let pair = SpacePair::new(1, 1).unwrap();
        let meshes = square_meshes(&[3, 6, 12]);
        let a = convergence_study(&exact, pair, &meshes, false).unwrap();
        let b = convergence_study(&exact, pair, &meshes, true).unwrap();
        for (x, y) in a.reports.iter().zip(&b.reports) {
            assert_eq!(x.l2_velocity, y.l2_velocity);
            assert_eq!(x.dg_velocity, y.dg_velocity);
            assert_eq!(x.l2_pressure, y.l2_pressure);
        }
        assert_eq!(a.slopes.l2_velocity, b.slopes.l2_velocity);
    }

    #[test]
    fn study_inputs_are_validated() {
        let exact = smooth_solution();
        let pair = SpacePair::new(1, 0).unwrap();
        let too_few = square_meshes(&[4, 8]);
        assert!(matches!(
            convergence_study(&exact, pair, &too_few, false),
            Err(Error::Config(_))
        ));
        let unordered = square_meshes(&[8, 4, 16]);
        assert!(matches!(
            convergence_study(&exact, pair, &unordered, false),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn infsup_study_reports_a_coherent_verdict() {
        let report =
            infsup_study(SpacePair::new(1, 0).unwrap(), &square_meshes(&[4, 8, 16]), false)
                .unwrap();
        assert_eq!(report.samples.len(), 3);
        assert!(report.samples.windows(2).all(|w| w[1].h < w[0].h));
        assert!(report.samples.iter().all(|s| s.mu_min > 0.0));
        assert!(report.diagnostic.is_none());
        let ratios = report.ratios();
        assert_eq!(ratios.len(), 2);
        let expected = ratios.iter().all(|&r| r >= 0.8)
            && report.samples.last().unwrap().mu_min >= 0.01;
        assert_eq!(report.passed, expected);
    }

    #[test]
    fn lshape_study_converges_on_the_first_refinement() {
        let study = lshape_study(SpacePair::new(1, 0).unwrap(), 1, false).unwrap();
        assert_eq!(study.rows.len(), 2);
        assert_eq!(study.rows[0].dofs, 216);
        assert_eq!(study.rows[1].dofs, 864);
        assert!(study.rows[0].order.is_none());
        assert!(study.rows[1].order.is_some());
        assert!(study.rows[1].l2_velocity < study.rows[0].l2_velocity);
        assert!(study.slope > 0.0);
    }
}
