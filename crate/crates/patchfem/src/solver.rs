//! Direct solution of the saddle-point system and the numerical inf-sup
//! (LBB) test.
//!
//! The Stokes solve augments the indefinite block system with one scalar
//! multiplier enforcing the zero-mean pressure gauge, then hands the result
//! to a sparse LU factorization. The inf-sup test forms the pressure-side
//! pencil (B S⁺ Bᵀ) q = μ² T q — same nonzero spectrum as the velocity-side
//! statement but of dimension #cells — reduces it with a dense Cholesky of T
//! and reads μ_min off the smallest retained eigenvalue after discarding the
//! constant-pressure null mode.

use crate::assembly::{sp_matvec, sp_matvec_transpose, to_sparse, StokesSystem};
use crate::error::SolverError;
use faer::prelude::*;
use faer::Side;

/// Largest pressure dimension the dense inf-sup reduction accepts.
pub const INFSUP_MAX_PRESSURE_DIM: usize = 5000;

/// Relative residual bound every successful solve must meet.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Result of [`solve_stokes`]: DOF vectors plus the solve diagnostics.
#[derive(Debug, Clone)]
pub struct StokesSolution {
    /// Velocity DOFs (component-blocked, length 2·n_cells).
    pub velocity: Vec<f64>,
    /// Pressure DOFs with the weighted zero-mean gauge Σ_q (∫χ_q) p_q = 0.
    pub pressure: Vec<f64>,
    /// The gauge multiplier ξ (≈ 0 when the boundary datum is compatible).
    pub multiplier: f64,
    /// ‖A U + Bᵀ P − F‖ / ‖F‖ (absolute when F = 0).
    pub residual_momentum: f64,
    /// ‖B U − G‖ / max(‖G‖, 1).
    pub residual_mass: f64,
}

/// Diagnostics of the inf-sup test, see [`infsup_details`].
#[derive(Debug, Clone)]
pub struct InfSupDetails {
    /// The discrete inf-sup constant √(smallest retained eigenvalue).
    pub mu_min: f64,
    /// Pressure dimension of the pencil.
    pub n_pressure: usize,
    /// Eigenvalues classified as null modes (expected: 1, the constant).
    pub n_null: usize,
    /// Tikhonov shift ε used to regularize S.
    pub shift: f64,
    /// √eigenvalue of the first few retained modes (ascending).
    pub smallest: Vec<f64>,
}

/// Solves the augmented saddle-point system
///
/// ```text
/// [ A   Bᵀ  0 ] [U]   [F]
/// [ B   0   w ] [P] = [G]      w_q = ∫_Ω χ_q,
/// [ 0   wᵀ  0 ] [ξ]   [0]
/// ```
///
/// whose last row pins the weighted pressure mean to zero (eliminating the
/// constant-pressure null mode). Verifies the residual postconditions
/// ‖AU + BᵀP − F‖/‖F‖ ≤ 1e-8 and ‖BU − G‖/max(‖G‖,1) ≤ 1e-8.
pub fn solve_stokes(system: &StokesSystem) -> Result<StokesSolution, SolverError> {
    let nv = system.n_velocity;
    let np = system.n_pressure;
    let nt = nv + np + 1;

    let mut trips: Vec<(usize, usize, f64)> = Vec::new();
    for t in system.a.triplet_iter() {
        trips.push((t.row, t.col, *t.val));
    }
    for t in system.b.triplet_iter() {
        trips.push((nv + t.row, t.col, *t.val)); // B
        trips.push((t.col, nv + t.row, *t.val)); // Bᵀ
    }
    for (q, &wq) in system.pressure_integrals.iter().enumerate() {
        trips.push((nv + q, nv + np, wq));
        trips.push((nv + np, nv + q, wq));
    }
    let mat = to_sparse(nt, nt, &trips);

    let lu = mat
        .sp_lu()
        .map_err(|e| SolverError::Factorization(format!("augmented Stokes LU: {e:?}")))?;
    let mut rhs = Mat::<f64>::zeros(nt, 1);
    for (i, &v) in system.f.iter().enumerate() {
        rhs[(i, 0)] = v;
    }
    for (q, &v) in system.g.iter().enumerate() {
        rhs[(nv + q, 0)] = v;
    }
    let sol = lu.solve(&rhs);

    let velocity: Vec<f64> = (0..nv).map(|i| sol[(i, 0)]).collect();
    let pressure: Vec<f64> = (0..np).map(|q| sol[(nv + q, 0)]).collect();
    let multiplier = sol[(nv + np, 0)];

    // Residual postconditions on the undistorted blocks.
    let au = sp_matvec(&system.a, &velocity);
    let btp = sp_matvec_transpose(&system.b, &pressure);
    let r_mom = norm2(
        &(0..nv).map(|i| au[i] + btp[i] - system.f[i]).collect::<Vec<_>>(),
    );
    let f_norm = norm2(&system.f);
    let residual_momentum = if f_norm > 0.0 { r_mom / f_norm } else { r_mom };

    let bu = sp_matvec(&system.b, &velocity);
    let r_mass = norm2(&(0..np).map(|q| bu[q] - system.g[q]).collect::<Vec<_>>());
    let residual_mass = r_mass / norm2(&system.g).max(1.0);

    if residual_momentum > RESIDUAL_TOL || residual_mass > RESIDUAL_TOL {
        return Err(SolverError::Residual(residual_momentum.max(residual_mass)));
    }

    Ok(StokesSolution { velocity, pressure, multiplier, residual_momentum, residual_mass })
}

/// The discrete inf-sup constant μ_min of the pair underlying `system`.
///
/// Forms M = B (S + εI)⁻¹ Bᵀ with ε = 1e-10·‖S‖_max, reduces the pencil
/// (M, T) by a dense Cholesky of T, and discards eigenvalues below
/// 1e-8·λ_max as null modes (the constant pressure). Errors when every
/// eigenvalue is null (total inf-sup failure) or the pressure dimension
/// exceeds [`INFSUP_MAX_PRESSURE_DIM`].
pub fn infsup_mu_min(system: &StokesSystem) -> Result<f64, SolverError> {
    Ok(infsup_details(system)?.mu_min)
}

/// As [`infsup_mu_min`], returning the full diagnostics.
pub fn infsup_details(system: &StokesSystem) -> Result<InfSupDetails, SolverError> {
    let (m, shift) = pressure_pencil(system)?;
    let t = system.t.to_dense();
    let eigs = generalized_eigenvalues(m, t)?;

    let n_pressure = eigs.len();
    let lambda_max = *eigs.last().expect("pencil is nonempty");
    if !(lambda_max > 0.0) {
        return Err(SolverError::DegeneratePair { n: n_pressure });
    }
    let threshold = 1e-8 * lambda_max;
    let n_null = eigs.iter().take_while(|&&e| e < threshold).count();
    if n_null == n_pressure {
        return Err(SolverError::DegeneratePair { n: n_null });
    }
    let retained = &eigs[n_null..];
    Ok(InfSupDetails {
        mu_min: retained[0].max(0.0).sqrt(),
        n_pressure,
        n_null,
        shift,
        smallest: retained.iter().take(8).map(|&e| e.max(0.0).sqrt()).collect(),
    })
}

/// M = B (S + εI)⁻¹ Bᵀ as a dense symmetric matrix, plus the shift ε.
fn pressure_pencil(system: &StokesSystem) -> Result<(Mat<f64>, f64), SolverError> {
    let np = system.n_pressure;
    if np > INFSUP_MAX_PRESSURE_DIM {
        return Err(SolverError::TooLarge { n: np, cap: INFSUP_MAX_PRESSURE_DIM });
    }
    let nv = system.n_velocity;

    let s_norm = system
        .s
        .triplet_iter()
        .fold(0.0f64, |acc, t| acc.max(t.val.abs()));
    let shift = 1e-10 * s_norm;
    let mut trips: Vec<(usize, usize, f64)> =
        system.s.triplet_iter().map(|t| (t.row, t.col, *t.val)).collect();
    for i in 0..nv {
        trips.push((i, i, shift));
    }
    let s_reg = to_sparse(nv, nv, &trips);
    let chol = s_reg
        .sp_cholesky(Side::Lower)
        .map_err(|e| SolverError::Factorization(format!("regularized S Cholesky: {e:?}")))?;

    // M = B X with X = (S+εI)⁻¹ Bᵀ, built in column blocks.
    let mut m = Mat::<f64>::zeros(np, np);
    const BLOCK: usize = 512;
    let mut start = 0;
    while start < np {
        let cols = BLOCK.min(np - start);
        let mut rhs = Mat::<f64>::zeros(nv, cols);
        for t in system.b.triplet_iter() {
            if (start..start + cols).contains(&t.row) {
                rhs[(t.col, t.row - start)] += *t.val;
            }
        }
        let x = chol.solve(&rhs);
        for t in system.b.triplet_iter() {
            for j in 0..cols {
                m[(t.row, start + j)] += *t.val * x[(t.col, j)];
            }
        }
        start += cols;
    }
    // Symmetrize (exact symmetry up to rounding).
    for i in 0..np {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok((m, shift))
}

/// Eigenvalues (ascending) of the symmetric pencil (M, T) via T = LLᵀ and
/// W = L⁻¹ M L⁻ᵀ.
fn generalized_eigenvalues(m: Mat<f64>, t: Mat<f64>) -> Result<Vec<f64>, SolverError> {
    let llt = t
        .llt(Side::Lower)
        .map_err(|e| SolverError::Factorization(format!("pressure mass Cholesky: {e:?}")))?;
    let l = llt.L();

    let mut x = m; // X := L⁻¹ M
    l.solve_lower_triangular_in_place(x.as_mut());
    let mut y = x.transpose().to_owned(); // Y := L⁻¹ Mᵀ L⁻ᵀ = Wᵀ = W
    l.solve_lower_triangular_in_place(y.as_mut());
    let n = y.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (y[(i, j)] + y[(j, i)]);
            y[(i, j)] = v;
            y[(j, i)] = v;
        }
    }
    y.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| SolverError::Factorization(format!("pencil eigensolve: {e:?}")))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
