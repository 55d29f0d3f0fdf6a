//! Assembly of the mixed interior-penalty DG system: stiffness A, divergence
//! coupling B, load vectors F and G, and the norm matrices S (DG energy) and
//! T (pressure L²) used by the inf-sup test.
//!
//! Velocity DOFs are blocked by component: dof(c, K) = c·n_cells + K with
//! c ∈ {0, 1}. The vector-valued forms decouple per component (the full
//! jumps satisfy ‖[[v⊗n]]‖²_F = Σ_c ‖[[v_c]]‖² and {∇u}:[[v⊗n]] =
//! Σ_c {∇u_c}·[[v_c]]), so A and S are assembled once as scalar matrices and
//! scattered into both diagonal blocks, while B couples the pressure to both
//! components through the divergence and the normal jump.
//!
//! Every edge sum runs over ALL edges, boundary included, with one-sided
//! jump/average conventions there; consequently a globally constant velocity
//! is *not* in the kernel of A or S (the boundary penalty sees it), and the
//! single null mode of the inf-sup pencil is the constant pressure.

use crate::error::SolverError;
use crate::mesh::PolygonalMesh;
use crate::patch::build_patches;
use crate::quadrature::{edge_rule, triangle_rule, MAX_TRIANGLE_DEGREE};
use crate::reconstruction::{build_basis, ReconstructionBasis};
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, Point2, Vector2};

/// A velocity/pressure degree pair (k, k′) with the patch cardinalities
/// #S(K) each space uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpacePair {
    /// Velocity reconstruction degree k ≥ 1.
    pub k: usize,
    /// Pressure degree k′ ≥ 0 (0 = raw piecewise constants).
    pub k_p: usize,
    /// Patch target for the velocity space.
    pub target_u: usize,
    /// Patch target for the pressure space (unused when k′ = 0).
    pub target_p: usize,
}

/// Default patch cardinalities for triangular meshes, by degree.
const TRI_TARGETS: [usize; 5] = [5, 9, 18, 25, 32];
/// Default patch cardinalities for mixed (tri/quad) meshes, by degree.
const MIXED_TARGETS: [usize; 5] = [6, 10, 20, 28, 35];

impl SpacePair {
    /// Pair with the triangular-mesh default targets.
    pub fn new(k: usize, k_p: usize) -> Result<Self, SolverError> {
        Self::with_table(k, k_p, &TRI_TARGETS)
    }

    /// Pair with the mixed-mesh default targets.
    pub fn new_mixed(k: usize, k_p: usize) -> Result<Self, SolverError> {
        Self::with_table(k, k_p, &MIXED_TARGETS)
    }

    /// Picks the target table matching the mesh (mixed if any non-triangle).
    pub fn for_mesh(mesh: &PolygonalMesh, k: usize, k_p: usize) -> Result<Self, SolverError> {
        if mesh.cells().iter().any(|c| c.len() != 3) {
            Self::new_mixed(k, k_p)
        } else {
            Self::new(k, k_p)
        }
    }

    fn with_table(k: usize, k_p: usize, table: &[usize; 5]) -> Result<Self, SolverError> {
        if !(1..=5).contains(&k) || k_p > 5 {
            return Err(SolverError::UnsupportedPair { k, kp: k_p });
        }
        Ok(Self {
            k,
            k_p,
            target_u: table[k - 1],
            target_p: if k_p == 0 { 0 } else { table[k_p - 1] },
        })
    }
}

/// Parameters of the DG forms: the penalty constant μ (η|_e = μ/h_e on every
/// edge) and optional quadrature-exactness overrides.
#[derive(Debug, Clone, Copy)]
pub struct DGConfig {
    /// Penalty constant μ > 0.
    pub mu: f64,
    /// Override for volume-term exactness (default 2k, raised when k′ > k).
    pub volume_exactness: Option<usize>,
    /// Override for edge-term exactness (default 2k+1, raised when k′ > k).
    pub edge_exactness: Option<usize>,
    /// Override for data-term exactness (default 2k+4; the volume part is
    /// capped at the triangle-rule limit).
    pub load_exactness: Option<usize>,
}

impl DGConfig {
    /// The default configuration for velocity degree k: μ = 10k².
    pub fn for_degree(k: usize) -> Self {
        Self {
            mu: 10.0 * (k * k) as f64,
            volume_exactness: None,
            edge_exactness: None,
            load_exactness: None,
        }
    }
}

/// The discrete pressure space: raw piecewise constants for k′ = 0, a
/// reconstructed space otherwise.
#[derive(Debug, Clone)]
pub enum PressureSpace {
    /// Indicator functions of the cells.
    Constant { ids: Vec<usize> },
    /// Reconstructed space of degree k′ ≥ 1.
    Reconstructed(ReconstructionBasis),
}

impl PressureSpace {
    /// Builds the pressure space of a pair on a mesh.
    pub fn build(mesh: &PolygonalMesh, pair: &SpacePair) -> crate::Result<Self> {
        if pair.k_p == 0 {
            Ok(Self::Constant { ids: (0..mesh.n_cells()).collect() })
        } else {
            let basis = build_basis(mesh, build_patches(mesh, pair.target_p), pair.k_p)?;
            Ok(Self::Reconstructed(basis))
        }
    }

    /// Polynomial degree of the space.
    pub fn degree(&self) -> usize {
        match self {
            Self::Constant { .. } => 0,
            Self::Reconstructed(b) => b.degree(),
        }
    }

    /// Number of pressure DOFs (= number of cells).
    pub fn n_dofs(&self) -> usize {
        match self {
            Self::Constant { ids } => ids.len(),
            Self::Reconstructed(b) => b.n_cells(),
        }
    }

    /// DOFs of the basis functions not identically zero on cell `k`.
    pub fn active(&self, k: usize) -> &[usize] {
        match self {
            Self::Constant { ids } => &ids[k..=k],
            Self::Reconstructed(b) => b.members(k),
        }
    }

    /// Values at `x` of the active functions of cell `k`
    /// (`out.len() == self.active(k).len()`).
    pub fn eval(&self, k: usize, x: Point2<f64>, out: &mut [f64]) {
        match self {
            Self::Constant { .. } => out[0] = 1.0,
            Self::Reconstructed(b) => b.eval_values_unchecked(k, x, out),
        }
    }

    /// Evaluates the pressure field with DOF vector `coeffs` on cell `k`.
    pub fn eval_field(&self, coeffs: &[f64], k: usize, x: Point2<f64>) -> f64 {
        match self {
            Self::Constant { .. } => coeffs[k],
            Self::Reconstructed(b) => {
                let members = b.members(k);
                let mut vals = vec![0.0; members.len()];
                b.eval_values_unchecked(k, x, &mut vals);
                members.iter().zip(&vals).map(|(&j, v)| coeffs[j] * v).sum()
            }
        }
    }
}

/// The assembled Stokes saddle-point system together with the norm matrices.
#[derive(Debug)]
pub struct StokesSystem {
    /// Velocity stiffness (2n × 2n), symmetric.
    pub a: SparseColMat<usize, f64>,
    /// Divergence coupling (n_p × 2n): (B U)_q = b(u_h, χ_q).
    pub b: SparseColMat<usize, f64>,
    /// Velocity load, l(λ-basis).
    pub f: Vec<f64>,
    /// Pressure load, (χ_q, n·g)_∂Ω.
    pub g: Vec<f64>,
    /// DG-norm Gram matrix on the velocity space (2n × 2n), SPD.
    pub s: SparseColMat<usize, f64>,
    /// L²-norm Gram matrix on the pressure space (n_p × n_p), SPD.
    pub t: SparseColMat<usize, f64>,
    /// ∫_Ω χ_q per pressure DOF (the zero-mean constraint weights).
    pub pressure_integrals: Vec<f64>,
    /// Number of velocity DOFs (2 · n_cells).
    pub n_velocity: usize,
    /// Number of pressure DOFs (n_cells).
    pub n_pressure: usize,
    /// Penalty constant used in A.
    pub mu: f64,
}

/// Velocity DOF index of component `c` on cell `k`.
pub fn u_dof(c: usize, k: usize, n_cells: usize) -> usize {
    c * n_cells + k
}

/// y = M x for a sparse matrix and a dense vector.
pub fn sp_matvec(m: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(m.ncols(), x.len());
    let mut y = vec![0.0; m.nrows()];
    for t in m.triplet_iter() {
        y[t.row] += *t.val * x[t.col];
    }
    y
}

/// y = Mᵀ x for a sparse matrix and a dense vector.
pub fn sp_matvec_transpose(m: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    assert_eq!(m.nrows(), x.len());
    let mut y = vec![0.0; m.ncols()];
    for t in m.triplet_iter() {
        y[t.col] += *t.val * x[t.row];
    }
    y
}

pub(crate) fn to_sparse(
    nrows: usize,
    ncols: usize,
    trips: &[(usize, usize, f64)],
) -> SparseColMat<usize, f64> {
    let trips: Vec<Triplet<usize, usize, f64>> =
        trips.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    SparseColMat::try_new_from_triplets(nrows, ncols, &trips).expect("valid triplets")
}

impl StokesSystem {
    /// Assembles all matrices and loads of the pair on a mesh.
    pub fn assemble<Ff, Fg>(
        mesh: &PolygonalMesh,
        basis_u: &ReconstructionBasis,
        pressure: &PressureSpace,
        config: &DGConfig,
        f: &Ff,
        g: &Fg,
    ) -> Self
    where
        Ff: Fn(Point2<f64>) -> Vector2<f64> + ?Sized,
        Fg: Fn(Point2<f64>) -> Vector2<f64> + ?Sized,
    {
        let n = mesh.n_cells();
        let a = assemble_a(mesh, basis_u, config);
        let b = assemble_b(mesh, basis_u, pressure, config);
        let (s, t) = assemble_norm_matrices(mesh, basis_u, pressure, config);
        let (fv, gv) = assemble_loads(mesh, basis_u, pressure, f, g, config);
        let pressure_integrals = pressure_basis_integrals(mesh, pressure);
        Self {
            a,
            b,
            f: fv,
            g: gv,
            s,
            t,
            pressure_integrals,
            n_velocity: 2 * n,
            n_pressure: pressure.n_dofs(),
            mu: config.mu,
        }
    }
}

/// ∫_Ω χ_q for every pressure basis function.
pub fn pressure_basis_integrals(mesh: &PolygonalMesh, pressure: &PressureSpace) -> Vec<f64> {
    let mut w = vec![0.0; pressure.n_dofs()];
    let rule = triangle_rule(pressure.degree().min(MAX_TRIANGLE_DEGREE)).expect("clamped");
    let mut vals = Vec::new();
    for k in 0..mesh.n_cells() {
        let active = pressure.active(k);
        vals.resize(active.len(), 0.0);
        for tri in mesh.subtriangles(k) {
            let jac = (tri[1] - tri[0]).perp(&(tri[2] - tri[0])); // 2·area
            for (p, &wq) in rule.points.iter().zip(&rule.weights) {
                let x = tri[0] + (tri[1] - tri[0]) * p[0] + (tri[2] - tri[0]) * p[1];
                pressure.eval(k, x, &mut vals);
                for (&q, &v) in active.iter().zip(vals.iter()) {
                    w[q] += wq * jac * v;
                }
            }
        }
    }
    w
}

/// Quadrature exactness degrees for the bilinear-form terms: the documented
/// defaults (volume 2k, edge 2k+1), raised to the true polynomial degree of
/// each term so extended pairs (k′ > k) stay exactly integrated.
fn exactness(config: &DGConfig, k: usize, true_volume: usize, true_edge: usize) -> (usize, usize) {
    let vol = config.volume_exactness.unwrap_or(2 * k).max(true_volume);
    let edge = config.edge_exactness.unwrap_or(2 * k + 1).max(true_edge);
    (vol.min(MAX_TRIANGLE_DEGREE), edge)
}

/// Assembles the elliptic form
/// a(u, v) = (∇u, ∇v) − Σ_e [({∇u}, [[v⊗n]]) + ([[u⊗n]], {∇v})] + Σ_e (η [[u⊗n]], [[v⊗n]])
/// with η = μ/h_e, over all edges (boundary edges one-sided).
pub fn assemble_a(
    mesh: &PolygonalMesh,
    basis_u: &ReconstructionBasis,
    config: &DGConfig,
) -> SparseColMat<usize, f64> {
    let k = basis_u.degree();
    let (vol_deg, edge_deg) = exactness(config, k, 2 * k.saturating_sub(1), 2 * k);
    let trips = scalar_dg_form(mesh, basis_u, vol_deg, edge_deg, true, |h_e| config.mu / h_e);
    scatter_diag_blocks(&trips, mesh.n_cells())
}

/// Assembles the DG-norm Gram matrix S (same structure as [`assemble_a`] with
/// the consistency terms dropped and penalty weight 1/h_e) and the pressure
/// mass matrix T.
pub fn assemble_norm_matrices(
    mesh: &PolygonalMesh,
    basis_u: &ReconstructionBasis,
    pressure: &PressureSpace,
    config: &DGConfig,
) -> (SparseColMat<usize, f64>, SparseColMat<usize, f64>) {
    let k = basis_u.degree();
    let kp = pressure.degree();
    let n = mesh.n_cells();
    let (vol_deg, edge_deg) = exactness(config, k, 2 * k.saturating_sub(1), 2 * k);
    let trips = scalar_dg_form(mesh, basis_u, vol_deg, edge_deg, false, |h_e| 1.0 / h_e);
    let s = scatter_diag_blocks(&trips, n);

    // T: pressure mass matrix, volume term only.
    let vol_t = config.volume_exactness.unwrap_or(2 * k).max(2 * kp).min(MAX_TRIANGLE_DEGREE);
    let rule = triangle_rule(vol_t).expect("clamped");
    let mut trips_t: Vec<(usize, usize, f64)> = Vec::new();
    let mut vals = Vec::new();
    for kc in 0..n {
        let active = pressure.active(kc);
        let card = active.len();
        vals.resize(card, 0.0);
        let mut local = DMatrix::<f64>::zeros(card, card);
        for tri in mesh.subtriangles(kc) {
            let jac = (tri[1] - tri[0]).perp(&(tri[2] - tri[0]));
            for (p, &wq) in rule.points.iter().zip(&rule.weights) {
                let x = tri[0] + (tri[1] - tri[0]) * p[0] + (tri[2] - tri[0]) * p[1];
                pressure.eval(kc, x, &mut vals);
                let w = wq * jac;
                for i in 0..card {
                    for j in 0..card {
                        local[(i, j)] += w * vals[i] * vals[j];
                    }
                }
            }
        }
        for i in 0..card {
            for j in 0..card {
                trips_t.push((active[i], active[j], local[(i, j)]));
            }
        }
    }
    let np = pressure.n_dofs();
    (s, to_sparse(np, np, &trips_t))
}

/// Assembles the divergence form
/// b(v, p) = −(p, ∇·v) + Σ_e ({p}, [[v]]) with [[v]] the scalar normal jump
/// (v·n one-sided at the boundary).
pub fn assemble_b(
    mesh: &PolygonalMesh,
    basis_u: &ReconstructionBasis,
    pressure: &PressureSpace,
    config: &DGConfig,
) -> SparseColMat<usize, f64> {
    let n = mesh.n_cells();
    let np = pressure.n_dofs();
    let k = basis_u.degree();
    let kp = pressure.degree();
    let (vol_deg, edge_deg) = exactness(config, k, k.saturating_sub(1) + kp, k + kp);
    let mut trips: Vec<(usize, usize, f64)> = Vec::new();

    // Volume: −∫_K p ∂v_c/∂x_c.
    let rule = triangle_rule(vol_deg).expect("clamped");
    let mut pvals = Vec::new();
    let mut uvals = Vec::new();
    let mut ugrads: Vec<Vector2<f64>> = Vec::new();
    for kc in 0..n {
        let pact = pressure.active(kc);
        let umem = basis_u.members(kc);
        pvals.resize(pact.len(), 0.0);
        uvals.resize(umem.len(), 0.0);
        ugrads.resize(umem.len(), Vector2::zeros());
        let mut local = DMatrix::<f64>::zeros(pact.len(), 2 * umem.len());
        for tri in mesh.subtriangles(kc) {
            let jac = (tri[1] - tri[0]).perp(&(tri[2] - tri[0]));
            for (p, &wq) in rule.points.iter().zip(&rule.weights) {
                let x = tri[0] + (tri[1] - tri[0]) * p[0] + (tri[2] - tri[0]) * p[1];
                pressure.eval(kc, x, &mut pvals);
                basis_u.eval_unchecked(kc, x, &mut uvals, &mut ugrads);
                let w = wq * jac;
                for (i, pv) in pvals.iter().enumerate() {
                    for (j, gu) in ugrads.iter().enumerate() {
                        local[(i, 2 * j)] -= w * pv * gu.x;
                        local[(i, 2 * j + 1)] -= w * pv * gu.y;
                    }
                }
            }
        }
        for (i, &q) in pact.iter().enumerate() {
            for (j, &d) in umem.iter().enumerate() {
                trips.push((q, u_dof(0, d, n), local[(i, 2 * j)]));
                trips.push((q, u_dof(1, d, n), local[(i, 2 * j + 1)]));
            }
        }
    }

    // Interior edges: + ∫_e {p} [[v]] with [[v]] = (v_L − v_R)·n_L.
    let erule = edge_rule(edge_deg);
    for e in mesh.interior_edges() {
        let (pa, pb) = mesh.edge_points(e.vertices);
        let punion = union_of(pressure.active(e.left), pressure.active(e.right));
        let uunion = union_of(basis_u.members(e.left), basis_u.members(e.right));
        let mut local = DMatrix::<f64>::zeros(punion.len(), 2 * uunion.len());
        let mut plv = vec![0.0; pressure.active(e.left).len()];
        let mut prv = vec![0.0; pressure.active(e.right).len()];
        let mut ulv = vec![0.0; basis_u.members(e.left).len()];
        let mut urv = vec![0.0; basis_u.members(e.right).len()];
        let mut ulg = vec![Vector2::zeros(); ulv.len()];
        let mut urg = vec![Vector2::zeros(); urv.len()];
        for (t, &wq) in erule.points.iter().zip(&erule.weights) {
            let x = pa + (pb - pa) * t[0];
            pressure.eval(e.left, x, &mut plv);
            pressure.eval(e.right, x, &mut prv);
            basis_u.eval_unchecked(e.left, x, &mut ulv, &mut ulg);
            basis_u.eval_unchecked(e.right, x, &mut urv, &mut urg);
            let w = wq * e.length;
            for (i, &(_, pl, pr)) in punion.iter().enumerate() {
                let avg = 0.5 * (side(pl, &plv) + side(pr, &prv));
                for (j, &(_, ul, ur)) in uunion.iter().enumerate() {
                    let jump = side(ul, &ulv) - side(ur, &urv);
                    local[(i, 2 * j)] += w * avg * jump * e.normal.x;
                    local[(i, 2 * j + 1)] += w * avg * jump * e.normal.y;
                }
            }
        }
        scatter_b(&mut trips, &punion, &uunion, &local, n);
    }

    // Boundary edges: {p} = p, [[v]] = v·n.
    for e in mesh.boundary_edges() {
        let (pa, pb) = mesh.edge_points(e.vertices);
        let pact = pressure.active(e.owner);
        let umem = basis_u.members(e.owner);
        let mut local = DMatrix::<f64>::zeros(pact.len(), 2 * umem.len());
        let mut pv = vec![0.0; pact.len()];
        let mut uv = vec![0.0; umem.len()];
        let mut ug = vec![Vector2::zeros(); umem.len()];
        for (t, &wq) in erule.points.iter().zip(&erule.weights) {
            let x = pa + (pb - pa) * t[0];
            pressure.eval(e.owner, x, &mut pv);
            basis_u.eval_unchecked(e.owner, x, &mut uv, &mut ug);
            let w = wq * e.length;
            for (i, &p) in pv.iter().enumerate() {
                for (j, &v) in uv.iter().enumerate() {
                    local[(i, 2 * j)] += w * p * v * e.normal.x;
                    local[(i, 2 * j + 1)] += w * p * v * e.normal.y;
                }
            }
        }
        let punion: Vec<(usize, Option<usize>, Option<usize>)> =
            pact.iter().enumerate().map(|(i, &q)| (q, Some(i), None)).collect();
        let uunion: Vec<(usize, Option<usize>, Option<usize>)> =
            umem.iter().enumerate().map(|(j, &d)| (d, Some(j), None)).collect();
        scatter_b(&mut trips, &punion, &uunion, &local, n);
    }

    to_sparse(np, 2 * n, &trips)
}

/// Assembles the load vectors:
/// F_i = (f, λ_i) − Σ_{e⊂∂Ω} (g, ∇λ_i·n)_e + Σ_{e⊂∂Ω} (η g, λ_i)_e (per component),
/// G_q = (χ_q, n·g)_∂Ω.
///
/// When the boundary datum violates the compatibility condition
/// ∫_∂Ω g·n = 0 beyond 1e-8, a warning is printed (the continuous problem is
/// then ill-posed and the discrete one solvable only in a least-squares
/// sense).
pub fn assemble_loads<Ff, Fg>(
    mesh: &PolygonalMesh,
    basis_u: &ReconstructionBasis,
    pressure: &PressureSpace,
    f: &Ff,
    g: &Fg,
    config: &DGConfig,
) -> (Vec<f64>, Vec<f64>)
where
    Ff: Fn(Point2<f64>) -> Vector2<f64> + ?Sized,
    Fg: Fn(Point2<f64>) -> Vector2<f64> + ?Sized,
{
    let n = mesh.n_cells();
    let k = basis_u.degree();
    let deg = config.load_exactness.unwrap_or(2 * k + 4);
    let mut fv = vec![0.0; 2 * n];
    let mut gv = vec![0.0; pressure.n_dofs()];

    let rule = triangle_rule(deg.min(MAX_TRIANGLE_DEGREE)).expect("clamped");
    let mut uvals = Vec::new();
    let mut ugrads: Vec<Vector2<f64>> = Vec::new();
    for kc in 0..n {
        let umem = basis_u.members(kc);
        uvals.resize(umem.len(), 0.0);
        ugrads.resize(umem.len(), Vector2::zeros());
        for tri in mesh.subtriangles(kc) {
            let jac = (tri[1] - tri[0]).perp(&(tri[2] - tri[0]));
            for (p, &wq) in rule.points.iter().zip(&rule.weights) {
                let x = tri[0] + (tri[1] - tri[0]) * p[0] + (tri[2] - tri[0]) * p[1];
                basis_u.eval_unchecked(kc, x, &mut uvals, &mut ugrads);
                let fval = f(x);
                let w = wq * jac;
                for (j, &d) in umem.iter().enumerate() {
                    fv[u_dof(0, d, n)] += w * fval.x * uvals[j];
                    fv[u_dof(1, d, n)] += w * fval.y * uvals[j];
                }
            }
        }
    }

    let erule = edge_rule(deg);
    let mut pvals = Vec::new();
    for e in mesh.boundary_edges() {
        let (pa, pb) = mesh.edge_points(e.vertices);
        let umem = basis_u.members(e.owner);
        let pact = pressure.active(e.owner);
        uvals.resize(umem.len(), 0.0);
        ugrads.resize(umem.len(), Vector2::zeros());
        pvals.resize(pact.len(), 0.0);
        let eta = config.mu / e.length;
        for (t, &wq) in erule.points.iter().zip(&erule.weights) {
            let x = pa + (pb - pa) * t[0];
            basis_u.eval_unchecked(e.owner, x, &mut uvals, &mut ugrads);
            pressure.eval(e.owner, x, &mut pvals);
            let gval = g(x);
            let w = wq * e.length;
            for (j, &d) in umem.iter().enumerate() {
                let dn = ugrads[j].dot(&e.normal);
                fv[u_dof(0, d, n)] += w * (eta * gval.x * uvals[j] - gval.x * dn);
                fv[u_dof(1, d, n)] += w * (eta * gval.y * uvals[j] - gval.y * dn);
            }
            let gn = gval.dot(&e.normal);
            for (i, &q) in pact.iter().enumerate() {
                gv[q] += w * pvals[i] * gn;
            }
        }
    }

    let compat = boundary_compatibility(mesh, g, deg);
    if compat.abs() > 1e-8 {
        eprintln!(
            "warning: boundary datum violates the compatibility condition: ∫ g·n = {compat:.3e}"
        );
    }
    (fv, gv)
}

/// ∫_∂Ω g·n by composite quadrature (the compatibility integral).
pub fn boundary_compatibility<Fg>(mesh: &PolygonalMesh, g: &Fg, exactness: usize) -> f64
where
    Fg: Fn(Point2<f64>) -> Vector2<f64> + ?Sized,
{
    let erule = edge_rule(exactness);
    let mut total = 0.0;
    for e in mesh.boundary_edges() {
        let (pa, pb) = mesh.edge_points(e.vertices);
        for (t, &wq) in erule.points.iter().zip(&erule.weights) {
            let x = pa + (pb - pa) * t[0];
            total += wq * e.length * g(x).dot(&e.normal);
        }
    }
    total
}

/// Scalar interior-penalty form shared by A (consistency on, weight μ/h_e)
/// and S (consistency off, weight 1/h_e):
///
/// Σ_K (∇u, ∇v)_K − [consistency] Σ_e [({∂_n u}, [[v]]) + ([[u]], {∂_n v})]
/// + Σ_e w(h_e) ([[u]], [[v]]).
fn scalar_dg_form(
    mesh: &PolygonalMesh,
    basis: &ReconstructionBasis,
    vol_deg: usize,
    edge_deg: usize,
    consistency: bool,
    weight: impl Fn(f64) -> f64,
) -> Vec<(usize, usize, f64)> {
    let mut trips: Vec<(usize, usize, f64)> = Vec::new();

    // Volume: ∫_K ∇λ_i·∇λ_j.
    let rule = triangle_rule(vol_deg).expect("clamped");
    let mut vals = Vec::new();
    let mut grads: Vec<Vector2<f64>> = Vec::new();
    for kc in 0..mesh.n_cells() {
        let mem = basis.members(kc);
        let card = mem.len();
        vals.resize(card, 0.0);
        grads.resize(card, Vector2::zeros());
        let mut local = DMatrix::<f64>::zeros(card, card);
        for tri in mesh.subtriangles(kc) {
            let jac = (tri[1] - tri[0]).perp(&(tri[2] - tri[0]));
            for (p, &wq) in rule.points.iter().zip(&rule.weights) {
                let x = tri[0] + (tri[1] - tri[0]) * p[0] + (tri[2] - tri[0]) * p[1];
                basis.eval_unchecked(kc, x, &mut vals, &mut grads);
                let w = wq * jac;
                for i in 0..card {
                    for j in i..card {
                        local[(i, j)] += w * grads[i].dot(&grads[j]);
                    }
                }
            }
        }
        scatter_symmetric(&mut trips, mem, &local);
    }

    // Edge terms.
    let erule = edge_rule(edge_deg);
    let mut lv = Vec::new();
    let mut rv = Vec::new();
    let mut lg: Vec<Vector2<f64>> = Vec::new();
    let mut rg: Vec<Vector2<f64>> = Vec::new();
    let mut jumps = Vec::new();
    let mut avgs = Vec::new();
    for e in mesh.interior_edges() {
        let (pa, pb) = mesh.edge_points(e.vertices);
        let union = union_of(basis.members(e.left), basis.members(e.right));
        let m = union.len();
        lv.resize(basis.members(e.left).len(), 0.0);
        lg.resize(lv.len(), Vector2::zeros());
        rv.resize(basis.members(e.right).len(), 0.0);
        rg.resize(rv.len(), Vector2::zeros());
        jumps.resize(m, 0.0);
        avgs.resize(m, 0.0);
        let mut local = DMatrix::<f64>::zeros(m, m);
        let eta = weight(e.length);
        for (t, &wq) in erule.points.iter().zip(&erule.weights) {
            let x = pa + (pb - pa) * t[0];
            basis.eval_unchecked(e.left, x, &mut lv, &mut lg);
            basis.eval_unchecked(e.right, x, &mut rv, &mut rg);
            for (i, &(_, l, r)) in union.iter().enumerate() {
                jumps[i] = side(l, &lv) - side(r, &rv);
                avgs[i] = 0.5 * (side_g(l, &lg) + side_g(r, &rg)).dot(&e.normal);
            }
            let w = wq * e.length;
            for i in 0..m {
                for j in i..m {
                    let mut v = w * eta * jumps[i] * jumps[j];
                    if consistency {
                        v -= w * (avgs[i] * jumps[j] + jumps[i] * avgs[j]);
                    }
                    local[(i, j)] += v;
                }
            }
        }
        let dofs: Vec<usize> = union.iter().map(|&(d, _, _)| d).collect();
        scatter_symmetric(&mut trips, &dofs, &local);
    }
    for e in mesh.boundary_edges() {
        let (pa, pb) = mesh.edge_points(e.vertices);
        let mem = basis.members(e.owner);
        let m = mem.len();
        lv.resize(m, 0.0);
        lg.resize(m, Vector2::zeros());
        let mut local = DMatrix::<f64>::zeros(m, m);
        let eta = weight(e.length);
        for (t, &wq) in erule.points.iter().zip(&erule.weights) {
            let x = pa + (pb - pa) * t[0];
            basis.eval_unchecked(e.owner, x, &mut lv, &mut lg);
            let w = wq * e.length;
            for i in 0..m {
                let (ji, ai) = (lv[i], lg[i].dot(&e.normal));
                for j in i..m {
                    let (jj, aj) = (lv[j], lg[j].dot(&e.normal));
                    let mut v = w * eta * ji * jj;
                    if consistency {
                        v -= w * (ai * jj + ji * aj);
                    }
                    local[(i, j)] += v;
                }
            }
        }
        scatter_symmetric(&mut trips, mem, &local);
    }
    trips
}

fn side(pos: Option<usize>, vals: &[f64]) -> f64 {
    pos.map_or(0.0, |i| vals[i])
}

fn side_g(pos: Option<usize>, grads: &[Vector2<f64>]) -> Vector2<f64> {
    pos.map_or_else(Vector2::zeros, |i| grads[i])
}

/// Merges two member lists into (dof, position-in-left, position-in-right).
fn union_of(left: &[usize], right: &[usize]) -> Vec<(usize, Option<usize>, Option<usize>)> {
    let mut out: Vec<(usize, Option<usize>, Option<usize>)> = left
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, Some(i), right.iter().position(|&r| r == d)))
        .collect();
    for (j, &d) in right.iter().enumerate() {
        if !left.contains(&d) {
            out.push((d, None, Some(j)));
        }
    }
    out
}

/// Scatters an upper-triangular local matrix symmetrically.
fn scatter_symmetric(trips: &mut Vec<(usize, usize, f64)>, dofs: &[usize], local: &DMatrix<f64>) {
    for i in 0..dofs.len() {
        trips.push((dofs[i], dofs[i], local[(i, i)]));
        for j in (i + 1)..dofs.len() {
            trips.push((dofs[i], dofs[j], local[(i, j)]));
            trips.push((dofs[j], dofs[i], local[(i, j)]));
        }
    }
}

/// Scatters a scalar-form triplet list into the two diagonal velocity blocks.
fn scatter_diag_blocks(trips: &[(usize, usize, f64)], n: usize) -> SparseColMat<usize, f64> {
    let mut all = Vec::with_capacity(2 * trips.len());
    for &(r, c, v) in trips {
        all.push((r, c, v));
        all.push((r + n, c + n, v));
    }
    to_sparse(2 * n, 2 * n, &all)
}

/// Scatters a local pressure×(2·velocity) block into global B triplets.
fn scatter_b(
    trips: &mut Vec<(usize, usize, f64)>,
    punion: &[(usize, Option<usize>, Option<usize>)],
    uunion: &[(usize, Option<usize>, Option<usize>)],
    local: &DMatrix<f64>,
    n: usize,
) {
    for (i, &(q, _, _)) in punion.iter().enumerate() {
        for (j, &(d, _, _)) in uunion.iter().enumerate() {
            trips.push((q, u_dof(0, d, n), local[(i, 2 * j)]));
            trips.push((q, u_dof(1, d, n), local[(i, 2 * j + 1)]));
        }
    }
}
