//! Element patches: the set S(K) of cells whose barycenter values feed the
//! least-squares reconstruction on cell K.
//!
//! Patches grow breadth-first over edge neighbors (one layer at a time) until
//! a target cardinality is reached; the final layer is trimmed to hit the
//! target exactly, preferring cells closest to the owner's barycenter. The
//! collocation points I_K are the barycenters of the member cells.

use crate::mesh::PolygonalMesh;
use crate::reconstruction::PolynomialSpec;
use nalgebra::{DMatrix, Point2};

/// The patch S(K) of one cell, with its collocation set I_K.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementPatch {
    /// The cell this patch reconstructs on.
    pub owner: usize,
    /// Cells forming S(K): the owner first, then BFS layers, each layer
    /// sorted by (distance to the owner barycenter, cell index).
    pub members: Vec<usize>,
    /// Barycenters of `members` (the collocation points I_K), same order.
    pub collocation_points: Vec<Point2<f64>>,
    /// Owner barycenter x_K (the center of the scaled monomial basis).
    pub center: Point2<f64>,
    /// Owner diameter h_K (the scale of the monomial basis).
    pub scale: f64,
}

impl ElementPatch {
    /// #S(K).
    pub fn cardinality(&self) -> usize {
        self.members.len()
    }
}

/// Unisolvence diagnostic of a patch at a given degree: `ok` when the
/// collocation matrix has full column rank (σ_min > 1e-10 σ_max), and the
/// singular-value ratio as `condition`.
#[derive(Debug, Clone, Copy)]
pub struct UnisolvenceReport {
    pub ok: bool,
    pub condition: f64,
}

/// Builds the patch of every cell with the given target cardinality.
///
/// Each patch starts from its owner and repeatedly adds the full layer of
/// edge neighbors; the layer that would overshoot is trimmed, keeping the
/// cells with smallest barycenter distance to x_K (ties: smaller cell
/// index), so the cardinality is exactly `target` — unless the whole mesh
/// is smaller, in which case the patch is the whole mesh.
pub fn build_patches(mesh: &PolygonalMesh, target: usize) -> Vec<ElementPatch> {
    assert!(target >= 1, "patch target cardinality must be positive");
    (0..mesh.n_cells()).map(|k| build_patch_for_cell(mesh, k, target)).collect()
}

/// Builds the patch of a single cell (see [`build_patches`]).
pub fn build_patch_for_cell(mesh: &PolygonalMesh, owner: usize, target: usize) -> ElementPatch {
    let center = mesh.barycenter(owner);
    let mut in_patch = vec![false; mesh.n_cells()];
    in_patch[owner] = true;
    let mut members = vec![owner];
    let mut frontier = vec![owner];
    while members.len() < target {
        let mut layer: Vec<usize> = frontier
            .iter()
            .flat_map(|&k| mesh.edge_neighbors(k).iter().copied())
            .filter(|&k| !in_patch[k])
            .collect();
        layer.sort_unstable();
        layer.dedup();
        if layer.is_empty() {
            break; // whole mesh exhausted
        }
        layer.sort_by(|&a, &b| {
            let da = (mesh.barycenter(a) - center).norm_squared();
            let db = (mesh.barycenter(b) - center).norm_squared();
            da.partial_cmp(&db).unwrap().then(a.cmp(&b))
        });
        let needed = target - members.len();
        frontier = layer.iter().copied().take(needed).collect();
        for &k in &frontier {
            in_patch[k] = true;
        }
        members.extend_from_slice(&frontier);
    }
    let collocation_points = members.iter().map(|&k| mesh.barycenter(k)).collect();
    ElementPatch { owner, members, collocation_points, center, scale: mesh.diameter(owner) }
}

/// The collocation matrix of a patch: row i holds the scaled monomials of
/// degree ≤ m evaluated at collocation point i.
pub fn collocation_matrix(patch: &ElementPatch, degree: usize) -> DMatrix<f64> {
    let spec = PolynomialSpec::new(degree, patch.center, patch.scale);
    let mut a = DMatrix::zeros(patch.cardinality(), spec.dimension());
    let mut row = vec![0.0; spec.dimension()];
    for (i, &x) in patch.collocation_points.iter().enumerate() {
        spec.eval_monomials(x, &mut row);
        for (j, &v) in row.iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    a
}

/// Checks Assumption-1 unisolvence: whether the least-squares problem of
/// degree `m` on this patch has a unique solution. Failure is data (ok =
/// false), not an error.
pub fn check_unisolvence(patch: &ElementPatch, degree: usize) -> UnisolvenceReport {
    let a = collocation_matrix(patch, degree);
    if a.nrows() < a.ncols() {
        return UnisolvenceReport { ok: false, condition: f64::INFINITY };
    }
    let sv = a.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    UnisolvenceReport { ok: smin > 1e-10 * smax, condition }
}
