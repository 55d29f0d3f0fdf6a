//! The patch reconstruction operator R^m: per cell, the least-squares map
//! from nodal (barycenter) values on S(K) to a polynomial of degree ≤ m, and
//! the basis functions λ_J it induces.
//!
//! Writing A for the collocation matrix (scaled monomials evaluated at I_K),
//! the coefficient matrix of cell K is the pseudoinverse C_K = A⁺, computed
//! by singular-value decomposition rather than normal equations. On cell K
//! the nonzero basis functions are exactly {λ_J : J ∈ S(K)}: the restriction
//! of λ_J to K is the polynomial whose coefficients form the C_K column of
//! member J. Consequently supp λ_J = {K : J ∈ S(K)}, the inverse relation,
//! which is indexed once at construction.

use crate::error::BasisError;
use crate::mesh::PolygonalMesh;
use crate::patch::{build_patch_for_cell, check_unisolvence, collocation_matrix, ElementPatch};
use nalgebra::{DMatrix, DVector, Point2, Vector2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A local polynomial space: degree, dimension, and the affine scaling
/// ((x − center)/scale)^α used for its monomial basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialSpec {
    degree: usize,
    center: Point2<f64>,
    scale: f64,
}

impl PolynomialSpec {
    pub fn new(degree: usize, center: Point2<f64>, scale: f64) -> Self {
        assert!(scale > 0.0, "scale must be positive");
        Self { degree, center, scale }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn center(&self) -> Point2<f64> {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// dim P_m = (m+1)(m+2)/2 in two dimensions.
    pub fn dimension(&self) -> usize {
        dimension_of(self.degree)
    }

    /// Exponent pairs (a, b) of the monomial basis in graded
    /// lexicographic order: 1, x, y, x², xy, y², …
    pub fn exponents(degree: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..=degree).flat_map(move |d| (0..=d).map(move |b| (d - b, b)))
    }

    /// Evaluates all scaled monomials at `x` into `out` (length ≥ dimension).
    pub fn eval_monomials(&self, x: Point2<f64>, out: &mut [f64]) {
        let xi = (x.x - self.center.x) / self.scale;
        let eta = (x.y - self.center.y) / self.scale;
        for (i, (a, b)) in Self::exponents(self.degree).enumerate() {
            out[i] = xi.powi(a as i32) * eta.powi(b as i32);
        }
    }

    /// Evaluates the gradients of all scaled monomials at `x` (chain rule
    /// brings a 1/scale factor).
    pub fn eval_monomial_gradients(&self, x: Point2<f64>, dx: &mut [f64], dy: &mut [f64]) {
        let xi = (x.x - self.center.x) / self.scale;
        let eta = (x.y - self.center.y) / self.scale;
        for (i, (a, b)) in Self::exponents(self.degree).enumerate() {
            dx[i] = if a == 0 {
                0.0
            } else {
                a as f64 / self.scale * xi.powi(a as i32 - 1) * eta.powi(b as i32)
            };
            dy[i] = if b == 0 {
                0.0
            } else {
                b as f64 / self.scale * xi.powi(a as i32) * eta.powi(b as i32 - 1)
            };
        }
    }
}

/// dim P_m in 2D.
pub fn dimension_of(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Values and gradients of every basis function active on one cell,
/// parallel to [`ReconstructionBasis::members`] of that cell.
#[derive(Debug, Clone)]
pub struct BasisValues {
    pub values: Vec<f64>,
    pub gradients: Vec<Vector2<f64>>,
}

/// The reconstruction operator of one scalar field: per-cell least-squares
/// coefficient matrices together with the patch bookkeeping.
#[derive(Debug, Clone)]
pub struct ReconstructionBasis {
    degree: usize,
    /// Per cell: the monomial spec (centered at x_K, scaled by h_K).
    specs: Vec<PolynomialSpec>,
    /// Per cell: C_K = A⁺ of shape dimension × cardinality.
    coeffs: Vec<DMatrix<f64>>,
    /// Per cell: the members of S(K), parallel to the columns of C_K.
    members: Vec<Vec<usize>>,
    /// Per basis function J: supp λ_J = {K : J ∈ S(K)}, sorted.
    supports: Vec<Vec<usize>>,
}

impl ReconstructionBasis {
    /// Reconstruction degree m.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of cells (= number of basis functions / DOFs).
    pub fn n_cells(&self) -> usize {
        self.members.len()
    }

    /// The members of S(K): the basis functions active on cell `k`.
    pub fn members(&self, k: usize) -> &[usize] {
        &self.members[k]
    }

    /// The coefficient matrix C_K (dimension × cardinality).
    pub fn coefficients(&self, k: usize) -> &DMatrix<f64> {
        &self.coeffs[k]
    }

    /// The monomial spec of cell `k`.
    pub fn spec(&self, k: usize) -> &PolynomialSpec {
        &self.specs[k]
    }

    /// supp λ_j: the cells on which basis function `j` is nonzero.
    pub fn support(&self, j: usize) -> &[usize] {
        &self.supports[j]
    }

    /// Values and gradients at `x` of all basis functions active on cell
    /// `cell` (order matches [`Self::members`]). Errors when `x` lies
    /// outside the closure of the cell.
    pub fn evaluate_basis(
        &self,
        mesh: &PolygonalMesh,
        cell: usize,
        x: Point2<f64>,
    ) -> Result<BasisValues, BasisError> {
        if !mesh.cell_contains(cell, x) {
            return Err(BasisError::PointOutsideCell { cell, x: x.x, y: x.y });
        }
        let card = self.members[cell].len();
        let mut out =
            BasisValues { values: vec![0.0; card], gradients: vec![Vector2::zeros(); card] };
        self.eval_unchecked(cell, x, &mut out.values, &mut out.gradients);
        Ok(out)
    }

    /// As [`Self::evaluate_basis`], without the containment check and with
    /// caller-provided buffers (for quadrature loops; points on the closure
    /// of the cell are always valid there).
    pub fn eval_unchecked(
        &self,
        cell: usize,
        x: Point2<f64>,
        values: &mut [f64],
        gradients: &mut [Vector2<f64>],
    ) {
        let spec = &self.specs[cell];
        let dim = spec.dimension();
        let mut mono = [0.0; 28]; // dim P_6 = 28 bounds every supported degree
        let mut dx = [0.0; 28];
        let mut dy = [0.0; 28];
        spec.eval_monomials(x, &mut mono[..dim]);
        spec.eval_monomial_gradients(x, &mut dx[..dim], &mut dy[..dim]);
        let c = &self.coeffs[cell];
        for j in 0..c.ncols() {
            let col = c.column(j);
            let mut v = 0.0;
            let mut gx = 0.0;
            let mut gy = 0.0;
            for i in 0..dim {
                let ci = col[i];
                v += ci * mono[i];
                gx += ci * dx[i];
                gy += ci * dy[i];
            }
            values[j] = v;
            gradients[j] = Vector2::new(gx, gy);
        }
    }

    /// As [`Self::eval_unchecked`], values only (skips the gradient work).
    pub fn eval_values_unchecked(&self, cell: usize, x: Point2<f64>, values: &mut [f64]) {
        let spec = &self.specs[cell];
        let dim = spec.dimension();
        let mut mono = [0.0; 28];
        spec.eval_monomials(x, &mut mono[..dim]);
        let c = &self.coeffs[cell];
        for j in 0..c.ncols() {
            let col = c.column(j);
            values[j] = (0..dim).map(|i| col[i] * mono[i]).sum();
        }
    }

    /// Applies the operator to nodal values: returns the piecewise
    /// polynomial field R^m v.
    pub fn reconstruct(&self, nodal_values: &[f64]) -> Result<PiecewiseField, BasisError> {
        if nodal_values.len() != self.n_cells() {
            return Err(BasisError::LengthMismatch {
                got: nodal_values.len(),
                expected: self.n_cells(),
            });
        }
        let coeffs = (0..self.n_cells())
            .map(|k| {
                let local =
                    DVector::from_iterator(self.members[k].len(), self.members[k].iter().map(|&j| nodal_values[j]));
                &self.coeffs[k] * local
            })
            .collect();
        Ok(PiecewiseField { specs: self.specs.clone(), coeffs })
    }
}

/// A piecewise polynomial field: one local polynomial per cell, evaluable
/// from both sides of any edge by choosing the cell.
#[derive(Debug, Clone)]
pub struct PiecewiseField {
    specs: Vec<PolynomialSpec>,
    coeffs: Vec<DVector<f64>>,
}

impl PiecewiseField {
    /// Value of the local polynomial of `cell` at `x` (which may lie on the
    /// cell boundary — this is the trace from that side).
    pub fn eval(&self, cell: usize, x: Point2<f64>) -> f64 {
        let spec = &self.specs[cell];
        let dim = spec.dimension();
        let mut mono = [0.0; 28];
        spec.eval_monomials(x, &mut mono[..dim]);
        (0..dim).map(|i| self.coeffs[cell][i] * mono[i]).sum()
    }

    /// Gradient of the local polynomial of `cell` at `x`.
    pub fn grad(&self, cell: usize, x: Point2<f64>) -> Vector2<f64> {
        let spec = &self.specs[cell];
        let dim = spec.dimension();
        let mut dx = [0.0; 28];
        let mut dy = [0.0; 28];
        spec.eval_monomial_gradients(x, &mut dx[..dim], &mut dy[..dim]);
        let c = &self.coeffs[cell];
        Vector2::new(
            (0..dim).map(|i| c[i] * dx[i]).sum(),
            (0..dim).map(|i| c[i] * dy[i]).sum(),
        )
    }

    /// Evaluates at an arbitrary point by locating the containing cell
    /// (linear scan; returns `None` outside the mesh).
    pub fn eval_anywhere(&self, mesh: &PolygonalMesh, x: Point2<f64>) -> Option<f64> {
        let cell = (0..mesh.n_cells()).find(|&k| mesh.cell_contains(k, x))?;
        Some(self.eval(cell, x))
    }
}

/// Builds the reconstruction basis of degree `m` from prebuilt patches.
///
/// Patches failing the unisolvence check are rebuilt with enlarged targets
/// (target += ⌈target/2⌉, at most 3 times); if a patch still fails, the
/// construction aborts naming the cell.
pub fn build_basis(
    mesh: &PolygonalMesh,
    patches: Vec<ElementPatch>,
    degree: usize,
) -> Result<ReconstructionBasis, BasisError> {
    let n = mesh.n_cells();
    let mut specs = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    let mut members = Vec::with_capacity(n);
    for mut patch in patches {
        let k = patch.owner;
        let mut report = check_unisolvence(&patch, degree);
        let mut retries = 0;
        let mut target = patch.cardinality();
        while !report.ok && retries < 3 {
            target += target.div_ceil(2);
            patch = build_patch_for_cell(mesh, k, target);
            report = check_unisolvence(&patch, degree);
            retries += 1;
        }
        if !report.ok {
            return Err(BasisError::NotUnisolvent {
                cell: k,
                degree,
                condition: report.condition,
                retries,
            });
        }
        let a = collocation_matrix(&patch, degree);
        let c = a
            .pseudo_inverse(0.0)
            .expect("SVD of a full-rank collocation matrix cannot fail");
        specs.push(PolynomialSpec::new(degree, patch.center, patch.scale));
        coeffs.push(c);
        members.push(patch.members);
    }
    let mut supports = vec![Vec::new(); n];
    for (k, mem) in members.iter().enumerate() {
        for &j in mem {
            supports[j].push(k);
        }
    }
    for s in &mut supports {
        s.sort_unstable();
    }
    Ok(ReconstructionBasis { degree, specs, coeffs, members, supports })
}

/// Estimates the stability constant Λ(m, I_K): the largest ratio between a
/// degree-m polynomial's sup over the patch (sampled at all sub-triangle
/// vertices and barycenters of S(K)) and its sup over the collocation points
/// I_K. Sampling maximizes over `samples` seeded random coefficient vectors;
/// the estimate is a lower bound of the true constant, never below 1, and is
/// monotonically non-decreasing in `samples` (candidate prefixes coincide).
pub fn estimate_lambda(
    mesh: &PolygonalMesh,
    patch: &ElementPatch,
    degree: usize,
    samples: usize,
) -> f64 {
    let spec = PolynomialSpec::new(degree, patch.center, patch.scale);
    let dim = spec.dimension();
    let mut sample_points: Vec<Point2<f64>> = Vec::new();
    for &k in &patch.members {
        for tri in mesh.subtriangles(k) {
            sample_points.extend_from_slice(tri);
        }
    }
    sample_points.extend_from_slice(&patch.collocation_points);

    let mut mono = vec![0.0; dim];
    let sup = |coeffs: &[f64], pts: &[Point2<f64>], mono: &mut [f64]| -> f64 {
        pts.iter()
            .map(|&x| {
                spec.eval_monomials(x, mono);
                coeffs.iter().zip(mono.iter()).map(|(c, m)| c * m).sum::<f64>().abs()
            })
            .fold(0.0, f64::max)
    };

    let seed = (patch.owner as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(degree as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 1.0; // the constant polynomial achieves exactly 1
    let mut coeffs = vec![0.0; dim];
    for _ in 0..samples {
        for c in &mut coeffs {
            *c = rng.random_range(-1.0..1.0);
        }
        let over_patch = sup(&coeffs, &sample_points, &mut mono);
        let over_collocation = sup(&coeffs, &patch.collocation_points, &mut mono);
        if over_collocation > 0.0 {
            best = best.max(over_patch / over_collocation);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_quad, generate_structured_triangular, PolygonalMesh};
    use crate::patch::build_patches;
    use approx::assert_relative_eq;

    fn random_point(rng: &mut ChaCha8Rng) -> Point2<f64> {
        Point2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))
    }

    /// A random polynomial of total degree ≤ m as (coeff, a, b) triples.
    fn random_poly(rng: &mut ChaCha8Rng, m: usize) -> Vec<(f64, i32, i32)> {
        PolynomialSpec::exponents(m)
            .map(|(a, b)| (rng.random_range(-1.0..1.0), a as i32, b as i32))
            .collect()
    }

    fn poly_eval(p: &[(f64, i32, i32)], x: Point2<f64>) -> f64 {
        p.iter().map(|&(c, a, b)| c * x.x.powi(a) * x.y.powi(b)).sum()
    }

    #[test]
    fn dimension_and_exponent_order() {
        assert_eq!(dimension_of(0), 1);
        assert_eq!(dimension_of(1), 3);
        assert_eq!(dimension_of(2), 6);
        assert_eq!(dimension_of(3), 10);
        let exps: Vec<_> = PolynomialSpec::exponents(2).collect();
        assert_eq!(exps, vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]);
    }

    #[test]
    fn mean_rule_for_degree_zero() {
        let mesh = generate_structured_triangular(3).unwrap();
        let basis = build_basis(&mesh, build_patches(&mesh, 5), 0).unwrap();
        for k in 0..mesh.n_cells() {
            let c = basis.coefficients(k);
            assert_eq!(c.nrows(), 1);
            for j in 0..c.ncols() {
                assert_relative_eq!(c[(0, j)], 1.0 / c.ncols() as f64, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn worked_example_projector_row() {
        // A degree-1 patch of 4 cells: the basis values at the owner's
        // barycenter must equal the first row of the orthogonal projector
        // P = A(AᵀA)⁻¹Aᵀ built from the raw monomials {1, x, y} at the four
        // collocation points (P is invariant under the basis scaling).
        let mesh = generate_structured_triangular(2).unwrap();
        let k = (0..mesh.n_cells()).find(|&k| mesh.edge_neighbors(k).len() == 3).unwrap();
        let patches = build_patches(&mesh, 4);
        let pts = patches[k].collocation_points.clone();
        let basis = build_basis(&mesh, patches, 1).unwrap();

        let a = DMatrix::from_fn(4, 3, |i, j| match j {
            0 => 1.0,
            1 => pts[i].x,
            _ => pts[i].y,
        });
        let ata = a.transpose() * &a;
        let proj = &a * ata.try_inverse().unwrap() * a.transpose();

        let vals = basis.evaluate_basis(&mesh, k, mesh.barycenter(k)).unwrap();
        assert_eq!(basis.members(k)[0], k);
        for (j, v) in vals.values.iter().enumerate() {
            assert_relative_eq!(*v, proj[(0, j)], epsilon = 1e-12);
        }
        // Least squares is not interpolatory: the own-cell value differs
        // from 1 in general.
        assert!((vals.values[0] - 1.0).abs() > 1e-3);
    }

    #[test]
    fn polynomial_reproduction() {
        let mesh = generate_structured_triangular(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (m, target) in [(0usize, 5usize), (1, 5), (2, 9), (3, 18)] {
            let basis = build_basis(&mesh, build_patches(&mesh, target), m).unwrap();
            for _ in 0..20 {
                let q = random_poly(&mut rng, m);
                let nodal: Vec<f64> =
                    (0..mesh.n_cells()).map(|k| poly_eval(&q, mesh.barycenter(k))).collect();
                let field = basis.reconstruct(&nodal).unwrap();
                for _ in 0..10 {
                    let x = random_point(&mut rng);
                    let k = (0..mesh.n_cells()).find(|&k| mesh.cell_contains(k, x)).unwrap();
                    let exact = poly_eval(&q, x);
                    assert_relative_eq!(field.eval(k, x), exact, epsilon = 1e-9, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn exact_linear_fit_recovers_coefficients() {
        // Nodal values from q(x, y) = 2 + 3x − y reconstruct to exactly q.
        let mesh = generate_structured_triangular(4).unwrap();
        let basis = build_basis(&mesh, build_patches(&mesh, 5), 1).unwrap();
        let nodal: Vec<f64> = (0..mesh.n_cells())
            .map(|k| {
                let b = mesh.barycenter(k);
                2.0 + 3.0 * b.x - b.y
            })
            .collect();
        let field = basis.reconstruct(&nodal).unwrap();
        for k in 0..mesh.n_cells() {
            let x = mesh.barycenter(k);
            assert_relative_eq!(field.eval(k, x), 2.0 + 3.0 * x.x - x.y, epsilon = 1e-11);
            let g = field.grad(k, x);
            assert_relative_eq!(g.x, 3.0, epsilon = 1e-10);
            assert_relative_eq!(g.y, -1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn partition_of_unity_and_zero_gradient_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for mesh in [
            generate_structured_triangular(5).unwrap(),
            generate_structured_quad(5).unwrap(),
        ] {
            let target = if mesh.cells()[0].len() == 3 { 9 } else { 10 };
            let basis = build_basis(&mesh, build_patches(&mesh, target), 2).unwrap();
            for _ in 0..100 {
                let x = random_point(&mut rng);
                let k = (0..mesh.n_cells()).find(|&k| mesh.cell_contains(k, x)).unwrap();
                let vals = basis.evaluate_basis(&mesh, k, x).unwrap();
                let sum: f64 = vals.values.iter().sum();
                let gsum: Vector2<f64> = vals.gradients.iter().sum();
                assert_relative_eq!(sum, 1.0, epsilon = 1e-10);
                assert!(gsum.norm() < 1e-9, "gradient sum {gsum:?} at {x:?}");
            }
        }
    }

    #[test]
    fn support_is_inverse_of_membership() {
        let mesh = generate_structured_triangular(4).unwrap();
        let basis = build_basis(&mesh, build_patches(&mesh, 9), 2).unwrap();
        for k in 0..mesh.n_cells() {
            for &j in basis.members(k) {
                assert!(basis.support(j).contains(&k));
            }
        }
        for j in 0..mesh.n_cells() {
            for &k in basis.support(j) {
                assert!(basis.members(k).contains(&j));
            }
        }
    }

    #[test]
    fn outside_point_is_a_domain_error() {
        let mesh = generate_structured_triangular(2).unwrap();
        let basis = build_basis(&mesh, build_patches(&mesh, 5), 1).unwrap();
        assert!(matches!(
            basis.evaluate_basis(&mesh, 0, Point2::new(10.0, 10.0)),
            Err(BasisError::PointOutsideCell { cell: 0, .. })
        ));
    }

    #[test]
    fn retry_enlarges_patches_until_unisolvent() {
        // Four unit quads in a row: all barycenters collinear, so a target-3
        // patch cannot determine a linear polynomial. One extra cell off the
        // line makes enlarged patches unisolvent.
        let mut vertices = Vec::new();
        for j in 0..=1 {
            for i in 0..=4 {
                vertices.push(Point2::new(i as f64, j as f64));
            }
        }
        vertices.push(Point2::new(0.0, 2.0)); // 10
        vertices.push(Point2::new(1.0, 2.0)); // 11
        let mut cells: Vec<Vec<usize>> =
            (0..4).map(|i| vec![i, i + 1, i + 6, i + 5]).collect();
        cells.push(vec![5, 6, 11, 10]);
        let mesh = PolygonalMesh::from_cells(vertices, cells).unwrap();

        // Patch of the far-end cell with target 3 is collinear; the retry
        // (3 → 5) reaches the off-line cell.
        let patches = build_patches(&mesh, 3);
        assert!(!check_unisolvence(&patches[3], 1).ok);
        let basis = build_basis(&mesh, patches, 1).unwrap();
        assert!(basis.members(3).len() > 3);

        // A strictly collinear mesh keeps failing and reports the cell.
        let mut vertices = Vec::new();
        for j in 0..=1 {
            for i in 0..=4 {
                vertices.push(Point2::new(i as f64, j as f64));
            }
        }
        let cells: Vec<Vec<usize>> = (0..4).map(|i| vec![i, i + 1, i + 6, i + 5]).collect();
        let line = PolygonalMesh::from_cells(vertices, cells).unwrap();
        match build_basis(&line, build_patches(&line, 3), 1) {
            Err(BasisError::NotUnisolvent { retries: 3, .. }) => {}
            other => panic!("expected unisolvence failure, got {other:?}"),
        }
    }

    #[test]
    fn lambda_estimates() {
        let mesh = generate_structured_triangular(4).unwrap();
        let patches = build_patches(&mesh, 5);
        let p = &patches[11];

        // Constants achieve the ratio 1 exactly.
        assert_relative_eq!(estimate_lambda(&mesh, p, 0, 50), 1.0);

        // Monotone in the number of samples (prefix property).
        let e1 = estimate_lambda(&mesh, p, 1, 10);
        let e2 = estimate_lambda(&mesh, p, 1, 100);
        let e3 = estimate_lambda(&mesh, p, 1, 1000);
        assert!(e1 <= e2 && e2 <= e3);
        assert!(e1 >= 1.0);

        // Oracle: for m = 1 the exact Λ is the maximum over sample points x
        // of the linear program max |p(x)| s.t. |p(x_i)| ≤ 1 on I_K. The
        // optimum sits at a vertex of the feasible polytope where three
        // constraints are active; enumerate all sign patterns of all triples.
        let exact = brute_force_lambda_linear(&mesh, p);
        assert!(exact >= 1.0 && exact <= 10.0, "structured-mesh Λ is modest, got {exact}");
        assert!(e3 <= exact + 1e-9, "sampling is a lower bound: {e3} vs {exact}");
        assert!(e3 >= 0.5 * exact, "sampling with 1000 draws is not hopeless: {e3} vs {exact}");
    }

    /// Exact Λ(1, I_K) by vertex enumeration of {p ∈ P_1 : |p(x_i)| ≤ 1}.
    fn brute_force_lambda_linear(mesh: &PolygonalMesh, patch: &ElementPatch) -> f64 {
        let pts = &patch.collocation_points;
        let n = pts.len();
        let mut sample_points: Vec<Point2<f64>> = Vec::new();
        for &k in &patch.members {
            for tri in mesh.subtriangles(k) {
                sample_points.extend_from_slice(tri);
            }
            sample_points.push(mesh.barycenter(k));
        }
        let row = |x: Point2<f64>| nalgebra::RowVector3::new(1.0, x.x, x.y);
        let mut best: f64 = 1.0;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for signs in 0..8u8 {
                        let s = |b: u8| if signs >> b & 1 == 0 { 1.0 } else { -1.0 };
                        let m = nalgebra::Matrix3::from_rows(&[row(pts[i]), row(pts[j]), row(pts[k])]);
                        let rhs = nalgebra::Vector3::new(s(0), s(1), s(2));
                        let Some(inv) = m.try_inverse() else { continue };
                        let c = inv * rhs;
                        // Feasible vertex?
                        let feasible = pts
                            .iter()
                            .all(|&x| (row(x) * c)[0].abs() <= 1.0 + 1e-9);
                        if !feasible {
                            continue;
                        }
                        for &x in &sample_points {
                            best = best.max((row(x) * c)[0].abs());
                        }
                    }
                }
            }
        }
        best
    }
}
