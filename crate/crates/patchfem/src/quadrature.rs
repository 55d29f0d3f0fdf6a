//! Gauss quadrature on the reference triangle and the unit interval, plus
//! composite integration over polygonal cells (via their sub-triangulations)
//! and edges.
//!
//! Triangle rules are conical products: a tensor Gauss–Legendre grid on the
//! unit square collapsed onto the triangle {x, y ≥ 0, x + y ≤ 1} through the
//! substitution y = (1−x)t, with the (1−x) Jacobian folded into the weights.
//! This yields strictly positive weights and exactness for all bivariate
//! polynomials of total degree ≤ d with ⌈(d+2)/2⌉ × ⌈(d+1)/2⌉ points.

use crate::error::QuadratureError;
use crate::mesh::PolygonalMesh;
use nalgebra::Point2;

/// Highest supported exactness degree for triangle rules.
pub const MAX_TRIANGLE_DEGREE: usize = 12;

/// A quadrature rule on a reference domain of dimension `D`
/// (D = 2: unit triangle, measure 1/2; D = 1: unit interval, measure 1).
#[derive(Debug, Clone)]
pub struct QuadratureRule<const D: usize> {
    /// Reference coordinates of the quadrature points.
    pub points: Vec<[f64; D]>,
    /// Positive weights summing to the reference measure.
    pub weights: Vec<f64>,
    /// The rule integrates all polynomials of total degree ≤ this exactly.
    pub exactness: usize,
}

/// A rule on the reference triangle.
pub type TriangleRule = QuadratureRule<2>;
/// A rule on the unit interval [0, 1].
pub type EdgeRule = QuadratureRule<1>;

/// Gauss–Legendre nodes and weights on [0, 1] with `n` points
/// (exact for polynomials of degree ≤ 2n − 1).
///
/// Nodes are found by Newton iteration on the Legendre polynomial over
/// [−1, 1] and then mapped; the point set is symmetric about 1/2 and the
/// weights palindromic.
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Initial guess (Chebyshev-like), then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [−1,1] → [0,1]; the cosine guess descends, so store reversed
        // to keep nodes ascending.
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Evaluates (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule on [0, 1] exact for degree ≤ d, with ⌈(d+1)/2⌉ points.
pub fn edge_rule(exactness: usize) -> EdgeRule {
    let n = exactness / 2 + 1; // = ceil((d+1)/2)
    let (nodes, weights) = gauss_legendre_unit(n);
    EdgeRule {
        points: nodes.into_iter().map(|x| [x]).collect(),
        weights,
        exactness: 2 * n - 1,
    }
}

/// Conical-product rule on the reference triangle, exact for total degree ≤ d.
///
/// Degrees 0 and 1 use the single-point barycenter rule; degrees up to
/// [`MAX_TRIANGLE_DEGREE`] use the collapsed tensor construction.
pub fn triangle_rule(exactness: usize) -> Result<TriangleRule, QuadratureError> {
    if exactness > MAX_TRIANGLE_DEGREE {
        return Err(QuadratureError::UnsupportedDegree(exactness));
    }
    if exactness <= 1 {
        return Ok(TriangleRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![0.5],
            exactness: 1,
        });
    }
    let d = exactness;
    let n1 = (d + 3) / 2; // ceil((d+2)/2): the x-direction sees degree d+1
    let n2 = (d + 2) / 2; // ceil((d+1)/2)
    let (xs, wxs) = gauss_legendre_unit(n1);
    let (ts, wts) = gauss_legendre_unit(n2);
    let mut points = Vec::with_capacity(n1 * n2);
    let mut weights = Vec::with_capacity(n1 * n2);
    for (&x, &wx) in xs.iter().zip(&wxs) {
        for (&t, &wt) in ts.iter().zip(&wts) {
            points.push([x, (1.0 - x) * t]);
            weights.push(wx * wt * (1.0 - x));
        }
    }
    Ok(TriangleRule { points, weights, exactness: d })
}

/// Integrates a function over a cell by mapping the triangle rule to each
/// sub-triangle (Jacobian 2·area).
pub fn integrate_cell(
    mesh: &PolygonalMesh,
    cell: usize,
    mut integrand: impl FnMut(Point2<f64>) -> f64,
    exactness: usize,
) -> f64 {
    let rule = triangle_rule(exactness.min(MAX_TRIANGLE_DEGREE)).expect("degree is clamped");
    let mut sum = 0.0;
    for tri in mesh.subtriangles(cell) {
        let jac = 2.0 * 0.5 * ((tri[1] - tri[0]).perp(&(tri[2] - tri[0])));
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let x = tri[0] + (tri[1] - tri[0]) * p[0] + (tri[2] - tri[0]) * p[1];
            sum += w * jac * integrand(x);
        }
    }
    sum
}

/// Integrates a function over the segment between two points
/// (arc-length measure).
pub fn integrate_segment(
    a: Point2<f64>,
    b: Point2<f64>,
    mut integrand: impl FnMut(Point2<f64>) -> f64,
    exactness: usize,
) -> f64 {
    let rule = edge_rule(exactness);
    let len = (b - a).norm();
    let mut sum = 0.0;
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let x = a + (b - a) * p[0];
        sum += w * len * integrand(x);
    }
    sum
}

/// Which edge of a mesh to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKey {
    /// Index into [`PolygonalMesh::interior_edges`].
    Interior(usize),
    /// Index into [`PolygonalMesh::boundary_edges`].
    Boundary(usize),
}

/// Integrates a function over a mesh edge (composite Gauss–Legendre).
pub fn integrate_edge(
    mesh: &PolygonalMesh,
    edge: EdgeKey,
    integrand: impl FnMut(Point2<f64>) -> f64,
    exactness: usize,
) -> f64 {
    let vertices = match edge {
        EdgeKey::Interior(i) => mesh.interior_edges()[i].vertices,
        EdgeKey::Boundary(i) => mesh.boundary_edges()[i].vertices,
    };
    let (a, b) = mesh.edge_points(vertices);
    integrate_segment(a, b, integrand, exactness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_structured_quad, generate_structured_triangular};
    use approx::assert_relative_eq;

    /// ∫ over the reference triangle of x^a y^b = a! b! / (a+b+2)!.
    fn monomial_integral(a: usize, b: usize) -> f64 {
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    fn apply(rule: &TriangleRule, f: impl Fn(f64, f64) -> f64) -> f64 {
        rule.points.iter().zip(&rule.weights).map(|(p, w)| w * f(p[0], p[1])).sum()
    }

    #[test]
    fn degree_one_is_single_barycenter_point() {
        let r = triangle_rule(1).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_relative_eq!(r.points[0][0], 1.0 / 3.0);
        assert_relative_eq!(r.points[0][1], 1.0 / 3.0);
        assert_relative_eq!(r.weights[0], 0.5);
    }

    #[test]
    fn low_order_oracles() {
        // ∫ x² = 1/12 over the reference triangle.
        assert_relative_eq!(apply(&triangle_rule(2).unwrap(), |x, _| x * x), 1.0 / 12.0, max_relative = 1e-14);
        // ∫ x²y² = 1/180.
        assert_relative_eq!(
            apply(&triangle_rule(4).unwrap(), |x, y| x * x * y * y),
            1.0 / 180.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn triangle_rules_exact_for_all_monomials() {
        for d in 0..=MAX_TRIANGLE_DEGREE {
            let rule = triangle_rule(d).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0), "positive weights at d={d}");
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 0.5, max_relative = 1e-14);
            for a in 0..=d {
                for b in 0..=(d - a) {
                    let got = apply(&rule, |x, y| x.powi(a as i32) * y.powi(b as i32));
                    assert_relative_eq!(
                        got,
                        monomial_integral(a, b),
                        max_relative = 1e-12,
                        epsilon = 1e-15
                    );
                }
            }
        }
        assert!(triangle_rule(13).is_err());
    }

    #[test]
    fn edge_rule_oracles_and_symmetry() {
        // 1-point rule: ∫ x = 1/2; 2-point: ∫ x³ = 1/4; 3-point: ∫ x⁵ = 1/6.
        let apply1 = |r: &EdgeRule, f: &dyn Fn(f64) -> f64| -> f64 {
            r.points.iter().zip(&r.weights).map(|(p, w)| w * f(p[0])).sum()
        };
        assert_eq!(edge_rule(0).points.len(), 1);
        assert_eq!(edge_rule(1).points.len(), 1);
        assert_relative_eq!(apply1(&edge_rule(1), &|x| x), 0.5, max_relative = 1e-15);
        assert_eq!(edge_rule(3).points.len(), 2);
        assert_relative_eq!(apply1(&edge_rule(3), &|x| x * x * x), 0.25, max_relative = 1e-14);
        assert_eq!(edge_rule(5).points.len(), 3);
        assert_relative_eq!(apply1(&edge_rule(5), &|x| x.powi(5)), 1.0 / 6.0, max_relative = 1e-14);

        for d in 0..=21 {
            let r = edge_rule(d);
            assert_eq!(r.points.len(), d / 2 + 1);
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
            let n = r.points.len();
            for i in 0..n {
                assert_relative_eq!(r.points[i][0], 1.0 - r.points[n - 1 - i][0], epsilon = 1e-14);
                assert_relative_eq!(r.weights[i], r.weights[n - 1 - i], epsilon = 1e-14);
            }
            // Exactness at the advertised degree.
            let e = r.exactness as i32;
            assert_relative_eq!(
                apply1(&r, &|x| x.powi(e)),
                1.0 / (e as f64 + 1.0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn composite_cell_and_edge_integrals() {
        let tri = generate_structured_triangular(3).unwrap();
        for k in 0..tri.n_cells() {
            assert_relative_eq!(integrate_cell(&tri, k, |_| 1.0, 0), tri.area(k), max_relative = 1e-14);
        }
        for (i, e) in tri.interior_edges().iter().enumerate() {
            assert_relative_eq!(
                integrate_edge(&tri, EdgeKey::Interior(i), |_| 1.0, 0),
                e.length,
                max_relative = 1e-14
            );
        }

        // x² over the unit square as a single quad cell → 1/3.
        let quad = generate_structured_quad(1).unwrap();
        assert_relative_eq!(
            integrate_cell(&quad, 0, |p| p.x * p.x, 2),
            1.0 / 3.0,
            max_relative = 1e-14
        );

        // A polynomial of moderate degree over the whole square: ∫ x³y² = 1/12.
        let total: f64 =
            (0..tri.n_cells()).map(|k| integrate_cell(&tri, k, |p| p.x.powi(3) * p.y * p.y, 5)).sum();
        assert_relative_eq!(total, 1.0 / 12.0, max_relative = 1e-13);
    }

    #[test]
    fn random_polynomial_exactness_property() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let d = rng.random_range(0..=MAX_TRIANGLE_DEGREE);
            let rule = triangle_rule(d).unwrap();
            // Random polynomial of total degree ≤ d with coefficients in [−1, 1].
            let mut coeffs = Vec::new();
            for a in 0..=d {
                for b in 0..=(d - a) {
                    coeffs.push((a, b, rng.random_range(-1.0..1.0)));
                }
            }
            let got = apply(&rule, |x, y| {
                coeffs.iter().map(|&(a, b, c)| c * x.powi(a as i32) * y.powi(b as i32)).sum()
            });
            let exact: f64 =
                coeffs.iter().map(|&(a, b, c)| c * monomial_integral(a, b)).sum();
            assert_relative_eq!(got, exact, max_relative = 1e-12, epsilon = 1e-14);
        }
    }
}
