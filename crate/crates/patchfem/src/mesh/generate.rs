//! Structured mesh generators for the benchmark domains.

use super::PolygonalMesh;
use crate::error::MeshError;
use nalgebra::Point2;

/// Structured triangulation of the unit square [0,1]².
///
/// The square is cut into n×n sub-squares, each split into two triangles by
/// the diagonal from its lower-left to its upper-right corner, so h = √2/n.
pub fn generate_structured_triangular(n: usize) -> Result<PolygonalMesh, MeshError> {
    assert!(n >= 1, "n must be positive");
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let vertices = grid_vertices(n, n, |i, j| {
        Point2::new(i as f64 / n as f64, j as f64 / n as f64)
    });
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            push_square_pair(&mut cells, vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
        }
    }
    PolygonalMesh::from_cells(vertices, cells)
}

/// Structured quadrilateral mesh of the unit square [0,1]² (n×n cells).
pub fn generate_structured_quad(n: usize) -> Result<PolygonalMesh, MeshError> {
    assert!(n >= 1, "n must be positive");
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let vertices = grid_vertices(n, n, |i, j| {
        Point2::new(i as f64 / n as f64, j as f64 / n as f64)
    });
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    PolygonalMesh::from_cells(vertices, cells)
}

/// Structured triangulation of the L-shaped domain
/// [−1,1]² \ [0,1)×(−1,0], with n sub-squares per unit length.
///
/// Grid coordinates are computed as i/n − 1 so the re-entrant corner vertex
/// sits exactly at (0, 0).
pub fn generate_lshape_triangular(n: usize) -> Result<PolygonalMesh, MeshError> {
    assert!(n >= 1, "n must be positive");
    let side = 2 * n; // vertices per axis: 2n+1
    let coord = |i: usize| i as f64 / n as f64 - 1.0;
    // Keep only vertices in the L (drop the open fourth quadrant's interior,
    // keeping its boundary lines x=0..1,y=0 and x=0,y=-1..0 which bound the L).
    let mut index = vec![usize::MAX; (side + 1) * (side + 1)];
    let mut vertices = Vec::new();
    let raw = |i: usize, j: usize| j * (side + 1) + i;
    for j in 0..=side {
        for i in 0..=side {
            let (x, y) = (coord(i), coord(j));
            // Exclude strictly-interior points of the removed quadrant
            // {x > 0, y < 0}; the quadrant's closure edges stay.
            if x > 0.0 && y < 0.0 {
                continue;
            }
            index[raw(i, j)] = vertices.len();
            vertices.push(Point2::new(x, y));
        }
    }
    let mut cells = Vec::new();
    for j in 0..side {
        for i in 0..side {
            // Sub-square [x_i, x_{i+1}] × [y_j, y_{j+1}] is in the L unless
            // it lies in the removed quadrant (x ≥ 0, y ≤ 0 strictly inside).
            if coord(i) >= 0.0 && coord(j + 1) <= 0.0 {
                continue;
            }
            let v = [
                index[raw(i, j)],
                index[raw(i + 1, j)],
                index[raw(i + 1, j + 1)],
                index[raw(i, j + 1)],
            ];
            debug_assert!(v.iter().all(|&x| x != usize::MAX));
            push_square_pair(&mut cells, v[0], v[1], v[2], v[3]);
        }
    }
    PolygonalMesh::from_cells(vertices, cells)
}

fn grid_vertices(
    nx: usize,
    ny: usize,
    f: impl Fn(usize, usize) -> Point2<f64>,
) -> Vec<Point2<f64>> {
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            v.push(f(i, j));
        }
    }
    v
}

/// Splits the square (a, b, c, d) (CCW from lower-left) into the two
/// triangles (a, b, c) and (a, c, d): the diagonal runs lower-left to
/// upper-right.
fn push_square_pair(cells: &mut Vec<Vec<usize>>, a: usize, b: usize, c: usize, d: usize) {
    cells.push(vec![a, b, c]);
    cells.push(vec![a, c, d]);
}
