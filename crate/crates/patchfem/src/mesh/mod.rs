//! Polygonal meshes: topology, geometry, edge classification, refinement.
//!
//! A [`PolygonalMesh`] stores counter-clockwise vertex loops (triangles,
//! quads, or general simple polygons), classifies every edge as interior
//! (shared by exactly two cells) or boundary (owned by one), and carries the
//! derived geometry the discretization needs: barycenters, diameters, edge
//! normals and lengths, and a sub-triangulation of every cell for quadrature.
//!
//! Meshes are immutable after construction and safe to share across threads.

mod generate;
mod msh;

pub use generate::{generate_lshape_triangular, generate_structured_quad, generate_structured_triangular};
pub use msh::{load_msh, write_msh};

use crate::error::MeshError;
use nalgebra::{Point2, Vector2};

/// An interior edge, shared by exactly two cells.
///
/// The lower-indexed cell is called "left"; `normal` is the outward unit
/// normal of the left cell on this edge, which all jump/average conventions
/// in the crate rely on.
#[derive(Debug, Clone)]
pub struct InteriorEdge {
    /// Endpoint vertex indices.
    pub vertices: [usize; 2],
    /// Lower-indexed adjacent cell.
    pub left: usize,
    /// Higher-indexed adjacent cell.
    pub right: usize,
    /// Unit normal pointing from `left` into `right`.
    pub normal: Vector2<f64>,
    /// Edge length h_e.
    pub length: f64,
}

/// A boundary edge, owned by exactly one cell.
#[derive(Debug, Clone)]
pub struct BoundaryEdge {
    /// Endpoint vertex indices.
    pub vertices: [usize; 2],
    /// The owning cell.
    pub owner: usize,
    /// Outward unit normal of the domain.
    pub normal: Vector2<f64>,
    /// Edge length h_e.
    pub length: f64,
}

/// Shape-regularity diagnostics for a mesh.
///
/// `max_aspect` is the maximum over all sub-triangles T of h_T/ρ_T (diameter
/// over inradius). For an equilateral triangle h_T/ρ_T = 2√3, the smallest
/// possible value; for the right isosceles triangles of the structured
/// generator it is 2(1+√2).
#[derive(Debug, Clone)]
pub struct MeshQualityReport {
    /// Maximum number of sub-triangles a single cell needs.
    pub max_subtriangles_per_cell: usize,
    /// max over sub-triangles of h_T / ρ_T.
    pub max_aspect: f64,
    /// Shortest edge in the mesh (interior or boundary).
    pub min_edge_length: f64,
    /// Longest edge in the mesh.
    pub max_edge_length: f64,
}

/// A 2D polygonal mesh with classified edges and per-cell geometry.
#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    vertices: Vec<Point2<f64>>,
    cells: Vec<Vec<usize>>,
    interior_edges: Vec<InteriorEdge>,
    boundary_edges: Vec<BoundaryEdge>,
    barycenters: Vec<Point2<f64>>,
    diameters: Vec<f64>,
    areas: Vec<f64>,
    h: f64,
    subtriangulation: Vec<Vec<[Point2<f64>; 3]>>,
    neighbors: Vec<Vec<usize>>,
}

impl PolygonalMesh {
    /// Builds a mesh from vertices and counter-clockwise cell loops,
    /// deriving all topology and geometry.
    ///
    /// Cell loops given clockwise are reversed; degenerate loops and
    /// non-manifold edges (shared by more than two cells) are rejected.
    pub fn from_cells(
        vertices: Vec<Point2<f64>>,
        mut cells: Vec<Vec<usize>>,
    ) -> Result<Self, MeshError> {
        for (k, cell) in cells.iter_mut().enumerate() {
            for &v in cell.iter() {
                if v >= vertices.len() {
                    return Err(MeshError::VertexOutOfRange {
                        cell: k,
                        vertex: v,
                        nvertices: vertices.len(),
                    });
                }
            }
            let area = signed_area(&vertices, cell);
            if area < 0.0 {
                cell.reverse();
            }
            let area = area.abs();
            let scale = cell_scale(&vertices, cell);
            if !(area > 1e-14 * scale * scale) {
                return Err(MeshError::DegenerateCell { cell: k, area });
            }
        }

        let (interior_edges, boundary_edges) = classify_edges(&vertices, &cells)?;

        let mut neighbors = vec![Vec::new(); cells.len()];
        for e in &interior_edges {
            neighbors[e.left].push(e.right);
            neighbors[e.right].push(e.left);
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
            nb.dedup();
        }

        let mut barycenters = Vec::with_capacity(cells.len());
        let mut diameters = Vec::with_capacity(cells.len());
        let mut areas = Vec::with_capacity(cells.len());
        let mut subtriangulation = Vec::with_capacity(cells.len());
        for (k, cell) in cells.iter().enumerate() {
            let area = signed_area(&vertices, cell);
            let bary = centroid(&vertices, cell, area);
            let tris = subtriangulate(&vertices, cell, bary);
            let tri_sum: f64 = tris.iter().map(|t| triangle_area(t)).sum();
            if (tri_sum - area).abs() > 1e-12 * area.max(1.0) {
                return Err(MeshError::SubTriangulationMismatch { cell: k, sum: tri_sum, area });
            }
            barycenters.push(bary);
            diameters.push(diameter(&vertices, cell));
            areas.push(area);
            subtriangulation.push(tris);
        }
        let h = diameters.iter().cloned().fold(0.0, f64::max);

        Ok(Self {
            vertices,
            cells,
            interior_edges,
            boundary_edges,
            barycenters,
            diameters,
            areas,
            h,
            subtriangulation,
            neighbors,
        })
    }

    /// Vertex coordinates.
    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }

    /// Counter-clockwise vertex loops, one per cell.
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    /// Number of cells.
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Interior edges with left/right cells and left-outward normals.
    pub fn interior_edges(&self) -> &[InteriorEdge] {
        &self.interior_edges
    }

    /// Boundary edges with owner cells and outward normals.
    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// Barycenter (area centroid) x_K of a cell.
    pub fn barycenter(&self, cell: usize) -> Point2<f64> {
        self.barycenters[cell]
    }

    /// Diameter h_K of a cell (max pairwise vertex distance).
    pub fn diameter(&self, cell: usize) -> f64 {
        self.diameters[cell]
    }

    /// Polygon area |K| of a cell.
    pub fn area(&self, cell: usize) -> f64 {
        self.areas[cell]
    }

    /// Global mesh size h = max over cells of h_K.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Sub-triangles (vertex coordinate triples) partitioning a cell.
    pub fn subtriangles(&self, cell: usize) -> &[[Point2<f64>; 3]] {
        &self.subtriangulation[cell]
    }

    /// Cells sharing an edge with `cell` (von Neumann neighbors), sorted.
    pub fn edge_neighbors(&self, cell: usize) -> &[usize] {
        &self.neighbors[cell]
    }

    /// Endpoint coordinates of an edge given its vertex indices.
    pub fn edge_points(&self, vertices: [usize; 2]) -> (Point2<f64>, Point2<f64>) {
        (self.vertices[vertices[0]], self.vertices[vertices[1]])
    }

    /// Tests whether a point lies in the closure of a cell, within a
    /// tolerance of `1e-12 * h_K` in barycentric terms.
    pub fn cell_contains(&self, cell: usize, x: Point2<f64>) -> bool {
        let tol = 1e-12 * self.diameters[cell].max(1.0);
        self.subtriangulation[cell].iter().any(|t| point_in_triangle(t, x, tol))
    }

    /// Shape-regularity report: sub-triangle count, aspect ratios, edge lengths.
    pub fn quality(&self) -> MeshQualityReport {
        let max_subtriangles_per_cell =
            self.subtriangulation.iter().map(Vec::len).max().unwrap_or(0);
        let mut max_aspect: f64 = 0.0;
        for tris in &self.subtriangulation {
            for t in tris {
                max_aspect = max_aspect.max(triangle_aspect(t));
            }
        }
        let mut min_edge_length = f64::INFINITY;
        let mut max_edge_length: f64 = 0.0;
        for len in self
            .interior_edges
            .iter()
            .map(|e| e.length)
            .chain(self.boundary_edges.iter().map(|e| e.length))
        {
            min_edge_length = min_edge_length.min(len);
            max_edge_length = max_edge_length.max(len);
        }
        MeshQualityReport { max_subtriangles_per_cell, max_aspect, min_edge_length, max_edge_length }
    }

    /// Splits every triangle into 4 congruent children via edge midpoints.
    ///
    /// Rejects meshes containing non-triangular cells. The mesh size h is
    /// exactly halved (up to roundoff) and total area is preserved.
    pub fn refine_red(&self) -> Result<Self, MeshError> {
        for (k, cell) in self.cells.iter().enumerate() {
            if cell.len() != 3 {
                return Err(MeshError::NotTriangular { cell: k, nvertices: cell.len() });
            }
        }
        let mut vertices = self.vertices.clone();
        let mut midpoint = std::collections::HashMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Point2<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let m = nalgebra::center(&vertices[a], &vertices[b]);
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let mut cells = Vec::with_capacity(4 * self.cells.len());
        for cell in &self.cells {
            let [a, b, c] = [cell[0], cell[1], cell[2]];
            let mab = mid(a, b, &mut vertices);
            let mbc = mid(b, c, &mut vertices);
            let mca = mid(c, a, &mut vertices);
            cells.push(vec![a, mab, mca]);
            cells.push(vec![mab, b, mbc]);
            cells.push(vec![mca, mbc, c]);
            cells.push(vec![mab, mbc, mca]);
        }
        Self::from_cells(vertices, cells)
    }
}

/// Shoelace signed area of a vertex loop (positive for CCW).
fn signed_area(vertices: &[Point2<f64>], cell: &[usize]) -> f64 {
    let n = cell.len();
    let mut s = 0.0;
    for i in 0..n {
        let p = vertices[cell[i]];
        let q = vertices[cell[(i + 1) % n]];
        s += p.x * q.y - q.x * p.y;
    }
    0.5 * s
}

/// A length scale for degeneracy checks: max |coordinate difference|.
fn cell_scale(vertices: &[Point2<f64>], cell: &[usize]) -> f64 {
    let mut s: f64 = 0.0;
    for i in 0..cell.len() {
        for j in (i + 1)..cell.len() {
            let d = vertices[cell[i]] - vertices[cell[j]];
            s = s.max(d.x.abs()).max(d.y.abs());
        }
    }
    s.max(f64::MIN_POSITIVE)
}

/// Area centroid of a simple polygon with precomputed signed area.
fn centroid(vertices: &[Point2<f64>], cell: &[usize], area: f64) -> Point2<f64> {
    let n = cell.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let p = vertices[cell[i]];
        let q = vertices[cell[(i + 1) % n]];
        let cross = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    Point2::new(cx / (6.0 * area), cy / (6.0 * area))
}

fn diameter(vertices: &[Point2<f64>], cell: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..cell.len() {
        for j in (i + 1)..cell.len() {
            d = d.max((vertices[cell[i]] - vertices[cell[j]]).norm());
        }
    }
    d
}

fn triangle_area(t: &[Point2<f64>; 3]) -> f64 {
    0.5 * ((t[1] - t[0]).perp(&(t[2] - t[0])))
}

/// h_T / ρ_T for a triangle: longest edge over inradius (2·area/perimeter).
fn triangle_aspect(t: &[Point2<f64>; 3]) -> f64 {
    let a = (t[1] - t[0]).norm();
    let b = (t[2] - t[1]).norm();
    let c = (t[0] - t[2]).norm();
    let h = a.max(b).max(c);
    let rho = 2.0 * triangle_area(t).abs() / (a + b + c);
    h / rho
}

fn point_in_triangle(t: &[Point2<f64>; 3], x: Point2<f64>, tol: f64) -> bool {
    let area = triangle_area(t);
    if area.abs() < f64::MIN_POSITIVE {
        return false;
    }
    // Barycentric coordinates via sub-area ratios.
    let w0 = 0.5 * (t[1] - x).perp(&(t[2] - x)) / area;
    let w1 = 0.5 * (t[2] - x).perp(&(t[0] - x)) / area;
    let w2 = 0.5 * (t[0] - x).perp(&(t[1] - x)) / area;
    w0 >= -tol && w1 >= -tol && w2 >= -tol
}

/// Decomposes a cell into triangles for quadrature.
///
/// Triangles are their own decomposition; quads are split along the shorter
/// diagonal (tie: the diagonal from the lower vertex index); larger convex
/// polygons are fanned from the barycenter; non-convex ones are ear-clipped.
fn subtriangulate(
    vertices: &[Point2<f64>],
    cell: &[usize],
    bary: Point2<f64>,
) -> Vec<[Point2<f64>; 3]> {
    let pts: Vec<Point2<f64>> = cell.iter().map(|&v| vertices[v]).collect();
    match pts.len() {
        3 => vec![[pts[0], pts[1], pts[2]]],
        4 => {
            let d02 = (pts[2] - pts[0]).norm();
            let d13 = (pts[3] - pts[1]).norm();
            // Both splits must be valid (each sub-triangle CCW); a non-convex
            // quad admits only the diagonal through its reflex vertex.
            let split02 = [[pts[0], pts[1], pts[2]], [pts[0], pts[2], pts[3]]];
            let split13 = [[pts[1], pts[2], pts[3]], [pts[1], pts[3], pts[0]]];
            let ok = |s: &[[Point2<f64>; 3]; 2]| s.iter().all(|t| triangle_area(t) > 0.0);
            if !ok(&split13) || (ok(&split02) && d02 <= d13) {
                split02.to_vec()
            } else {
                split13.to_vec()
            }
        }
        _ => {
            if is_convex(&pts) {
                let n = pts.len();
                (0..n).map(|i| [bary, pts[i], pts[(i + 1) % n]]).collect()
            } else {
                ear_clip(&pts)
            }
        }
    }
}

fn is_convex(pts: &[Point2<f64>]) -> bool {
    let n = pts.len();
    let scale: f64 = pts.iter().map(|p| p.coords.norm()).fold(1.0, f64::max);
    (0..n).all(|i| {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let c = pts[(i + 2) % n];
        (b - a).perp(&(c - b)) > -1e-12 * scale * scale
    })
}

/// Standard ear-clipping triangulation of a simple CCW polygon.
fn ear_clip(pts: &[Point2<f64>]) -> Vec<[Point2<f64>; 3]> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut tris = Vec::with_capacity(pts.len() - 2);
    'outer: while idx.len() > 3 {
        for i in 0..idx.len() {
            let prev = pts[idx[(i + idx.len() - 1) % idx.len()]];
            let cur = pts[idx[i]];
            let next = pts[idx[(i + 1) % idx.len()]];
            let ear = [prev, cur, next];
            if triangle_area(&ear) <= 0.0 {
                continue; // reflex corner
            }
            let contains_other = idx
                .iter()
                .map(|&j| pts[j])
                .filter(|p| *p != prev && *p != cur && *p != next)
                .any(|p| point_in_triangle(&ear, p, -1e-14));
            if !contains_other {
                tris.push(ear);
                idx.remove(i);
                continue 'outer;
            }
        }
        // No ear found: numerically degenerate input; fall back to a fan so
        // the area check in `from_cells` can report the mismatch.
        break;
    }
    if idx.len() == 3 {
        tris.push([pts[idx[0]], pts[idx[1]], pts[idx[2]]]);
    }
    tris
}

/// Builds interior/boundary edge lists from cell loops.
///
/// Each CCW directed edge (p, q) of a cell has the cell on its left in the
/// travel direction, so the cell's outward normal is the right-hand rotation
/// of the tangent: n = (t_y, −t_x)/|t|.
fn classify_edges(
    vertices: &[Point2<f64>],
    cells: &[Vec<usize>],
) -> Result<(Vec<InteriorEdge>, Vec<BoundaryEdge>), MeshError> {
    use std::collections::BTreeMap;
    // key: undirected vertex pair; value: list of (cell, from, to)
    let mut incident: BTreeMap<(usize, usize), Vec<(usize, usize, usize)>> = BTreeMap::new();
    for (k, cell) in cells.iter().enumerate() {
        let n = cell.len();
        for i in 0..n {
            let p = cell[i];
            let q = cell[(i + 1) % n];
            incident.entry((p.min(q), p.max(q))).or_default().push((k, p, q));
        }
    }
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for ((a, b), inc) in incident {
        match inc.as_slice() {
            [(k, p, q)] => {
                let t = vertices[*q] - vertices[*p];
                let length = t.norm();
                boundary.push(BoundaryEdge {
                    vertices: [*p, *q],
                    owner: *k,
                    normal: Vector2::new(t.y, -t.x) / length,
                    length,
                });
            }
            [e0, e1] => {
                let (left, right, p, q) =
                    if e0.0 < e1.0 { (e0.0, e1.0, e0.1, e0.2) } else { (e1.0, e0.0, e1.1, e1.2) };
                let t = vertices[q] - vertices[p];
                let length = t.norm();
                interior.push(InteriorEdge {
                    vertices: [p, q],
                    left,
                    right,
                    normal: Vector2::new(t.y, -t.x) / length,
                    length,
                });
            }
            _ => return Err(MeshError::NonManifoldEdge { a, b }),
        }
    }
    Ok((interior, boundary))
}
