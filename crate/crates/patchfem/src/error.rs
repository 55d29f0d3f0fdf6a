//! Error types shared across the crate.

use thiserror::Error;

/// Errors arising while loading, generating, or validating meshes.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("malformed MSH header: expected \"2.2 0 8\", got {0:?}")]
    BadHeader(String),
    #[error("MSH parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("element {id} has unsupported type {etype} (supported: 1 line, 2 triangle, 3 quad)")]
    UnsupportedElement { id: usize, etype: usize },
    #[error("node {id} has nonzero z-coordinate {z} (2D meshes only)")]
    NonPlanarNode { id: usize, z: f64 },
    #[error("edge ({a}, {b}) is shared by more than two cells (non-manifold)")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("cell {cell} is degenerate or not a simple CCW polygon (signed area {area})")]
    DegenerateCell { cell: usize, area: f64 },
    #[error("cell {cell}: sub-triangle areas sum to {sum}, polygon area is {area}")]
    SubTriangulationMismatch { cell: usize, sum: f64, area: f64 },
    #[error("cell {cell} references vertex {vertex}, but the mesh has only {nvertices} vertices")]
    VertexOutOfRange { cell: usize, vertex: usize, nvertices: usize },
    #[error("red refinement requires an all-triangle mesh; cell {cell} has {nvertices} vertices")]
    NotTriangular { cell: usize, nvertices: usize },
    #[error("MSH 2.2 stores only triangles and quads; cell {cell} has {nvertices} vertices")]
    UnsupportedCellShape { cell: usize, nvertices: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors from patch construction and basis building.
#[derive(Debug, Error)]
pub enum BasisError {
    #[error(
        "patch of cell {cell} is not unisolvent for degree {degree} \
         (condition {condition:.3e} after {retries} enlargement retries)"
    )]
    NotUnisolvent { cell: usize, degree: usize, condition: f64, retries: usize },
    #[error("nodal value vector has length {got}, expected one value per cell ({expected})")]
    LengthMismatch { got: usize, expected: usize },
    #[error("point ({x}, {y}) lies outside the closure of cell {cell}")]
    PointOutsideCell { cell: usize, x: f64, y: f64 },
}

/// Errors from quadrature rule construction.
#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("triangle rules are provided up to exactness degree 12, requested {0}")]
    UnsupportedDegree(usize),
}

/// Errors from the linear and eigenvalue solvers.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("linear solve did not meet the residual tolerance: relative residual {0:.3e}")]
    Residual(f64),
    #[error(
        "all {n} eigenvalues of the inf-sup pencil were classified as null modes; \
         the pair is totally inf-sup deficient"
    )]
    DegeneratePair { n: usize },
    #[error("inf-sup test refused: pressure dimension {n} exceeds the dense-eigensolver cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("space pair (k={k}, k'={kp}) outside the supported range (1 <= k <= 5, 0 <= k' <= 5)")]
    UnsupportedPair { k: usize, kp: usize },
}

/// Top-level error type for the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}: {1}")]
    Study(String, #[source] Box<Error>),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
