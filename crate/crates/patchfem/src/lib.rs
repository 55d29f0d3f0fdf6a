//! Patch-reconstruction finite elements for the 2D incompressible Stokes
//! problem.
//!
//! The discretization carries **one degree of freedom per cell per field
//! component**: around every cell K an element patch S(K) of edge-connected
//! cells is grown, and the nodal (barycenter) values on the patch are mapped
//! to a local polynomial of degree m by least squares. The resulting
//! piecewise-polynomial, globally discontinuous spaces are paired in a mixed
//! interior-penalty DG formulation of the Stokes system, and the stability of
//! a velocity/pressure degree pair can be measured directly through a
//! generalized eigenvalue problem (the numerical inf-sup test).
//!
//! The crate is organized along the pipeline:
//!
//! - [`mesh`]: polygonal meshes — generation, MSH 2.2 I/O, edge
//!   classification, red refinement, quality reports.
//! - [`patch`]: element patches S(K) and their collocation points.
//! - [`reconstruction`]: the least-squares reconstruction operator, its basis
//!   functions, and the stability constant Λ.
//! - [`quadrature`]: Gauss rules on triangles and edges, composite
//!   integration over polygonal cells.
//! - [`assembly`]: the DG bilinear forms (stiffness A, divergence coupling B,
//!   loads, and the norm matrices S, T).
//! - [`solver`]: sparse saddle-point solves and the inf-sup eigenvalue test.
//! - [`analysis`]: manufactured solutions, error norms, and the benchmark
//!   studies (smooth convergence, inf-sup sequences, driven cavity, L-shaped
//!   domain).
//! - [`output`]: CSV tables and legacy-VTK fields for external plotting.
//!
//! See the crate examples for end-to-end, runnable versions of each study.

pub mod analysis;
pub mod assembly;
pub mod config;
pub mod error;
pub mod mesh;
pub mod output;
pub mod patch;
pub mod quadrature;
pub mod reconstruction;
pub mod solver;

pub use error::{Error, Result};
