//! Coupled alpha complexes of point-cloud pairs.
//!
//! Given two finite point sets `X`, `Y` in `R^d`, the coupled alpha complex is
//! the nerve of the `X`-Voronoi balls together with the `Y`-Voronoi balls. It
//! contains the alpha complexes of `X` and of `Y` and has the homotopy type of
//! the union of balls around `X ∪ Y`. This crate builds the complex by lifting
//! the clouds onto two parallel hyperplanes of `R^{d+1}` and triangulating,
//! assigns filtration values top-down from a relaxed min-max problem, and
//! computes GF(2) persistence. Brute-force references (a Čech filtration and
//! a convex-feasibility nerve test) live in [`oracle`].

pub mod cli;
pub mod complex;
pub mod delaunay;
pub mod error;
pub mod filtration;
pub mod geometry;
pub mod harness;
pub mod homology;
pub mod oracle;

pub use complex::{alpha_infty, coupled_alpha_infty, lift, CoupledComplex, PointCloudPair, Simplex, SimplicialComplex};
pub use error::{Error, Result};
pub use filtration::{alpha_filtration, coupled_filtration, relaxed_value, FilteredComplex, SphereSolution};
pub use geometry::{Point, Sphere, DEFAULT_EPSILON};
pub use homology::{persistence_diagram, Interval, PersistenceDiagram};
