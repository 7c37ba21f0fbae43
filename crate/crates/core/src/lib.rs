//! Affine subspaces of Euclidean space as points of the affine Grassmannian
//! `Graff(k, n)`.
//!
//! * [`coords`]: orthogonal affine, Stiefel and projection coordinates, and
//!   the embedding into `Gr(k+1, n+1)` with its inverse.
//! * [`metric`]: affine principal angles, the equidimensional distances,
//!   minimizing geodesics, distances between flats of different dimension
//!   and metrics on flats of all dimensions.
//! * [`invariants`]: dimensions, volumes, Betti numbers and homotopy groups.
//! * [`probability`]: uniform, Langevin and Langevin–Gaussian distributions.
//! * [`fitting`]: estimators that return flats (PCA-style fits, regression,
//!   errors-in-variables, hard-margin SVM).
//! * [`cli`]: the `graff` command-line tool.

pub mod cli;
pub mod coords;
pub mod error;
pub mod fitting;
pub mod invariants;
pub(crate) mod linalg;
pub mod metric;
pub mod probability;
pub mod tolerance;

pub use coords::{
    embed, equal_flats, make_flat, pad_ambient, projection_affine_coords, projection_coords,
    stiefel_coords, unembed, AffineFlat, ProjectionAffinePair, ProjectionMatrix, StiefelMatrix,
};
pub use error::{GraffError, Result};
pub use metric::{
    delta_distance, distance, evaluate_geodesic, geodesic, infinite_metric,
    principal_decomposition, DistanceKind, GeodesicCurve, PrincipalDecomposition,
};
pub use probability::RandomStream;
