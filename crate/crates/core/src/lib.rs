//! Exact calculus of partitions of unity on finite index sets.
//!
//! A partition of unity is handled pointwise: its value at a sample point is a
//! [`ProbVector`]. The crate provides the derivative and integral of such
//! vectors, joins, order truncation and the other pointwise kernels in
//! [`calculus`], simplicial complexes with barycentric subdivision and nerves
//! in [`complexes`], partitions built from covers of finite metric samples in
//! [`sampling`], and the JSON command line front end in [`cli`].
//!
//! All arithmetic is over arbitrary precision rationals, so every identity
//! checked by the test suites is an exact equality.

pub mod calculus;
pub mod cli;
pub mod complexes;
pub mod error;
pub mod random;
pub mod sampling;
pub mod weights;

pub use calculus::{
    approximates, common_simplex, derive, dyadic_layers, half_max_approx, integrate, join_points,
    shrink_wellordered, truncate_order,
};
pub use complexes::{
    barycentric_subdivision, disjoint_layers_check, euler_characteristic, is_simplex,
    join_complexes, nerve_of_sample, realize, restrict_nerve, star_refinement_witness,
    subdivision_coordinates, AbstractComplex, ComplexPoint, GeometricRealization,
};
pub use error::{Error, Result};
pub use sampling::{cech_pipeline, distance_pou, IndexedCover, MetricSample};
pub use weights::{
    l1_distance, order, subset_l1_distance, DerivedVector, ProbVector, Rational, SubsetKey,
    VertexLabel, WeightVector,
};
