//! Squared radius of gyration for embedded subdivision graphs.
//!
//! A structure graph's edges are each split into `n` derived edges by `n − 1`
//! interior vertices. Embedding the derived graph and reordering the
//! displacement vectors along each subdivided edge spins up a family of
//! embeddings with the same junctions; this crate measures the squared
//! radius of gyration of such embeddings and averages it over the whole
//! reordering family — in closed form, by exhaustive enumeration, or by
//! seeded Monte Carlo — plus a Gaussian phantom ensemble for testing the
//! closed form against direct measurement.
//!
//! Modules build on one another in order: [`stats`] (compensated sums,
//! running moments), [`graph`] (structure graphs and their subdivisions),
//! [`zoo`] (small named structure graphs), [`cloud`] (weighted point clouds
//! and gyration), [`embedding`] (positions, grouped displacements, the
//! reordering action), [`symmetry`] (reordering averages and the closed
//! form), and [`ensemble`] (phantom sampling).

pub mod cloud;
pub mod embedding;
pub mod ensemble;
pub mod graph;
pub mod stats;
pub mod symmetry;
pub mod zoo;

pub use cloud::{
    degree_weighted_rg, midpoint_cloud, midpoint_distance_sq_via_endpoints, CloudError,
    RgDecomposition, RgMethod, WeightedPointCloud, PART_SUM_TOLERANCE,
};
pub use embedding::{
    apply_permutation, enumerate_group, group_cardinality, lands_within, random_group_element,
    EmbeddingError, FullEmbedding, GroupPermutation, GroupedDisplacements, Permutation,
    StructureEmbedding, CONSISTENCY_TOLERANCE, DEFAULT_ENUMERATION_CAP,
};
pub use ensemble::{
    estimate_expectation, estimate_expectation_with, sample_phantom, EnsembleError, EnsembleStats,
    MIN_SAMPLES,
};
pub use graph::{DerivedVertex, DirectedMultigraph, GraphError, SubdivisionGraph};
pub use stats::{KahanSum, RunningStats};
pub use symmetry::{
    center_cloud_rg, center_separation_average, cloud_center_consistency, decompose_rg,
    hockey_stick_sums, hockey_stick_sums_by_loop, ordering_average_rg, parent_cloud_rg,
    symmetrized_rg_closed, symmetrized_rg_exact, symmetrized_rg_monte_carlo, DecompositionReport,
    SymmetrizationMethod, SymmetrizationReport, SymmetrizedTerms, SymmetryError,
};
