//! Weighted Sobolev and uniform norms on the cone and the inequality checks built on them.

pub mod checks;
pub mod norms;
pub mod weight;

pub use checks::{
    cutoff, embedding_check, hardy_check, HARDY_TOL, hardy_constant, norm_equivalence_check,
    scaling_homogeneity_check, EmbeddingReport, EquivalenceReport, HardyReport, ScalingReport,
};
pub use norms::{
    c_k_delta_norm, dyadic_annulus_decompose, h1_norm, sobolev_norm, weighted_norm,
    weighted_norm_with, weighted_terms, Field, GridField, WeightSpec,
};
pub use weight::{Region, Weight, WeightFunction};
