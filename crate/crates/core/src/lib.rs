//! Equivalence and singularity of infinite products of Cauchy measures.
//!
//! Two product laws `⊗ P_{z_n}` and `⊗ P_{w_n}` on `ℝ^ℕ` are either
//! equivalent or mutually singular. They are equivalent exactly when
//!
//! ```text
//! ∑_n |z_n - w_n|² / (Im z_n · Im w_n) < ∞.
//! ```
//!
//! The crate is organized as
//!
//! - [`halfplane`]: Cauchy parameters as upper-half-plane points, the pair
//!   invariant `chi`, Möbius maps and canonical reduction.
//! - [`numerics`]: AGM, adaptive quadrature on unbounded domains, series
//!   diagnostics.
//! - [`divergence`]: KL divergence, Hellinger affinity, Kakutani terms and
//!   density-ratio bounds.
//! - [`dichotomy`]: classification of parameter sequences.
//! - [`montecarlo`]: likelihood-ratio trajectories under the product law.
//! - [`files`]: sequence files, report documents and trajectory tables.

pub mod dichotomy;
pub mod divergence;
pub mod error;
pub mod files;
pub mod halfplane;
pub mod montecarlo;
pub mod numerics;

pub use divergence::{
    affinity_from_chi, cauchy_pdf, hellinger_affinity, kakutani_term, kl_divergence, log_density_ratio,
    log_ratio_bound, DivergencePair,
};
pub use error::{Error, Result};
pub use halfplane::{canonical_lambda, chi, reduce_to_canonical, CanonicalForm, MoebiusMap, UHPoint};

pub use dichotomy::{classify, Basis, DichotomyReport, Embedding, ParamSequencePair, Verdict};
