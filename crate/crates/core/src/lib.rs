//! Deterministic active-learning benchmark toolkit.
//!
//! Query strategies (random, farthest-point sampling, cluster-wise one-shot
//! sampling, and FPS neighborhoods ranked by Monte Carlo dropout uncertainty)
//! over a fixed embedding pool, together with the iterative labeling loop,
//! multi-seed comparisons and the supporting numeric kernels.
//!
//! Numeric kernels are generic over [`Scalar`] (`f32`/`f64`); the aliases
//! below fix the precision used by the experiment loop.

pub mod classifier;
pub mod contrastive;
pub mod dataset;
pub mod error;
pub mod geometry;
pub mod orchestrator;
pub mod plot;
pub mod rng;
pub mod scalar;
pub mod strategies;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Uncertainty model used by the experiment loop.
pub type Mlp = classifier::MlpModel<f64>;
pub type MlpGradients = classifier::Gradients<f64>;
/// Contrastive encoder used by the CLI.
pub type Encoder = contrastive::ContrastiveEncoder<f64>;
