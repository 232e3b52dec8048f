//! From-scratch neural networks with input-conditioned parameters, plus the
//! tabular benchmark harness around them.
//!
//! The centerpiece is a pair of dynamic dense layers: a **variable-weight**
//! layer whose weight matrix is predicted from its own input through a
//! stationary rank-3 tensor, and a **variable-bias** layer that predicts only
//! the bias vector. Both compose with standard dense layers into small
//! binary classifiers trained by mini-batch Adam with exact hand-written
//! gradients (finite-difference checked).
//!
//! Around the layers sit:
//! - a CSV ingestion/encoding pipeline for the 16-attribute diabetes-symptom
//!   questionnaire format,
//! - stratified k-fold / percentage-split drivers with pooled accuracy
//!   reporting,
//! - categorical Naive Bayes and logistic-regression baselines,
//! - versioned binary model persistence,
//! - a seeded synthetic dataset generator for self-contained benchmarks.
//!
//! Everything is deterministic given explicit seeds: randomness flows through
//! labeled [`rng::RngStream`]s, so results are reproducible bit-for-bit
//! across runs and platforms.

pub mod activation;
pub mod baselines;
pub mod data;
pub mod error;
pub mod eval;
pub mod layers;
pub mod network;
pub mod rng;
pub mod tensor;

pub use activation::ActivationKind;
pub use error::{Error, Result};
pub use rng::RngStream;
pub use tensor::Tensor;
