//! Cross-entropy estimation between independent stationary symbol sources
//! from waiting times and longest-match lengths, with exact reference
//! rates and numerical audits of the decoupling conditions under which
//! the estimators converge.
//!
//! All log quantities are in nats.

pub mod audit;
pub mod error;
pub mod estimate;
pub mod fixtures;
pub mod linalg;
pub mod matching;
pub mod model;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases, the default instantiation.
pub type MarkovChain = model::FiniteMarkovChain<f64>;
pub type FunctionMarkov = model::FunctionMarkovModel<f64>;
pub type Ladder = model::LadderChain<f64>;
pub type SourceModel = model::Model<f64>;

/// Single-precision aliases.
pub type MarkovChainF32 = model::FiniteMarkovChain<f32>;
pub type FunctionMarkovF32 = model::FunctionMarkovModel<f32>;
pub type SourceModelF32 = model::Model<f32>;
