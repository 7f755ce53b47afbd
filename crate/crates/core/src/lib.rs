//! Meta-learned selection of post-hoc OOD detectors for video + optical-flow
//! dataset pairs.

pub mod baselines;
pub mod benchgen;
pub mod config;
pub mod data_model;
pub mod detectors;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod llm;
pub mod meta;
pub mod metafeatures;
pub mod registry;
pub mod rng;

pub use error::{Error, Result};
