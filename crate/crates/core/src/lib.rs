//! Structured multi-armed bandits with a hidden parameter: reward models,
//! confidence and competitive sets, Algorithm-C policies, a seeded experiment
//! runner and a MovieLens ingestion pipeline.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod confidence;
pub mod environment;
mod error;
pub mod ingest;
pub mod policies;
pub mod reward_model;
pub mod scenarios;
pub mod simulation;

pub use error::{Error, Result};
