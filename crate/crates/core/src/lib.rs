//! Simulation stack for blind, privacy-preserving training of variational
//! quantum classifiers.
//!
//! * [`quantum`]: statevector backend.
//! * [`encoding`]: amplitude and rotation-angle data encodings.
//! * [`mbqc`]: brickwork graph states, pattern compilation and evaluation.
//! * [`ubqc`]: client/server blind delegation protocol and blindness audit.
//! * [`vqc`]: classifier template, loss, gradients, Adam and training.
//! * [`federated`]: multi-client training with clipping and calibrated noise.
//! * [`attack`]: gradient-inversion attack on uploaded gradients.
//! * [`data`]: MNIST / WDBC ingestion and sharding.
//! * [`harness`]: config-driven experiment runner behind the `qfl` binary.

pub mod attack;
pub mod data;
pub mod encoding;
pub mod error;
pub mod federated;
pub mod harness;
pub mod mbqc;
pub mod quantum;
pub mod rng;
pub mod stats;
pub mod ubqc;
pub mod vqc;

pub use error::{Error, Result};
