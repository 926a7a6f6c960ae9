//! Multi-client training with per-element gradient clipping and calibrated
//! noise.
//!
//! Each iteration one scheduled client draws a batch from its own shard,
//! computes the gradient, clips it to `[-R, R]` per element, adds
//! `(2R/μ)·N(0, 1)` noise and uploads it. The orchestrator only sees
//! uploads.

mod privacy;
mod shard;
mod train;

pub use privacy::{
    add_dp_noise, add_noise_with, clip_gradient, clip_with, make_schedule, noise_scale, ClipMode, NoiseKind,
    ScheduleString,
};
pub use shard::{ClientShard, Upload, UploadRequest};
pub use train::{federated_train, FederationConfig};
