use rand_chacha::ChaCha8Rng;

use super::privacy::{add_noise_with, clip_with, ClipMode, NoiseKind};
use crate::error::{Error, Result};
use crate::rng::{stream, tag};
use crate::vqc::{batch_gradient, draw_batch, evaluate_with, Backend, ClassifierTemplate, GradientMethod, GradientVector, LabeledSample, ModelParams};

/// What the orchestrator asks a client to compute.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UploadRequest {
    pub batch_size: usize,
    pub gradient_method: GradientMethod,
    pub backend: Backend,
    /// `+∞` disables clipping.
    pub clip_bound: f64,
    pub clip_mode: ClipMode,
    /// `+∞` disables noise.
    pub mu: f64,
    pub noise: NoiseKind,
}

/// What leaves a client: the perturbed gradient and the batch loss.
#[derive(Clone, Debug, PartialEq)]
pub struct Upload {
    pub gradient: GradientVector,
    pub loss: f64,
}

/// A client's private training data and random streams.
///
/// Samples never leave the shard; the only outputs are [`Upload`]s and
/// aggregate accuracy counts.
#[derive(Clone, Debug)]
pub struct ClientShard {
    client_id: usize,
    samples: Vec<LabeledSample>,
    batch_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
}

impl ClientShard {
    /// Client `client_id` batching from stream `CLIENT_BATCH + id` under
    /// `seed`.
    pub fn new(client_id: usize, samples: Vec<LabeledSample>, seed: u64) -> Self {
        ClientShard {
            client_id,
            samples,
            batch_rng: stream(seed, tag::CLIENT_BATCH + client_id as u64),
            noise_rng: stream(seed, tag::CLIENT_NOISE + client_id as u64),
        }
    }

    /// Restarts both streams under `seed`.
    pub fn reseed(&mut self, seed: u64) {
        self.batch_rng = stream(seed, tag::CLIENT_BATCH + self.client_id as u64);
        self.noise_rng = stream(seed, tag::CLIENT_NOISE + self.client_id as u64);
    }

    pub fn client_id(&self) -> usize {
        self.client_id
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples per class.
    pub fn class_counts(&self, n_classes: usize) -> Vec<usize> {
        let mut c = vec![0; n_classes];
        for s in &self.samples {
            if let Some(slot) = c.get_mut(s.class()) {
                *slot += 1;
            }
        }
        c
    }

    /// Draws a batch, computes its gradient, clips, adds noise.
    pub fn upload(&mut self, template: &ClassifierTemplate, params: &ModelParams, req: &UploadRequest) -> Result<Upload> {
        if self.samples.is_empty() {
            return Err(Error::InsufficientSamples(format!("client {} has no samples", self.client_id)));
        }
        let batch = draw_batch(&self.samples, req.batch_size, &mut self.batch_rng);
        let (grad, loss) = batch_gradient(template, params, &batch, req.gradient_method, req.backend)?;
        let clipped = if req.clip_bound.is_infinite() {
            grad
        } else {
            clip_with(&grad, req.clip_bound, req.clip_mode)?
        };
        let gradient = add_noise_with(&clipped, req.clip_bound, req.mu, req.noise, &mut self.noise_rng)?;
        Ok(Upload { gradient, loss })
    }

    /// Number of correctly classified local samples.
    pub fn correct_count(&self, template: &ClassifierTemplate, params: &ModelParams, backend: Backend) -> Result<usize> {
        if self.samples.is_empty() {
            return Ok(0);
        }
        let acc = evaluate_with(template, params, &self.samples, backend)?;
        Ok((acc * self.samples.len() as f64).round() as usize)
    }
}
