use std::time::Instant;

use super::privacy::{make_schedule, ClipMode, NoiseKind};
use super::shard::{ClientShard, UploadRequest};
use crate::error::{Error, Result};
use crate::rng::{stream, tag};
use crate::vqc::{
    adam_step, AdamState, Backend, ClassifierTemplate, Evaluator, GradientMethod, LabeledSample, ModelParams,
    TrainOutcome,
};

/// Multi-client training settings.
#[derive(Clone, Debug, PartialEq)]
pub struct FederationConfig {
    pub n_clients: usize,
    pub samples_per_client: usize,
    pub batch_size: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    /// `+∞` disables clipping.
    pub clip_bound: f64,
    pub clip_mode: ClipMode,
    /// `+∞` disables noise.
    pub mu: f64,
    /// Per-client override of `mu`.
    pub per_client_mu: Option<Vec<f64>>,
    pub noise: NoiseKind,
    pub seed: u64,
    pub eval_every: usize,
    pub gradient_method: GradientMethod,
    pub backend: Backend,
    pub record_wallclock: bool,
}

impl Default for FederationConfig {
    fn default() -> Self {
        FederationConfig {
            n_clients: 10,
            samples_per_client: 200,
            batch_size: 50,
            iterations: 1500,
            learning_rate: 0.001,
            clip_bound: 0.01,
            clip_mode: ClipMode::Elementwise,
            mu: f64::INFINITY,
            per_client_mu: None,
            noise: NoiseKind::Gaussian,
            seed: 0,
            eval_every: 10,
            gradient_method: GradientMethod::Adjoint,
            backend: Backend::Direct,
            record_wallclock: false,
        }
    }
}

impl FederationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_clients == 0 || self.samples_per_client == 0 || self.iterations == 0 || self.eval_every == 0 {
            return bad("num_clients, training_set_per_client, num_iterations and eval_every must be positive".into());
        }
        if self.batch_size == 0 || self.batch_size > self.samples_per_client {
            return bad(format!(
                "batch_size_per_client {} must be in 1..={}",
                self.batch_size, self.samples_per_client
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(format!("learning_rate {} is invalid", self.learning_rate));
        }
        if !(self.clip_bound > 0.0) {
            return bad(format!("gradient_bound {} must be positive", self.clip_bound));
        }
        let mus: Vec<f64> = match &self.per_client_mu {
            Some(v) if v.len() != self.n_clients => {
                return bad(format!("per_client_mu has {} entries for {} clients", v.len(), self.n_clients));
            }
            Some(v) => v.clone(),
            None => vec![self.mu],
        };
        for mu in mus {
            if !(mu > 0.0) {
                return bad(format!("noise strength {mu} must be positive"));
            }
            if mu.is_finite() && self.clip_bound.is_infinite() {
                return bad("finite noise strength needs a finite gradient_bound".into());
            }
        }
        Ok(())
    }

    /// Noise strength used by client `i`.
    pub fn mu_for(&self, i: usize) -> f64 {
        self.per_client_mu.as_ref().map_or(self.mu, |v| v[i])
    }
}

/// Sequential federated training: at step `i` client `S_i` uploads a
/// clipped, noised batch gradient and the shared parameters take one Adam
/// step. History records carry `client_id` and `mu_used`; training
/// accuracy is the pooled accuracy the clients report on their own shards.
pub fn federated_train(
    shards: &mut [ClientShard],
    validation: &[LabeledSample],
    template: &ClassifierTemplate,
    config: &FederationConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if shards.len() != config.n_clients {
        return Err(Error::Config(format!(
            "{} shards for num_clients = {}",
            shards.len(),
            config.n_clients
        )));
    }
    if let Some(s) = shards.iter().find(|s| s.is_empty()) {
        return Err(Error::InsufficientSamples(format!("client {} has an empty shard", s.client_id())));
    }
    for s in shards.iter_mut() {
        s.reseed(config.seed);
    }
    let schedule = make_schedule(config.iterations, config.n_clients, &mut stream(config.seed, tag::SCHEDULE))?;
    let mut params = ModelParams::random(template.parameter_count(), &mut stream(config.seed, tag::INIT));
    let mut adam = AdamState::new(params.len());
    let evaluator = Evaluator {
        template,
        train_subset: &[],
        validation,
        backend: config.backend,
        eval_every: config.eval_every,
        iterations: config.iterations,
        started: Instant::now(),
        record_wallclock: config.record_wallclock,
    };
    let total: usize = shards.iter().map(ClientShard::len).sum();
    let mut history = Vec::with_capacity(config.iterations);
    for (step, &client) in schedule.iter().enumerate() {
        let iteration = step + 1;
        let mu = config.mu_for(client);
        let req = UploadRequest {
            batch_size: config.batch_size,
            gradient_method: config.gradient_method,
            backend: config.backend,
            clip_bound: config.clip_bound,
            clip_mode: config.clip_mode,
            mu,
            noise: config.noise,
        };
        let upload = shards[client].upload(template, &params, &req)?;
        adam_step(&mut params, &upload.gradient, &mut adam, config.learning_rate)?;
        let mut rec = evaluator.record(iteration, upload.loss, &params)?;
        if iteration % config.eval_every == 0 || iteration == config.iterations {
            let mut correct = 0;
            for s in shards.iter() {
                correct += s.correct_count(template, &params, config.backend)?;
            }
            rec.train_acc = Some(correct as f64 / total as f64);
        }
        rec.client_id = Some(client);
        rec.mu_used = Some(mu);
        history.push(rec);
    }
    Ok(TrainOutcome { params, history })
}
