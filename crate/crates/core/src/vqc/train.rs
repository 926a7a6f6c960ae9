use std::time::Instant;

use num_complex::Complex64;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamState};
use super::gradient::{gradient_with, parameter_shift_gradient, GradientMethod};
use super::model::{argmax, forward_with, Backend, GradientVector, LabeledSample};
use super::template::{ClassifierTemplate, ModelParams};
use crate::error::{Error, Result};
use crate::quantum::Statevector;
use crate::rng::{stream, tag};

/// Single-client training settings.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Accuracies are computed every `eval_every` iterations and at the last.
    pub eval_every: usize,
    /// Training accuracy uses the first `eval_subset` training samples.
    pub eval_subset: usize,
    /// Per-element input noise on training batches and on the evaluated sets.
    pub input_noise: f64,
    pub gradient_noise: f64,
    pub gradient_method: GradientMethod,
    pub backend: Backend,
    pub record_wallclock: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.01,
            iterations: 300,
            batch_size: 50,
            seed: 0,
            eval_every: 10,
            eval_subset: 500,
            input_noise: 0.0,
            gradient_noise: 0.0,
            gradient_method: GradientMethod::Adjoint,
            backend: Backend::Direct,
            record_wallclock: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be a finite non-negative number");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive");
        }
        if self.eval_every == 0 {
            return bad("eval_every must be positive");
        }
        if !(self.input_noise >= 0.0 && self.gradient_noise >= 0.0) {
            return bad("noise strengths must be non-negative");
        }
        Ok(())
    }
}

/// One line of a training history.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub iteration: usize,
    pub loss: f64,
    pub train_acc: Option<f64>,
    pub val_acc: Option<f64>,
    pub wallclock_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub client_id: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "mu_serde")]
    pub mu_used: Option<f64>,
}

/// `μ = ∞` is written as the string `"inf"`.
mod mu_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(mu: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match mu {
            Some(v) if v.is_infinite() => s.serialize_str("inf"),
            Some(v) => s.serialize_f64(*v),
            None => s.serialize_none(),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<Raw>::deserialize(d)? {
            None => Ok(None),
            Some(Raw::Num(v)) => Ok(Some(v)),
            Some(Raw::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
            Some(Raw::Text(t)) => Err(serde::de::Error::custom(format!("bad mu {t:?}"))),
        }
    }
}

pub type History = Vec<HistoryRecord>;

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub history: History,
}

/// Accuracy on `samples` using `backend`.
pub fn evaluate_with(
    template: &ClassifierTemplate,
    params: &ModelParams,
    samples: &[LabeledSample],
    backend: Backend,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples("cannot evaluate on an empty dataset".into()));
    }
    let mut correct = 0usize;
    for s in samples {
        if argmax(&forward_with(template, params, s, backend)?) == s.class() {
            correct += 1;
        }
    }
    Ok(correct as f64 / samples.len() as f64)
}

/// Adds `N(0, σ²)` to the real part of every amplitude and renormalizes.
pub fn perturb_input(sample: &LabeledSample, sigma: f64, rng: &mut impl Rng) -> Result<LabeledSample> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!("input noise {sigma} is negative")));
    }
    if sigma == 0.0 {
        return Ok(sample.clone());
    }
    let amps: Vec<Complex64> = sample
        .input
        .amplitudes()
        .iter()
        .map(|a| {
            let z: f64 = StandardNormal.sample(rng);
            Complex64::new(a.re + sigma * z, a.im)
        })
        .collect();
    LabeledSample::new(Statevector::normalized(amps)?, sample.label().to_vec())
}

/// Adds `scale·N(0, 1)` to every entry.
pub fn perturb_gradient(grad: &GradientVector, scale: f64, rng: &mut impl Rng) -> Result<GradientVector> {
    if !(scale >= 0.0) {
        return Err(Error::InvalidArgument(format!("gradient noise {scale} is negative")));
    }
    if scale == 0.0 {
        return Ok(grad.clone());
    }
    let values = grad
        .values
        .iter()
        .map(|v| {
            let z: f64 = StandardNormal.sample(rng);
            v + scale * z
        })
        .collect();
    GradientVector::new(values)
}

/// Draws `batch_size` distinct samples (all of them if fewer).
pub(crate) fn draw_batch(samples: &[LabeledSample], batch_size: usize, rng: &mut impl Rng) -> Vec<LabeledSample> {
    let k = batch_size.min(samples.len());
    sample_indices(rng, samples.len(), k)
        .into_iter()
        .map(|i| samples[i].clone())
        .collect()
}

/// Batch gradient and loss on `backend`.
pub(crate) fn batch_gradient(
    template: &ClassifierTemplate,
    params: &ModelParams,
    batch: &[LabeledSample],
    method: GradientMethod,
    backend: Backend,
) -> Result<(GradientVector, f64)> {
    match backend {
        Backend::Direct => gradient_with(template, params, batch, method),
        other => {
            let g = parameter_shift_gradient(template, params, batch, other)?;
            let mut loss = 0.0;
            for s in batch {
                loss += super::model::cross_entropy(&forward_with(template, params, s, other)?, s.label())?;
            }
            Ok((g, loss / batch.len() as f64))
        }
    }
}

/// Evaluation bookkeeping shared by single-client and federated loops.
pub(crate) struct Evaluator<'a> {
    pub template: &'a ClassifierTemplate,
    pub train_subset: &'a [LabeledSample],
    pub validation: &'a [LabeledSample],
    pub backend: Backend,
    pub eval_every: usize,
    pub iterations: usize,
    pub started: Instant,
    pub record_wallclock: bool,
}

impl Evaluator<'_> {
    pub fn record(&self, iteration: usize, loss: f64, params: &ModelParams) -> Result<HistoryRecord> {
        let due = iteration % self.eval_every == 0 || iteration == self.iterations;
        let acc = |set: &[LabeledSample]| -> Result<Option<f64>> {
            if due && !set.is_empty() {
                Ok(Some(evaluate_with(self.template, params, set, self.backend)?))
            } else {
                Ok(None)
            }
        };
        Ok(HistoryRecord {
            iteration,
            loss,
            train_acc: acc(self.train_subset)?,
            val_acc: acc(self.validation)?,
            wallclock_ms: self
                .record_wallclock
                .then(|| self.started.elapsed().as_secs_f64() * 1e3),
            client_id: None,
            mu_used: None,
        })
    }
}

/// Mini-batch Adam training of `template` on `train`, validated on
/// `validation`. Deterministic given `config.seed`.
pub fn train_single(
    train: &[LabeledSample],
    validation: &[LabeledSample],
    template: &ClassifierTemplate,
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::InsufficientSamples("empty training set".into()));
    }
    let mut init_rng = stream(config.seed, tag::INIT);
    let mut batch_rng = stream(config.seed, tag::CLIENT_BATCH);
    let mut input_rng = stream(config.seed, tag::INPUT_NOISE);
    let mut grad_rng = stream(config.seed, tag::GRADIENT_NOISE);
    let mut params = ModelParams::random(template.parameter_count(), &mut init_rng);
    let mut adam = AdamState::new(params.len());
    // Input noise models state preparation, so evaluated states carry it too:
    // one fixed draw per set, from its own stream.
    let mut eval_rng = stream(config.seed, tag::EVAL_NOISE);
    let mut noisy = |set: &[LabeledSample]| -> Result<Vec<LabeledSample>> {
        set.iter().map(|s| perturb_input(s, config.input_noise, &mut eval_rng)).collect()
    };
    let train_subset = noisy(&train[..config.eval_subset.min(train.len())])?;
    let validation = noisy(validation)?;
    let evaluator = Evaluator {
        template,
        train_subset: &train_subset,
        validation: &validation,
        backend: config.backend,
        eval_every: config.eval_every,
        iterations: config.iterations,
        started: Instant::now(),
        record_wallclock: config.record_wallclock,
    };
    let mut history = Vec::with_capacity(config.iterations);
    for iteration in 1..=config.iterations {
        let mut batch = draw_batch(train, config.batch_size, &mut batch_rng);
        if config.input_noise > 0.0 {
            batch = batch
                .iter()
                .map(|s| perturb_input(s, config.input_noise, &mut input_rng))
                .collect::<Result<_>>()?;
        }
        let (grad, loss) = batch_gradient(template, &params, &batch, config.gradient_method, config.backend)?;
        let grad = perturb_gradient(&grad, config.gradient_noise, &mut grad_rng)?;
        adam_step(&mut params, &grad, &mut adam, config.learning_rate)?;
        history.push(evaluator.record(iteration, loss, &params)?);
    }
    Ok(TrainOutcome { params, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_sigma_is_identity() {
        let s = LabeledSample::from_class(Statevector::zero(2).unwrap(), 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(perturb_input(&s, 0.0, &mut rng).unwrap(), s);
        let p = perturb_input(&s, 0.3, &mut rng).unwrap();
        assert!((p.input.norm_sqr() - 1.0).abs() < 1e-10);
        assert_eq!(p.label(), s.label());
    }

    #[test]
    fn history_round_trips_infinite_mu() {
        let r = HistoryRecord {
            iteration: 3,
            loss: 0.5,
            train_acc: None,
            val_acc: Some(0.75),
            wallclock_ms: None,
            client_id: Some(2),
            mu_used: Some(f64::INFINITY),
        };
        let line = serde_json::to_string(&r).unwrap();
        assert!(line.contains("\"mu_used\":\"inf\""));
        let back: HistoryRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
    }
}
