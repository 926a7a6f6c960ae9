//! Small feed-forward reference classifier trained with the same loss and
//! optimizer as the quantum model.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_update, AdamState};
use super::model::{argmax, cross_entropy};
use super::train::{History, HistoryRecord};
use crate::error::{Error, Result};
use crate::rng::{stream, tag};

/// Dense real features with a class index.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSample {
    pub features: Vec<f64>,
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub hidden: [usize; 2],
    pub learning_rate: f64,
    pub iterations: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub eval_every: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            hidden: [64, 32],
            learning_rate: 0.005,
            iterations: 300,
            batch_size: 50,
            seed: 0,
            eval_every: 10,
        }
    }
}

/// `input → tanh → tanh → softmax` network with weights stored flat,
/// layer by layer, each layer as a row-major `out × in` matrix then biases.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

impl Mlp {
    /// Xavier-uniform weights, zero biases.
    pub fn new(sizes: &[usize], rng: &mut impl Rng) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::InvalidArgument(format!("bad layer sizes {sizes:?}")));
        }
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            let limit = (6.0 / (n_in + n_out) as f64).sqrt();
            params.extend((0..n_in * n_out).map(|_| rng.random_range(-limit..limit)));
            params.extend(std::iter::repeat_n(0.0, n_out));
        }
        Ok(Mlp {
            sizes: sizes.to_vec(),
            params,
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.params.len()
    }

    /// Activations of every layer; the last entry is the softmax output.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let mut offset = 0;
        let n_layers = self.sizes.len() - 1;
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &self.params[offset..offset + n_in * n_out];
            let bias = &self.params[offset + n_in * n_out..offset + n_in * n_out + n_out];
            offset += n_in * n_out + n_out;
            let prev = acts.last().unwrap();
            let mut z: Vec<f64> = (0..n_out)
                .map(|o| bias[o] + weights[o * n_in..(o + 1) * n_in].iter().zip(prev).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            if l + 1 < n_layers {
                z.iter_mut().for_each(|v| *v = v.tanh());
            } else {
                let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                z.iter_mut().for_each(|v| *v = (*v - m).exp());
                let s: f64 = z.iter().sum();
                z.iter_mut().for_each(|v| *v /= s);
            }
            acts.push(z);
        }
        acts
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.sizes[0] {
            return Err(Error::DimensionMismatch {
                expected: self.sizes[0],
                actual: x.len(),
            });
        }
        Ok(self.activations(x).pop().unwrap())
    }

    pub fn accuracy(&self, samples: &[DenseSample]) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::InsufficientSamples("empty dataset".into()));
        }
        let mut correct = 0;
        for s in samples {
            if argmax(&self.predict_proba(&s.features)?) == s.class {
                correct += 1;
            }
        }
        Ok(correct as f64 / samples.len() as f64)
    }

    /// Adds the cross-entropy gradient for one sample into `grad`; returns
    /// the loss.
    fn backprop(&self, s: &DenseSample, grad: &mut [f64]) -> Result<f64> {
        let acts = self.activations(&s.features);
        let out = acts.last().unwrap();
        let mut onehot = vec![0.0; out.len()];
        onehot[s.class] = 1.0;
        let loss = cross_entropy(out, &onehot)?;
        // softmax + cross-entropy: dL/dz = p - a
        let mut delta: Vec<f64> = out.iter().zip(&onehot).map(|(p, a)| p - a).collect();
        let mut offsets = Vec::new();
        let mut offset = 0;
        for w in self.sizes.windows(2) {
            offsets.push(offset);
            offset += w[0] * w[1] + w[1];
        }
        for l in (0..self.sizes.len() - 1).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let off = offsets[l];
            let prev = &acts[l];
            for o in 0..n_out {
                let row = &mut grad[off + o * n_in..off + (o + 1) * n_in];
                for (g, a) in row.iter_mut().zip(prev) {
                    *g += delta[o] * a;
                }
                grad[off + n_in * n_out + o] += delta[o];
            }
            if l > 0 {
                let weights = &self.params[off..off + n_in * n_out];
                delta = (0..n_in)
                    .map(|i| {
                        let back: f64 = (0..n_out).map(|o| weights[o * n_in + i] * delta[o]).sum();
                        back * (1.0 - prev[i] * prev[i])
                    })
                    .collect();
            }
        }
        Ok(loss)
    }
}

/// Trains an `input → hidden[0] → hidden[1] → classes` network with Adam on
/// mini-batch cross-entropy.
pub fn train_classical_baseline(
    train: &[DenseSample],
    validation: &[DenseSample],
    n_classes: usize,
    config: &BaselineConfig,
) -> Result<(Mlp, History)> {
    let first = train
        .first()
        .ok_or_else(|| Error::InsufficientSamples("empty training set".into()))?;
    let dim = first.features.len();
    if let Some(bad) = train.iter().chain(validation).find(|s| s.features.len() != dim || s.class >= n_classes) {
        return Err(Error::InvalidArgument(format!(
            "sample with {} features and class {} does not fit a {dim}-feature, {n_classes}-class model",
            bad.features.len(),
            bad.class
        )));
    }
    if config.batch_size == 0 || config.eval_every == 0 {
        return Err(Error::InvalidArgument("batch_size and eval_every must be positive".into()));
    }
    let mut rng = stream(config.seed, tag::BASELINE);
    let mut mlp = Mlp::new(&[dim, config.hidden[0], config.hidden[1], n_classes], &mut rng)?;
    let mut adam = AdamState::new(mlp.parameter_count());
    let mut history = Vec::with_capacity(config.iterations);
    for iteration in 1..=config.iterations {
        let k = config.batch_size.min(train.len());
        let idx = sample_indices(&mut rng, train.len(), k);
        let mut grad = vec![0.0; mlp.parameter_count()];
        let mut loss = 0.0;
        for i in idx {
            loss += mlp.backprop(&train[i], &mut grad)?;
        }
        grad.iter_mut().for_each(|g| *g /= k as f64);
        adam_update(&mut mlp.params, &grad, &mut adam, config.learning_rate)?;
        let due = iteration % config.eval_every == 0 || iteration == config.iterations;
        history.push(HistoryRecord {
            iteration,
            loss: loss / k as f64,
            train_acc: if due { Some(mlp.accuracy(train)?) } else { None },
            val_acc: if due && !validation.is_empty() {
                Some(mlp.accuracy(validation)?)
            } else {
                None
            },
            wallclock_ms: None,
            client_id: None,
            mu_used: None,
        });
    }
    Ok((mlp, history))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor() -> Vec<DenseSample> {
        [([0.0, 0.0], 0), ([0.0, 1.0], 1), ([1.0, 0.0], 1), ([1.0, 1.0], 0)]
            .iter()
            .map(|(f, c)| DenseSample {
                features: f.to_vec(),
                class: *c,
            })
            .collect()
    }

    #[test]
    fn learns_xor() {
        let cfg = BaselineConfig {
            hidden: [8, 8],
            learning_rate: 0.05,
            iterations: 400,
            batch_size: 4,
            seed: 3,
            eval_every: 50,
        };
        let (mlp, hist) = train_classical_baseline(&xor(), &[], 2, &cfg).unwrap();
        assert_eq!(mlp.accuracy(&xor()).unwrap(), 1.0);
        assert_eq!(hist.len(), 400);
    }

    #[test]
    fn backprop_matches_finite_differences() {
        let mut rng = stream(5, 0);
        let mlp = Mlp::new(&[3, 4, 3, 2], &mut rng).unwrap();
        let s = DenseSample {
            features: vec![0.3, -0.7, 1.1],
            class: 1,
        };
        let mut grad = vec![0.0; mlp.parameter_count()];
        mlp.backprop(&s, &mut grad).unwrap();
        let h = 1e-6;
        for j in 0..mlp.parameter_count() {
            let mut p = mlp.clone();
            p.params[j] += h;
            let mut d = vec![0.0; grad.len()];
            let up = p.backprop(&s, &mut d).unwrap();
            p.params[j] -= 2.0 * h;
            let down = p.backprop(&s, &mut d).unwrap();
            assert!(((up - down) / (2.0 * h) - grad[j]).abs() < 1e-6);
        }
    }
}
