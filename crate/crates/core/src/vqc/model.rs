use serde::{Deserialize, Serialize};

use super::template::{ClassifierTemplate, ModelParams};
use crate::encoding::prepare_state;
use crate::error::{Error, Result};
use crate::mbqc::EvalMode;
use crate::quantum::Statevector;

/// Probabilities below this are clamped before taking logs.
pub const LOG_CLAMP: f64 = 1e-12;

/// Input state with a one-hot label.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSample {
    pub input: Statevector,
    label: Vec<f64>,
}

impl LabeledSample {
    pub fn new(input: Statevector, label: Vec<f64>) -> Result<Self> {
        let ones = label.iter().filter(|&&v| v == 1.0).count();
        let zeros = label.iter().filter(|&&v| v == 0.0).count();
        if ones != 1 || ones + zeros != label.len() {
            return Err(Error::InvalidArgument(format!("label {label:?} is not one-hot")));
        }
        Ok(LabeledSample { input, label })
    }

    pub fn from_class(input: Statevector, class: usize, n_classes: usize) -> Result<Self> {
        if class >= n_classes {
            return Err(Error::InvalidArgument(format!(
                "class {class} out of range for {n_classes} classes"
            )));
        }
        let mut label = vec![0.0; n_classes];
        label[class] = 1.0;
        Ok(LabeledSample { input, label })
    }

    pub fn label(&self) -> &[f64] {
        &self.label
    }

    pub fn class(&self) -> usize {
        self.label.iter().position(|&v| v == 1.0).unwrap_or(0)
    }
}

/// `∂L/∂Θ`, one entry per parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientVector {
    pub values: Vec<f64>,
}

impl GradientVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite gradient entry {v}")));
        }
        Ok(GradientVector { values })
    }

    pub fn zeros(n: usize) -> Self {
        GradientVector { values: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Where the classifier circuit is executed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    /// Statevector simulation of the gate circuit.
    Direct,
    /// Compiled to a brickwork pattern and evaluated locally.
    Mbqc(EvalMode),
    /// Compiled, then delegated blindly through the client/server protocol.
    Ubqc(EvalMode),
}

impl Backend {
    pub fn tag(&self) -> &'static str {
        match self {
            Backend::Direct => "direct",
            Backend::Mbqc(_) => "mbqc",
            Backend::Ubqc(_) => "ubqc",
        }
    }
}

fn check_input(template: &ClassifierTemplate, sample: &LabeledSample) -> Result<()> {
    if sample.input.n_qubits() != template.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: template.n_qubits(),
            actual: sample.input.n_qubits(),
        });
    }
    if sample.label.len() != template.n_outcomes() {
        return Err(Error::DimensionMismatch {
            expected: template.n_outcomes(),
            actual: sample.label.len(),
        });
    }
    Ok(())
}

/// Output state `U(Θ)|ψ⟩` on the direct backend.
pub fn output_state(template: &ClassifierTemplate, params: &ModelParams, input: &Statevector) -> Result<Statevector> {
    template.check_params(params)?;
    if input.n_qubits() != template.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: template.n_qubits(),
            actual: input.n_qubits(),
        });
    }
    let mut state = input.clone();
    template.apply(&mut state, &params.theta);
    Ok(state)
}

/// Readout distribution `g` on the direct backend.
pub fn forward(template: &ClassifierTemplate, params: &ModelParams, sample: &LabeledSample) -> Result<Vec<f64>> {
    forward_with(template, params, sample, Backend::Direct)
}

/// Readout distribution `g` on the chosen backend.
pub fn forward_with(
    template: &ClassifierTemplate,
    params: &ModelParams,
    sample: &LabeledSample,
    backend: Backend,
) -> Result<Vec<f64>> {
    check_input(template, sample)?;
    match backend {
        Backend::Direct => output_state(template, params, &sample.input)?.readout_distribution(template.readout()),
        Backend::Mbqc(mode) | Backend::Ubqc(mode) => {
            let prep = prepare_state(&sample.input)?;
            let full = prep.circuit.then(&template.circuit(params)?)?;
            if matches!(backend, Backend::Mbqc(_)) {
                crate::mbqc::circuit_distribution(&full, template.readout(), mode)
            } else {
                crate::ubqc::delegated_distribution(&full, template.readout(), mode, &Default::default())
            }
        }
    }
}

/// `-Σ_k a_k ln max(g_k, 1e-12)`
pub fn cross_entropy(g: &[f64], a: &[f64]) -> Result<f64> {
    if g.len() != a.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: g.len(),
        });
    }
    Ok(g.iter()
        .zip(a)
        .filter(|(_, &ak)| ak != 0.0)
        .map(|(&gk, &ak)| -ak * gk.max(LOG_CLAMP).ln())
        .sum())
}

/// Index of the largest entry; ties go to the lower index.
pub fn argmax(g: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in g.iter().enumerate() {
        if v > g[best] {
            best = k;
        }
    }
    best
}

pub fn predict(template: &ClassifierTemplate, params: &ModelParams, sample: &LabeledSample) -> Result<usize> {
    Ok(argmax(&forward(template, params, sample)?))
}

/// Fraction of samples whose argmax prediction matches the label.
pub fn evaluate(template: &ClassifierTemplate, params: &ModelParams, samples: &[LabeledSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples("cannot evaluate on an empty dataset".into()));
    }
    let mut correct = 0usize;
    for s in samples {
        if predict(template, params, s)? == s.class() {
            correct += 1;
        }
    }
    Ok(correct as f64 / samples.len() as f64)
}

/// Mean cross-entropy over `samples`.
pub fn mean_loss(template: &ClassifierTemplate, params: &ModelParams, samples: &[LabeledSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples("empty batch".into()));
    }
    let mut total = 0.0;
    for s in samples {
        total += cross_entropy(&forward(template, params, s)?, s.label())?;
    }
    Ok(total / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vqc::build_classifier;

    #[test]
    fn cross_entropy_examples() {
        assert_eq!(cross_entropy(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        let l = cross_entropy(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
        let l = cross_entropy(&[0.25, 0.75], &[0.0, 1.0]).unwrap();
        assert!((l - 0.287_682_072_451_780_9).abs() < 1e-12);
        let l = cross_entropy(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((l - 27.631_021_115_928_547).abs() < 1e-9);
    }

    #[test]
    fn zero_params_on_zero_state() {
        let t = build_classifier(3, 2, &[0]).unwrap();
        let s = LabeledSample::from_class(Statevector::zero(3).unwrap(), 0, 2).unwrap();
        let g = forward(&t, &ModelParams::zeros(t.parameter_count()), &s).unwrap();
        assert_eq!(g, vec![1.0, 0.0]);
    }

    #[test]
    fn label_must_be_one_hot() {
        let s = Statevector::zero(1).unwrap();
        assert!(LabeledSample::new(s.clone(), vec![0.5, 0.5]).is_err());
        assert!(LabeledSample::new(s.clone(), vec![1.0, 1.0]).is_err());
        assert!(LabeledSample::new(s, vec![0.0, 1.0]).is_ok());
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.2, 0.3, 0.3]), 1);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let t = build_classifier(2, 1, &[0]).unwrap();
        let s = LabeledSample::from_class(Statevector::zero(3).unwrap(), 0, 2).unwrap();
        assert!(forward(&t, &ModelParams::zeros(4), &s).is_err());
    }
}
