use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::loss::{attack_loss, input_gradient_in, sample_gradient, InputGradMethod};
use crate::error::{Error, Result};
use crate::federated::{add_noise_with, clip_with, ClipMode, NoiseKind};
use crate::quantum::Statevector;
use crate::vqc::{adam_update, AdamState, ClassifierTemplate, GradientVector, ModelParams};

/// Coordinates the attacker optimizes over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateDomain {
    /// Real amplitudes only. Amplitude-encoded classical data is real.
    #[default]
    Real,
    /// Real and imaginary parts of every amplitude.
    Complex,
}

impl CandidateDomain {
    pub fn tag(&self) -> &'static str {
        match self {
            CandidateDomain::Real => "real",
            CandidateDomain::Complex => "complex",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "real" => Some(CandidateDomain::Real),
            "complex" => Some(CandidateDomain::Complex),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub iterations: usize,
    pub learning_rate: f64,
    /// One-hot labels to try.
    pub candidate_labels: Vec<Vec<f64>>,
    pub input_grad_method: InputGradMethod,
    pub domain: CandidateDomain,
}

impl AttackConfig {
    /// Every one-hot label over `n_classes`.
    pub fn all_labels(n_classes: usize, iterations: usize, learning_rate: f64, method: InputGradMethod) -> Self {
        let candidate_labels = (0..n_classes)
            .map(|k| (0..n_classes).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
            .collect();
        AttackConfig {
            iterations,
            learning_rate,
            candidate_labels,
            input_grad_method: method,
            domain: CandidateDomain::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("attack needs at least one iteration".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("attack learning rate {}", self.learning_rate)));
        }
        if self.candidate_labels.is_empty() {
            return Err(Error::Config("no candidate labels".into()));
        }
        for (i, a) in self.candidate_labels.iter().enumerate() {
            if self.candidate_labels[..i].contains(a) {
                return Err(Error::Config(format!("candidate label {a:?} repeated")));
            }
        }
        Ok(())
    }
}

/// Optimization outcome for one candidate label.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelRun {
    pub label: Vec<f64>,
    pub state: Statevector,
    pub final_loss: f64,
    /// `L_GA` before each update and after the last.
    pub loss_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackResult {
    pub recovered_state: Statevector,
    pub recovered_label: Vec<f64>,
    pub final_loss: f64,
    /// Every candidate, in configuration order.
    pub runs: Vec<LabelRun>,
    pub fidelity_vs_truth: Option<f64>,
}

impl AttackResult {
    /// `(label, final loss)` for every candidate.
    pub fn per_label_losses(&self) -> Vec<(Vec<f64>, f64)> {
        self.runs.iter().map(|r| (r.label.clone(), r.final_loss)).collect()
    }
}

/// `|⟨a|b⟩|²`
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64> {
    Ok(crate::quantum::fidelity(a, b)?.clamp(0.0, 1.0))
}

fn pack(s: &[Complex64], domain: CandidateDomain) -> Vec<f64> {
    match domain {
        CandidateDomain::Real => s.iter().map(|z| z.re).collect(),
        CandidateDomain::Complex => s.iter().map(|z| z.re).chain(s.iter().map(|z| z.im)).collect(),
    }
}

fn unpack(x: &[f64], domain: CandidateDomain) -> Result<Statevector> {
    match domain {
        CandidateDomain::Real => Statevector::normalized(x.iter().map(|&v| Complex64::new(v, 0.0)).collect()),
        CandidateDomain::Complex => {
            let d = x.len() / 2;
            Statevector::normalized((0..d).map(|j| Complex64::new(x[j], x[d + j])).collect())
        }
    }
}

/// Gradient matching for one label: Adam on the amplitude coordinates,
/// renormalizing after every step.
pub fn attack_label(
    template: &ClassifierTemplate,
    params: &ModelParams,
    target: &GradientVector,
    label: &[f64],
    config: &AttackConfig,
) -> Result<LabelRun> {
    let dim = 1usize << template.n_qubits();
    let mut state = Statevector::normalized(vec![Complex64::new(1.0, 0.0); dim])?;
    let domain = config.domain;
    let imag = domain == CandidateDomain::Complex;
    let mut x = pack(state.amplitudes(), domain);
    let mut adam = AdamState::new(x.len());
    let mut loss_trace = Vec::with_capacity(config.iterations + 1);
    for _ in 0..config.iterations {
        loss_trace.push(attack_loss(template, &state, label, params, target)?);
        let g = input_gradient_in(template, &state, label, params, target, config.input_grad_method, imag)?;
        adam_update(&mut x, &pack(&g, domain), &mut adam, config.learning_rate)?;
        state = unpack(&x, domain)?;
        x = pack(state.amplitudes(), domain);
    }
    let final_loss = attack_loss(template, &state, label, params, target)?;
    loss_trace.push(final_loss);
    Ok(LabelRun {
        label: label.to_vec(),
        state,
        final_loss,
        loss_trace,
    })
}

/// Runs [`attack_label`] for every candidate and keeps the one with the
/// smallest final loss. Ties go to the earlier candidate.
pub fn run_attack(
    template: &ClassifierTemplate,
    params: &ModelParams,
    target: &GradientVector,
    config: &AttackConfig,
    truth: Option<&Statevector>,
) -> Result<AttackResult> {
    config.validate()?;
    template.check_params(params)?;
    if target.len() != params.len() {
        return Err(Error::DimensionMismatch {
            expected: params.len(),
            actual: target.len(),
        });
    }
    let runs = config
        .candidate_labels
        .iter()
        .map(|label| attack_label(template, params, target, label, config))
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.final_loss.total_cmp(&b.1.final_loss).then(a.0.cmp(&b.0)))
        .map(|(_, r)| r.clone())
        .expect("at least one candidate");
    let fidelity_vs_truth = truth.map(|t| fidelity(&best.state, t)).transpose()?;
    Ok(AttackResult {
        recovered_state: best.state,
        recovered_label: best.label,
        final_loss: best.final_loss,
        runs,
        fidelity_vs_truth,
    })
}

/// Privacy step applied to a victim's upload.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Defense {
    pub clip_bound: f64,
    pub clip_mode: ClipMode,
    pub mu: f64,
    pub noise: NoiseKind,
}

/// What a client with one sample would upload: the single-sample gradient,
/// optionally clipped and noised.
pub fn victim_upload(
    template: &ClassifierTemplate,
    params: &ModelParams,
    input: &Statevector,
    label: &[f64],
    defense: Option<Defense>,
    rng: &mut impl Rng,
) -> Result<GradientVector> {
    let g = sample_gradient(template, params, input, label)?;
    match defense {
        None => Ok(g),
        Some(d) => {
            let clipped = clip_with(&g, d.clip_bound, d.clip_mode)?;
            add_noise_with(&clipped, d.clip_bound, d.mu, d.noise, rng)
        }
    }
}
