use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{cross_entropy, forward_with, Backend, GradientVector, LabeledSample, LOG_CLAMP};
use super::template::{apply_op_inverse, Axis, ClassifierTemplate, ModelParams, Op};
use crate::error::{Error, Result};

/// How `∂L/∂Θ` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientMethod {
    /// Two shifted circuit evaluations per parameter, on any backend.
    ParameterShift,
    /// One forward and one reverse sweep over the statevector.
    Adjoint,
}

impl GradientMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            GradientMethod::ParameterShift => "parameter_shift",
            GradientMethod::Adjoint => "adjoint",
        }
    }
}

/// Batch-mean gradient by the parameter-shift rule on the direct backend.
pub fn gradient(template: &ClassifierTemplate, params: &ModelParams, batch: &[LabeledSample]) -> Result<GradientVector> {
    parameter_shift_gradient(template, params, batch, Backend::Direct)
}

/// Batch-mean gradient and loss with the chosen method.
pub fn gradient_with(
    template: &ClassifierTemplate,
    params: &ModelParams,
    batch: &[LabeledSample],
    method: GradientMethod,
) -> Result<(GradientVector, f64)> {
    match method {
        GradientMethod::Adjoint => adjoint_gradient(template, params, batch),
        GradientMethod::ParameterShift => {
            let g = parameter_shift_gradient(template, params, batch, Backend::Direct)?;
            let loss = super::model::mean_loss(template, params, batch)?;
            Ok((g, loss))
        }
    }
}

fn check_batch(template: &ClassifierTemplate, params: &ModelParams, batch: &[LabeledSample]) -> Result<()> {
    template.check_params(params)?;
    if batch.is_empty() {
        return Err(Error::InsufficientSamples("gradient of an empty batch".into()));
    }
    Ok(())
}

/// `∂g_k/∂θ_j = (g_k(θ_j + π/2) − g_k(θ_j − π/2)) / 2`, chained with
/// `∂L/∂g_k = −a_k / g_k`.
pub fn parameter_shift_gradient(
    template: &ClassifierTemplate,
    params: &ModelParams,
    batch: &[LabeledSample],
    backend: Backend,
) -> Result<GradientVector> {
    check_batch(template, params, batch)?;
    let n = params.len();
    let mut grad = vec![0.0; n];
    let mut shifted = params.clone();
    let half_pi = std::f64::consts::FRAC_PI_2;
    for sample in batch {
        let g = forward_with(template, params, sample, backend)?;
        let dl_dg: Vec<f64> = g
            .iter()
            .zip(sample.label())
            .map(|(&gk, &ak)| if gk > LOG_CLAMP { -ak / gk } else { 0.0 })
            .collect();
        for j in 0..n {
            let theta = params.theta[j];
            shifted.theta[j] = theta + half_pi;
            let plus = forward_with(template, &shifted, sample, backend)?;
            shifted.theta[j] = theta - half_pi;
            let minus = forward_with(template, &shifted, sample, backend)?;
            shifted.theta[j] = theta;
            let d: f64 = (0..g.len()).map(|k| dl_dg[k] * (plus[k] - minus[k]) / 2.0).sum();
            grad[j] += d;
        }
    }
    let m = batch.len() as f64;
    GradientVector::new(grad.into_iter().map(|v| v / m).collect())
}

/// Per-sample gradient and loss by reverse-mode sweep.
///
/// With `λ = O·ψ`, `O = Σ_k (−a_k/g_k)·P_k`, each rotation `exp(−iθG/2)`
/// contributes `Im⟨λ_j|G|φ_j⟩`, where `φ_j`, `λ_j` are both pulled back to
/// just after gate `j`.
pub fn adjoint_sample_gradient(
    template: &ClassifierTemplate,
    params: &ModelParams,
    sample: &LabeledSample,
    out: &mut [f64],
) -> Result<f64> {
    let psi = super::model::output_state(template, params, &sample.input)?;
    let g = psi.readout_distribution(template.readout())?;
    let loss = cross_entropy(&g, sample.label())?;
    let coef: Vec<f64> = g
        .iter()
        .zip(sample.label())
        .map(|(&gk, &ak)| if gk > LOG_CLAMP { -ak / gk } else { 0.0 })
        .collect();
    let n = template.n_qubits();
    let readout_masks: Vec<usize> = template.readout().iter().map(|&q| 1usize << (n - 1 - q)).collect();
    let mut lambda = psi.clone();
    for (i, a) in lambda.amps_mut().iter_mut().enumerate() {
        let mut k = 0;
        for &m in &readout_masks {
            k = (k << 1) | usize::from(i & m != 0);
        }
        *a *= coef[k];
    }
    let mut phi = psi;
    for op in template.ops().iter().rev() {
        if let Op::Rot { qubit, axis, param } = *op {
            let overlap: Complex64 = match axis {
                Axis::X => lambda.x_overlap(&phi, qubit),
                Axis::Z => lambda.z_overlap(&phi, qubit),
            };
            out[param] += overlap.im;
        }
        apply_op_inverse(&mut phi, op, &params.theta);
        apply_op_inverse(&mut lambda, op, &params.theta);
    }
    Ok(loss)
}

/// Batch-mean gradient and loss by reverse-mode sweep on the direct backend.
pub fn adjoint_gradient(
    template: &ClassifierTemplate,
    params: &ModelParams,
    batch: &[LabeledSample],
) -> Result<(GradientVector, f64)> {
    check_batch(template, params, batch)?;
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    for sample in batch {
        loss += adjoint_sample_gradient(template, params, sample, &mut grad)?;
    }
    let m = batch.len() as f64;
    Ok((GradientVector::new(grad.into_iter().map(|v| v / m).collect())?, loss / m))
}
