use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::Statevector;
use crate::vqc::{
    adjoint_sample_gradient, apply_op, apply_op_inverse, output_state, Axis, ClassifierTemplate, GradientVector,
    LabeledSample, ModelParams, Op, LOG_CLAMP,
};

/// How `∇_in L_GA` is computed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum InputGradMethod {
    /// Central differences on every real coordinate, renormalizing each
    /// probe.
    CentralFiniteDifference { step: f64 },
    /// Closed form by forward and reverse sweeps.
    Analytic,
}

impl Default for InputGradMethod {
    fn default() -> Self {
        InputGradMethod::CentralFiniteDifference { step: 1e-4 }
    }
}

/// Parameter gradient of the loss on a single sample.
pub fn sample_gradient(
    template: &ClassifierTemplate,
    params: &ModelParams,
    input: &Statevector,
    label: &[f64],
) -> Result<GradientVector> {
    template.check_params(params)?;
    let sample = LabeledSample::new(input.clone(), label.to_vec())?;
    let mut g = vec![0.0; params.len()];
    adjoint_sample_gradient(template, params, &sample, &mut g)?;
    GradientVector::new(g)
}

fn check_target(params: &ModelParams, target: &GradientVector) -> Result<()> {
    if target.len() != params.len() {
        return Err(Error::DimensionMismatch {
            expected: params.len(),
            actual: target.len(),
        });
    }
    Ok(())
}

/// `L_GA = ‖∇_Θ L(h(candidate; Θ), label) − target‖²`.
pub fn attack_loss(
    template: &ClassifierTemplate,
    candidate: &Statevector,
    label: &[f64],
    params: &ModelParams,
    target: &GradientVector,
) -> Result<f64> {
    check_target(params, target)?;
    let g = sample_gradient(template, params, candidate, label)?;
    Ok(g.values.iter().zip(&target.values).map(|(a, b)| (a - b).powi(2)).sum())
}

/// `∂L_GA/∂Re a_j` and `∂L_GA/∂Im a_j`, packed as `re + i·im` per
/// amplitude.
pub fn input_gradient(
    template: &ClassifierTemplate,
    candidate: &Statevector,
    label: &[f64],
    params: &ModelParams,
    target: &GradientVector,
    method: InputGradMethod,
) -> Result<Vec<Complex64>> {
    input_gradient_in(template, candidate, label, params, target, method, true)
}

/// As [`input_gradient`]; with `imag` false the imaginary parts are not
/// probed and come back zero.
pub(crate) fn input_gradient_in(
    template: &ClassifierTemplate,
    candidate: &Statevector,
    label: &[f64],
    params: &ModelParams,
    target: &GradientVector,
    method: InputGradMethod,
    imag: bool,
) -> Result<Vec<Complex64>> {
    match method {
        InputGradMethod::CentralFiniteDifference { step } => {
            finite_difference(template, candidate, label, params, target, step, imag)
        }
        InputGradMethod::Analytic => {
            let mut g = analytic(template, candidate, label, params, target)?;
            if !imag {
                g.iter_mut().for_each(|z| z.im = 0.0);
            }
            Ok(g)
        }
    }
}

fn finite_difference(
    template: &ClassifierTemplate,
    candidate: &Statevector,
    label: &[f64],
    params: &ModelParams,
    target: &GradientVector,
    step: f64,
    imag: bool,
) -> Result<Vec<Complex64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step {step}")));
    }
    check_target(params, target)?;
    let base = candidate.amplitudes().to_vec();
    let probe = |j: usize, d: Complex64| -> Result<f64> {
        let mut a = base.clone();
        a[j] += d;
        let l = attack_loss(template, &Statevector::normalized(a)?, label, params, target)?;
        if !l.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite attack loss probing amplitude {j}")));
        }
        Ok(l)
    };
    let mut out = Vec::with_capacity(base.len());
    for j in 0..base.len() {
        let re = (probe(j, Complex64::new(step, 0.0))? - probe(j, Complex64::new(-step, 0.0))?) / (2.0 * step);
        let im = if imag {
            (probe(j, Complex64::new(0.0, step))? - probe(j, Complex64::new(0.0, -step))?) / (2.0 * step)
        } else {
            0.0
        };
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn add_generator(dst: &mut Statevector, src: &Statevector, qubit: usize, axis: Axis, c: Complex64) {
    match axis {
        Axis::X => dst.add_x_scaled(src, qubit, c),
        Axis::Z => dst.add_z_scaled(src, qubit, c),
    }
}

fn zeros_like(s: &Statevector) -> Statevector {
    let mut z = s.clone();
    z.amps_mut().iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
    z
}

/// Keeps only amplitudes whose readout bits spell `class`.
fn project(state: &mut Statevector, readout: &[usize], class: usize) {
    let n = state.n_qubits();
    let masks: Vec<usize> = readout.iter().map(|&q| 1usize << (n - 1 - q)).collect();
    for (i, a) in state.amps_mut().iter_mut().enumerate() {
        let mut k = 0;
        for &m in &masks {
            k = (k << 1) | usize::from(i & m != 0);
        }
        if k != class {
            *a = Complex64::new(0.0, 0.0);
        }
    }
}

/// With one-hot class `k`, `G_j = −f_j/g` where `g = ⟨ψ|M|ψ⟩`,
/// `M = U†P_kU`, and `f_j = ⟨ψ|∂_jM|ψ⟩`. Then
/// `∂L/∂ψ̄ = −(2/g)·Σ_j c_j ∂_jM ψ + (2/g²)·(Σ_j c_j f_j)·Mψ` with
/// `c_j = G_j − t_j`, and the real-coordinate gradient is twice that.
/// `L_GA` is scale invariant, so the result is tangent to the sphere.
fn analytic(
    template: &ClassifierTemplate,
    candidate: &Statevector,
    label: &[f64],
    params: &ModelParams,
    target: &GradientVector,
) -> Result<Vec<Complex64>> {
    check_target(params, target)?;
    let sample = LabeledSample::new(candidate.clone(), label.to_vec())?;
    let class = sample.class();
    let theta = &params.theta;
    let mut grad = vec![0.0; params.len()];
    adjoint_sample_gradient(template, params, &sample, &mut grad)?;
    let out = output_state(template, params, candidate)?;
    let g = out.readout_distribution(template.readout())?[class];
    if g <= LOG_CLAMP {
        return Ok(vec![Complex64::new(0.0, 0.0); candidate.dim()]);
    }
    let c: Vec<f64> = grad.iter().zip(&target.values).map(|(a, b)| a - b).collect();
    let s: f64 = c.iter().zip(&grad).map(|(cj, gj)| cj * (-g * gj)).sum();
    let half_i = Complex64::new(0.0, 0.5);

    // w = Σ_j c_j ∂_jU ψ
    let mut phi = candidate.clone();
    let mut w = zeros_like(candidate);
    for op in template.ops() {
        apply_op(&mut phi, op, theta);
        apply_op(&mut w, op, theta);
        if let Op::Rot { qubit, axis, param } = *op {
            add_generator(&mut w, &phi, qubit, axis, -half_i * c[param]);
        }
    }
    // acc = Σ_j c_j (∂_jU)† P U ψ
    let mut a = out.clone();
    project(&mut a, template.readout(), class);
    let mut m_psi = a.clone();
    let mut acc = zeros_like(candidate);
    for op in template.ops().iter().rev() {
        apply_op_inverse(&mut a, op, theta);
        apply_op_inverse(&mut acc, op, theta);
        apply_op_inverse(&mut m_psi, op, theta);
        if let Op::Rot { qubit, axis, param } = *op {
            add_generator(&mut acc, &a, qubit, axis, half_i * c[param]);
        }
    }
    // U† P w
    project(&mut w, template.readout(), class);
    for op in template.ops().iter().rev() {
        apply_op_inverse(&mut w, op, theta);
    }
    let mut r: Vec<Complex64> = acc
        .amplitudes()
        .iter()
        .zip(w.amplitudes())
        .zip(m_psi.amplitudes())
        .map(|((x, y), m)| 2.0 * (-(2.0 / g) * (x + y) + (2.0 * s / (g * g)) * m))
        .collect();
    // Remove any radial residue left by rounding.
    let radial: f64 = candidate.amplitudes().iter().zip(&r).map(|(p, v)| (p.conj() * v).re).sum();
    for (v, p) in r.iter_mut().zip(candidate.amplitudes()) {
        *v -= radial * p;
    }
    Ok(r)
}
