//! Classical data → quantum input.
//!
//! Amplitude encoding compiles a state-preparation circuit over
//! `{RX, RZ, CNOT}` with CNOTs only between adjacent wires. Preparation
//! runs as a cascade of uniformly controlled rotations: a multiplexed RY
//! per qubit sets the magnitudes (qubit 0 first), then multiplexed RZs set
//! the phases. Every multiplexor is lowered to rotations and CNOTs in Gray
//! code order, and CNOTs between distant wires are routed through SWAP
//! chains, each SWAP being three CNOTs.
//!
//! Gate count is bounded by `(12·n + 4)·2^n` for `n` qubits.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{fidelity, run_circuit, Circuit, Gate, Statevector};
use crate::vqc::{ClassifierTemplate, ModelParams};

/// A classical sample ready for encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub source_label: usize,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, source_label: usize) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite feature {v}")));
        }
        Ok(FeatureVector {
            values,
            source_label,
        })
    }

    /// Zero-pads to `len` at the tail, then L2-normalizes.
    pub fn padded_normalized(values: &[f64], len: usize, source_label: usize) -> Result<Self> {
        if values.len() > len {
            return Err(Error::DimensionOverflow {
                features: values.len(),
                capacity: len,
            });
        }
        let mut padded = values.to_vec();
        padded.resize(len, 0.0);
        let norm = l2_norm(&padded);
        if norm == 0.0 {
            return Err(Error::DegenerateVector);
        }
        padded.iter_mut().for_each(|v| *v /= norm);
        Self::new(padded, source_label)
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    /// The amplitude-encoded state, zero-padded to `2^n_qubits`.
    pub fn to_state(&self, n_qubits: usize) -> Result<Statevector> {
        let dim = 1usize << n_qubits;
        if self.values.len() > dim {
            return Err(Error::DimensionOverflow {
                features: self.values.len(),
                capacity: dim,
            });
        }
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized(norm));
        }
        let mut amps: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        amps.resize(dim, Complex64::new(0.0, 0.0));
        Statevector::from_amplitudes(amps)
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Compiled state preparation together with the fidelity it reaches on
/// `|0…0⟩`.
#[derive(Clone, Debug)]
pub struct PreparationCircuit {
    pub circuit: Circuit,
    pub target_fidelity_achieved: f64,
}

/// Compiles a circuit preparing the zero-padded `features` from `|0…0⟩`.
pub fn amplitude_encode(features: &FeatureVector, n_qubits: usize) -> Result<PreparationCircuit> {
    let target = features.to_state(n_qubits)?;
    prepare_state(&target)
}

/// Compiles a preparation circuit for an arbitrary (complex) target state.
pub fn prepare_state(target: &Statevector) -> Result<PreparationCircuit> {
    let n = target.n_qubits();
    let mut raw = Circuit::new(n);
    if n > 0 {
        magnitude_cascade(target, &mut raw)?;
        phase_cascade(target, &mut raw)?;
    }
    let circuit = route_adjacent(&raw)?;
    let prepared = run_circuit(&Statevector::zero(n)?, &circuit)?;
    let target_fidelity_achieved = fidelity(&prepared, target)?;
    Ok(PreparationCircuit {
        circuit,
        target_fidelity_achieved,
    })
}

fn magnitude_cascade(target: &Statevector, out: &mut Circuit) -> Result<()> {
    let n = target.n_qubits();
    // weights[k][p]: squared norm of the subtree with k-bit prefix p
    let mut weights = vec![Vec::new(); n + 1];
    weights[n] = target.probabilities();
    for k in (0..n).rev() {
        let next = &weights[k + 1];
        weights[k] = (0..1usize << k).map(|p| next[2 * p] + next[2 * p + 1]).collect();
    }
    for k in 0..n {
        let angles: Vec<f64> = (0..1usize << k)
            .map(|p| {
                let w0 = weights[k + 1][2 * p];
                let w1 = weights[k + 1][2 * p + 1];
                2.0 * w1.sqrt().atan2(w0.sqrt())
            })
            .collect();
        multiplexed_rotation(out, k, &angles, Axis::Y)?;
    }
    Ok(())
}

fn phase_cascade(target: &Statevector, out: &mut Circuit) -> Result<()> {
    let n = target.n_qubits();
    let mut phases: Vec<f64> = target.amplitudes().iter().map(|a| a.arg()).collect();
    for k in (0..n).rev() {
        let half = phases.len() / 2;
        let mut angles = Vec::with_capacity(half);
        let mut rest = Vec::with_capacity(half);
        for p in 0..half {
            let (w0, w1) = (phases[2 * p], phases[2 * p + 1]);
            angles.push(w1 - w0);
            rest.push((w0 + w1) / 2.0);
        }
        multiplexed_rotation(out, k, &angles, Axis::Z)?;
        phases = rest;
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Axis {
    Y,
    Z,
}

fn push_rotation(out: &mut Circuit, qubit: usize, angle: f64, axis: Axis) -> Result<()> {
    if angle.abs() < 1e-14 {
        return Ok(());
    }
    match axis {
        Axis::Z => out.push(Gate::rz(qubit, angle)),
        Axis::Y => {
            out.push(Gate::rz(qubit, -FRAC_PI_2))?;
            out.push(Gate::rx(qubit, angle))?;
            out.push(Gate::rz(qubit, FRAC_PI_2))
        }
    }
}

/// Rotation on `target` with angle `angles[p]` for each value `p` of the
/// controls `0..target` (qubit 0 is the most significant bit of `p`).
fn multiplexed_rotation(out: &mut Circuit, target: usize, angles: &[f64], axis: Axis) -> Result<()> {
    if angles.iter().all(|a| a.abs() < 1e-14) {
        return Ok(());
    }
    let k = target;
    if k == 0 {
        return push_rotation(out, target, angles[0], axis);
    }
    let size = 1usize << k;
    let gray = |i: usize| i ^ (i >> 1);
    for i in 0..size {
        let g = gray(i);
        let theta: f64 = angles
            .iter()
            .enumerate()
            .map(|(j, a)| {
                if (j & g).count_ones() % 2 == 0 {
                    *a
                } else {
                    -*a
                }
            })
            .sum::<f64>()
            / size as f64;
        push_rotation(out, target, theta, axis)?;
        let flipped_bit = if i + 1 < size {
            (i + 1).trailing_zeros() as usize
        } else {
            k - 1
        };
        let control = k - 1 - flipped_bit;
        out.push(Gate::cnot(control, target))?;
    }
    Ok(())
}

/// Lowers every gate onto `{RX, RZ, CNOT}` with CNOTs between adjacent
/// wires only. Adjacent identical CNOT pairs are cancelled.
pub fn route_adjacent(circuit: &Circuit) -> Result<Circuit> {
    let n = circuit.n_qubits();
    let mut gates: Vec<Gate> = Vec::with_capacity(circuit.len());
    let emit = |g: Gate, gates: &mut Vec<Gate>| {
        if g.name() == "CNOT" && gates.last() == Some(&g) {
            gates.pop();
        } else {
            gates.push(g);
        }
    };
    for g in circuit {
        match *g {
            Gate::Rx { .. } | Gate::Rz { .. } => emit(*g, &mut gates),
            Gate::H { qubit } => {
                emit(Gate::rz(qubit, FRAC_PI_2), &mut gates);
                emit(Gate::rx(qubit, FRAC_PI_2), &mut gates);
                emit(Gate::rz(qubit, FRAC_PI_2), &mut gates);
            }
            Gate::Cz { a, b } => {
                emit(Gate::rz(b, FRAC_PI_2), &mut gates);
                emit(Gate::rx(b, FRAC_PI_2), &mut gates);
                emit(Gate::rz(b, FRAC_PI_2), &mut gates);
                for r in routed_cnot(a, b) {
                    emit(r, &mut gates);
                }
                emit(Gate::rz(b, FRAC_PI_2), &mut gates);
                emit(Gate::rx(b, FRAC_PI_2), &mut gates);
                emit(Gate::rz(b, FRAC_PI_2), &mut gates);
            }
            Gate::Cnot { control, target } => {
                for r in routed_cnot(control, target) {
                    emit(r, &mut gates);
                }
            }
            Gate::Swap { a, b } => {
                for (c, t) in [(a, b), (b, a), (a, b)] {
                    for r in routed_cnot(c, t) {
                        emit(r, &mut gates);
                    }
                }
            }
        }
    }
    Circuit::from_gates(n, gates)
}

/// CNOT(control, target) as adjacent CNOTs: walk the control next to the
/// target with SWAPs (three CNOTs each), act, and walk it back.
fn routed_cnot(control: usize, target: usize) -> Vec<Gate> {
    let dist = control.abs_diff(target);
    if dist <= 1 {
        return vec![Gate::cnot(control, target)];
    }
    let step: isize = if target > control { 1 } else { -1 };
    let mut swaps = Vec::new();
    let mut pos = control as isize;
    while (pos + step) as usize != target {
        swaps.push((pos as usize, (pos + step) as usize));
        pos += step;
    }
    let swap_gates = |a: usize, b: usize| [Gate::cnot(a, b), Gate::cnot(b, a), Gate::cnot(a, b)];
    let mut out = Vec::new();
    for &(a, b) in &swaps {
        out.extend(swap_gates(a, b));
    }
    out.push(Gate::cnot(pos as usize, target));
    for &(a, b) in swaps.iter().rev() {
        out.extend(swap_gates(a, b));
    }
    out
}

/// Default upper end of the rotation-encoding angle range.
pub const DEFAULT_ANGLE_MAX: f64 = std::f64::consts::FRAC_PI_4;

/// Min-max scales `values` from `[lo, hi]` onto rotation angles in
/// `[0, angle_max]`, clamping outside the range.
pub fn scale_to_angles(values: &[f64], lo: f64, hi: f64, angle_max: f64) -> Result<Vec<f64>> {
    if !(hi > lo) {
        return Err(Error::InvalidArgument(format!("empty scaling range [{lo}, {hi}]")));
    }
    if !(angle_max > 0.0 && angle_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("angle range {angle_max} must be positive")));
    }
    Ok(values
        .iter()
        .map(|v| (v.clamp(lo, hi) - lo) / (hi - lo) * angle_max)
        .collect())
}

/// Writes `angles` into the first parameters of `template`, leaving the
/// rest at zero.
pub fn rotation_encode(angles: &[f64], template: &ClassifierTemplate) -> Result<ModelParams> {
    let count = template.parameter_count();
    if angles.len() > count {
        return Err(Error::DimensionOverflow {
            features: angles.len(),
            capacity: count,
        });
    }
    let mut theta = vec![0.0; count];
    theta[..angles.len()].copy_from_slice(angles);
    ModelParams::new(theta)
}

/// The encoder output: the template with rotation-encoded parameters
/// applied to `|0…0⟩`.
pub fn rotation_encoded_state(angles: &[f64], template: &ClassifierTemplate) -> Result<Statevector> {
    let params = rotation_encode(angles, template)?;
    let circuit = template.circuit(&params)?;
    run_circuit(&Statevector::zero(template.n_qubits())?, &circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn only_allowed_gates(c: &Circuit) -> bool {
        c.gates().iter().all(|g| match *g {
            Gate::Rx { .. } | Gate::Rz { .. } => true,
            Gate::Cnot { control, target } => control.abs_diff(target) == 1,
            _ => false,
        })
    }

    #[test]
    fn basis_zero_needs_no_gates() {
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        let prep = amplitude_encode(&FeatureVector::new(v, 0).unwrap(), 3).unwrap();
        assert!(prep.circuit.is_empty());
        assert!((prep.target_fidelity_achieved - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_vector_matches_hadamards() {
        let n = 4;
        let v = vec![0.25; 16];
        let prep = amplitude_encode(&FeatureVector::new(v, 0).unwrap(), n).unwrap();
        let mut h = Circuit::new(n);
        for q in 0..n {
            h.push(Gate::h(q)).unwrap();
        }
        let a = run_circuit(&Statevector::zero(n).unwrap(), &prep.circuit).unwrap();
        let b = run_circuit(&Statevector::zero(n).unwrap(), &h).unwrap();
        assert!(fidelity(&a, &b).unwrap() > 1.0 - 1e-12);
        assert!(only_allowed_gates(&prep.circuit));
    }

    #[test]
    fn complex_targets_are_prepared() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=5 {
            let amps: Vec<Complex64> = (0..1 << n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let target = Statevector::normalized(amps).unwrap();
            let prep = prepare_state(&target).unwrap();
            assert!(prep.target_fidelity_achieved > 1.0 - 1e-10, "n={n}");
            assert!(only_allowed_gates(&prep.circuit));
            assert!(prep.circuit.len() <= (12 * n + 4) << n);
        }
    }

    #[test]
    fn routing_preserves_unitary() {
        let mut c = Circuit::new(5);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::rx(3, 0.4)).unwrap();
        c.push(Gate::cnot(0, 4)).unwrap();
        c.push(Gate::cnot(4, 1)).unwrap();
        c.push(Gate::swap(0, 3)).unwrap();
        c.push(Gate::cz(2, 0)).unwrap();
        let routed = route_adjacent(&c).unwrap();
        assert!(only_allowed_gates(&routed));
        for basis in [0, 5, 19, 31] {
            let s = Statevector::basis(5, basis).unwrap();
            let a = run_circuit(&s, &c).unwrap();
            let b = run_circuit(&s, &routed).unwrap();
            assert!(fidelity(&a, &b).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn errors() {
        let v = FeatureVector::new(vec![0.6, 0.8, 0.0], 0).unwrap();
        assert!(matches!(amplitude_encode(&v, 1), Err(Error::DimensionOverflow { .. })));
        let bad = FeatureVector::new(vec![0.5, 0.5], 0).unwrap();
        assert!(matches!(amplitude_encode(&bad, 1), Err(Error::Unnormalized(_))));
        assert!(matches!(
            FeatureVector::padded_normalized(&[0.0, 0.0], 4, 0),
            Err(Error::DegenerateVector)
        ));
    }
}
