use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Circuit, Gate, Statevector};

/// Rotation axis of a parameterized gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Z,
}

/// How rotations are laid out in each layer.
///
/// * `Zx`: `RZ, RX` on every qubit per layer (default; `2·n·depth` angles).
/// * `Zxz`: `RZ, RX, RZ` per qubit per layer (`3·n·depth`).
/// * `Rotor`: `depth + 1` rotor layers separated by `depth` entanglers. The
///   first rotor is `RX, RZ`, the last `RZ, RX`, the middle ones
///   `RZ, RX, RZ`, giving `n·(3·depth + 1)` angles (272 for 8 qubits,
///   depth 11).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationLayout {
    Zx,
    Zxz,
    Rotor,
}

impl RotationLayout {
    pub fn tag(&self) -> &'static str {
        match self {
            RotationLayout::Zx => "zx",
            RotationLayout::Zxz => "zxz",
            RotationLayout::Rotor => "rotor",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "zx" => Ok(RotationLayout::Zx),
            "zxz" => Ok(RotationLayout::Zxz),
            "rotor" => Ok(RotationLayout::Rotor),
            other => Err(Error::InvalidArgument(format!("unknown layout tag {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Op {
    Rot { qubit: usize, axis: Axis, param: usize },
    Cnot { control: usize, target: usize },
}

/// Layered rotation + CNOT-chain classifier.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierTemplate {
    n_qubits: usize,
    depth: usize,
    layout: RotationLayout,
    readout: Vec<usize>,
    ops: Vec<Op>,
    n_params: usize,
}

/// Builds the default `RZ, RX` template.
pub fn build_classifier(n_qubits: usize, depth: usize, readout: &[usize]) -> Result<ClassifierTemplate> {
    ClassifierTemplate::new(n_qubits, depth, readout, RotationLayout::Zx)
}

impl ClassifierTemplate {
    pub fn new(n_qubits: usize, depth: usize, readout: &[usize], layout: RotationLayout) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::quantum::MAX_QUBITS {
            return Err(Error::InvalidArgument(format!("invalid qubit count {n_qubits}")));
        }
        if depth == 0 {
            return Err(Error::InvalidArgument("depth must be at least 1".into()));
        }
        if readout.is_empty() {
            return Err(Error::EmptyReadout);
        }
        for (i, &q) in readout.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if readout[..i].contains(&q) {
                return Err(Error::RepeatedQubit(q));
            }
        }
        let mut ops = Vec::new();
        let mut n_params = 0;
        let mut rotor = |ops: &mut Vec<Op>, axes: &[Axis]| {
            for qubit in 0..n_qubits {
                for &axis in axes {
                    ops.push(Op::Rot {
                        qubit,
                        axis,
                        param: n_params,
                    });
                    n_params += 1;
                }
            }
        };
        let entangler = |ops: &mut Vec<Op>| {
            for q in 0..n_qubits.saturating_sub(1) {
                ops.push(Op::Cnot {
                    control: q,
                    target: q + 1,
                });
            }
        };
        match layout {
            RotationLayout::Zx | RotationLayout::Zxz => {
                let axes: &[Axis] = if layout == RotationLayout::Zx {
                    &[Axis::Z, Axis::X]
                } else {
                    &[Axis::Z, Axis::X, Axis::Z]
                };
                for _ in 0..depth {
                    rotor(&mut ops, axes);
                    entangler(&mut ops);
                }
            }
            RotationLayout::Rotor => {
                rotor(&mut ops, &[Axis::X, Axis::Z]);
                for layer in 0..depth {
                    entangler(&mut ops);
                    if layer + 1 < depth {
                        rotor(&mut ops, &[Axis::Z, Axis::X, Axis::Z]);
                    } else {
                        rotor(&mut ops, &[Axis::Z, Axis::X]);
                    }
                }
            }
        }
        Ok(ClassifierTemplate {
            n_qubits,
            depth,
            layout,
            readout: readout.to_vec(),
            ops,
            n_params,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn layout(&self) -> RotationLayout {
        self.layout
    }

    pub fn readout(&self) -> &[usize] {
        &self.readout
    }

    /// Number of classes, `2^|readout|`.
    pub fn n_outcomes(&self) -> usize {
        1 << self.readout.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.n_params
    }

    pub fn cnot_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Cnot { .. })).count()
    }

    pub(crate) fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn check_params(&self, params: &ModelParams) -> Result<()> {
        if params.theta.len() != self.n_params {
            return Err(Error::DimensionMismatch {
                expected: self.n_params,
                actual: params.theta.len(),
            });
        }
        Ok(())
    }

    /// The realized circuit for `params`.
    pub fn circuit(&self, params: &ModelParams) -> Result<Circuit> {
        self.check_params(params)?;
        let gates = self
            .ops
            .iter()
            .map(|op| op_gate(op, &params.theta))
            .collect();
        Circuit::from_gates(self.n_qubits, gates)
    }

    /// Applies the template to `state` in place.
    pub(crate) fn apply(&self, state: &mut Statevector, theta: &[f64]) {
        for op in &self.ops {
            apply_op(state, op, theta);
        }
    }
}

pub(crate) fn op_gate(op: &Op, theta: &[f64]) -> Gate {
    match *op {
        Op::Rot { qubit, axis: Axis::X, param } => Gate::rx(qubit, theta[param]),
        Op::Rot { qubit, axis: Axis::Z, param } => Gate::rz(qubit, theta[param]),
        Op::Cnot { control, target } => Gate::cnot(control, target),
    }
}

#[inline]
pub(crate) fn apply_op(state: &mut Statevector, op: &Op, theta: &[f64]) {
    match *op {
        Op::Rot { qubit, axis: Axis::X, param } => state.rx(qubit, theta[param]),
        Op::Rot { qubit, axis: Axis::Z, param } => state.rz(qubit, theta[param]),
        Op::Cnot { control, target } => state.cnot(control, target),
    }
}

#[inline]
pub(crate) fn apply_op_inverse(state: &mut Statevector, op: &Op, theta: &[f64]) {
    match *op {
        Op::Rot { qubit, axis: Axis::X, param } => state.rx(qubit, -theta[param]),
        Op::Rot { qubit, axis: Axis::Z, param } => state.rz(qubit, -theta[param]),
        Op::Cnot { control, target } => state.cnot(control, target),
    }
}

/// Classifier angles `Θ` (radians).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub theta: Vec<f64>,
    pub step_count: u64,
}

impl ModelParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if let Some(v) = theta.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteAngle(*v));
        }
        Ok(ModelParams {
            theta,
            step_count: 0,
        })
    }

    pub fn zeros(n: usize) -> Self {
        ModelParams {
            theta: vec![0.0; n],
            step_count: 0,
        }
    }

    /// Uniform on `[0, 2π)` per angle.
    pub fn random(n: usize, rng: &mut impl rand::Rng) -> Self {
        let tau = std::f64::consts::TAU;
        ModelParams {
            theta: (0..n).map(|_| rng.random::<f64>() * tau).collect(),
            step_count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_counts() {
        let t = build_classifier(2, 1, &[0]).unwrap();
        assert_eq!(t.parameter_count(), 4);
        assert_eq!(t.cnot_count(), 1);
        assert_eq!(build_classifier(8, 30, &[0]).unwrap().parameter_count(), 480);
        assert_eq!(build_classifier(6, 30, &[0]).unwrap().parameter_count(), 360);
        let rotor = ClassifierTemplate::new(8, 11, &[0], RotationLayout::Rotor).unwrap();
        assert_eq!(rotor.parameter_count(), 272);
        let zxz = ClassifierTemplate::new(3, 2, &[0], RotationLayout::Zxz).unwrap();
        assert_eq!(zxz.parameter_count(), 18);
    }

    #[test]
    fn rejects_bad_templates() {
        assert!(build_classifier(2, 0, &[0]).is_err());
        assert!(build_classifier(2, 1, &[2]).is_err());
        assert!(build_classifier(2, 1, &[]).is_err());
        assert!(build_classifier(2, 1, &[1, 1]).is_err());
    }

    #[test]
    fn entanglers_are_adjacent() {
        let t = build_classifier(5, 3, &[0]).unwrap();
        let c = t.circuit(&ModelParams::zeros(t.parameter_count())).unwrap();
        for g in c.gates() {
            if let Gate::Cnot { control, target } = *g {
                assert_eq!(control + 1, target);
            }
        }
    }
}
