use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2×2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

/// Gate set of the simulator.
///
/// Rotations follow `RX(θ) = exp(-iθX/2)` and `RZ(θ) = exp(-iθZ/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Rx { qubit: usize, angle: f64 },
    Rz { qubit: usize, angle: f64 },
    H { qubit: usize },
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
    Swap { a: usize, b: usize },
}

impl Gate {
    pub fn rx(qubit: usize, angle: f64) -> Self {
        Gate::Rx { qubit, angle }
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Gate::Rz { qubit, angle }
    }

    pub fn h(qubit: usize) -> Self {
        Gate::H { qubit }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Gate::Cz { a, b }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::Swap { a, b }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Rx { .. } => "RX",
            Gate::Rz { .. } => "RZ",
            Gate::H { .. } => "H",
            Gate::Cnot { .. } => "CNOT",
            Gate::Cz { .. } => "CZ",
            Gate::Swap { .. } => "SWAP",
        }
    }

    /// Qubits the gate touches, control first for CNOT.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::H { qubit } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Cz { a, b } | Gate::Swap { a, b } => vec![a, b],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx { angle, .. } | Gate::Rz { angle, .. } => Some(angle),
            _ => None,
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. } | Gate::Cz { .. } | Gate::Swap { .. })
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qubits = self.qubits();
        for &q in &qubits {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(Error::RepeatedQubit(qubits[0]));
        }
        if let Some(angle) = self.angle() {
            if !angle.is_finite() {
                return Err(Error::NonFiniteAngle(angle));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx { qubit, angle } => Gate::Rx { qubit, angle: -angle },
            Gate::Rz { qubit, angle } => Gate::Rz { qubit, angle: -angle },
            g => g,
        }
    }

    /// Matrix of a single-qubit gate; `None` for two-qubit gates.
    pub fn matrix(&self) -> Option<Mat2> {
        match *self {
            Gate::Rx { angle, .. } => Some(rx_matrix(angle)),
            Gate::Rz { angle, .. } => Some(rz_matrix(angle)),
            Gate::H { .. } => Some(h_matrix()),
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rx { qubit, angle } => write!(f, "RX({angle}) q{qubit}"),
            Gate::Rz { qubit, angle } => write!(f, "RZ({angle}) q{qubit}"),
            Gate::H { qubit } => write!(f, "H q{qubit}"),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control}->q{target}"),
            Gate::Cz { a, b } => write!(f, "CZ q{a} q{b}"),
            Gate::Swap { a, b } => write!(f, "SWAP q{a} q{b}"),
        }
    }
}

pub fn rx_matrix(angle: f64) -> Mat2 {
    let c = Complex64::new((angle / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(angle / 2.0).sin());
    [[c, s], [s, c]]
}

pub fn rz_matrix(angle: f64) -> Mat2 {
    let zero = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -angle / 2.0), zero],
        [zero, Complex64::from_polar(1.0, angle / 2.0)],
    ]
}

pub fn h_matrix() -> Mat2 {
    let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[r, r], [r, -r]]
}

pub fn identity2() -> Mat2 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

/// `a · b`
pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Euler angles `(α, β, γ)` with `u ∝ RZ(γ)·RX(β)·RZ(α)` up to a global phase.
pub fn zxz_euler_angles(u: &Mat2) -> (f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let scale = det.sqrt();
    let v = [
        [u[0][0] / scale, u[0][1] / scale],
        [u[1][0] / scale, u[1][1] / scale],
    ];
    // v = [[c e^{-iσ/2}, -i s e^{iΔ/2}], [-i s e^{-iΔ/2}, c e^{iσ/2}]], σ = α+γ, Δ = α-γ
    let c = v[0][0].norm().min(1.0);
    let s = v[1][0].norm().min(1.0);
    let beta = 2.0 * s.atan2(c);
    let sigma = if c > 1e-12 {
        -2.0 * v[0][0].arg()
    } else {
        0.0
    };
    let delta = if s > 1e-12 {
        // -i e^{-iΔ/2} = e^{-i(Δ+π)/2}
        -2.0 * v[1][0].arg() - std::f64::consts::PI
    } else {
        0.0
    };
    let alpha = (sigma + delta) / 2.0;
    let gamma = (sigma - delta) / 2.0;
    (alpha, beta, gamma)
}

/// True when `a = e^{iφ} b` for some φ, elementwise within `tol`.
pub fn mat2_equal_up_to_phase(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    let mut best = (0, 0);
    let mut best_norm = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            if b[i][j].norm() > best_norm {
                best_norm = b[i][j].norm();
                best = (i, j);
            }
        }
    }
    if best_norm < 1e-12 {
        return false;
    }
    let phase = a[best.0][best.1] / b[best.0][best.1];
    if (phase.norm() - 1.0).abs() > tol {
        return false;
    }
    (0..2).all(|i| (0..2).all(|j| (a[i][j] - phase * b[i][j]).norm() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn validation_rejects_bad_gates() {
        assert!(Gate::rx(3, 0.1).validate(3).is_err());
        assert!(Gate::cnot(1, 1).validate(3).is_err());
        assert!(Gate::rz(0, f64::NAN).validate(1).is_err());
        assert!(Gate::swap(0, 2).validate(3).is_ok());
    }

    #[test]
    fn euler_angles_reconstruct() {
        let cases = [
            h_matrix(),
            rx_matrix(0.3),
            rz_matrix(-1.2),
            mat2_mul(&rx_matrix(PI), &rz_matrix(0.4)),
            mat2_mul(&rz_matrix(2.1), &mat2_mul(&rx_matrix(0.7), &rz_matrix(-0.9))),
            identity2(),
        ];
        for u in cases {
            let (a, b, g) = zxz_euler_angles(&u);
            let rebuilt = mat2_mul(&rz_matrix(g), &mat2_mul(&rx_matrix(b), &rz_matrix(a)));
            assert!(mat2_equal_up_to_phase(&rebuilt, &u, 1e-10), "{u:?}");
        }
    }
}
