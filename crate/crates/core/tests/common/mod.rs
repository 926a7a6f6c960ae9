//! Independent reference implementations used as test oracles. Nothing here
//! calls the library's simulator.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qfl::quantum::{Circuit, Gate};
use qfl::vqc::{ClassifierTemplate, LabeledSample, ModelParams};

pub type Matrix = Vec<Vec<C>>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn single(angle_gate: &Gate) -> [[C; 2]; 2] {
    match *angle_gate {
        Gate::Rx { angle, .. } => {
            let (s, co) = (angle / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        Gate::Rz { angle, .. } => [[C::from_polar(1.0, -angle / 2.0), c(0.0, 0.0)], [c(0.0, 0.0), C::from_polar(1.0, angle / 2.0)]],
        Gate::H { .. } => {
            let r = 0.5f64.sqrt();
            [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
        }
        _ => unreachable!("not a single-qubit gate"),
    }
}

fn bit(i: usize, q: usize, n: usize) -> usize {
    (i >> (n - 1 - q)) & 1
}

/// Dense `2ⁿ × 2ⁿ` matrix of `g`, qubit 0 most significant.
pub fn gate_matrix(g: &Gate, n: usize) -> Matrix {
    let dim = 1 << n;
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        match *g {
            Gate::Rx { qubit, .. } | Gate::Rz { qubit, .. } | Gate::H { qubit } => {
                let u = single(g);
                let b = bit(i, qubit, n);
                let mask = 1 << (n - 1 - qubit);
                for nb in 0..2 {
                    let j = (i & !mask) | (nb * mask);
                    m[j][i] += u[nb][b];
                }
            }
            Gate::Cnot { control, target } => {
                let j = if bit(i, control, n) == 1 { i ^ (1 << (n - 1 - target)) } else { i };
                m[j][i] = c(1.0, 0.0);
            }
            Gate::Cz { a, b } => {
                let s = if bit(i, a, n) & bit(i, b, n) == 1 { -1.0 } else { 1.0 };
                m[i][i] = c(s, 0.0);
            }
            Gate::Swap { a, b } => {
                let (ba, bb) = (bit(i, a, n), bit(i, b, n));
                let j = if ba != bb { i ^ (1 << (n - 1 - a)) ^ (1 << (n - 1 - b)) } else { i };
                m[j][i] = c(1.0, 0.0);
            }
        }
    }
    m
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Product of the gate matrices, first gate rightmost.
pub fn circuit_unitary(circuit: &Circuit) -> Matrix {
    let n = circuit.n_qubits();
    let dim = 1 << n;
    let mut u: Matrix = (0..dim).map(|i| (0..dim).map(|j| c(f64::from(u8::from(i == j)), 0.0)).collect()).collect();
    for g in circuit.gates() {
        u = matmul(&gate_matrix(g, n), &u);
    }
    u
}

pub fn apply(u: &Matrix, v: &[C]) -> Vec<C> {
    u.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Computational-basis distribution of `v` marginalized onto `readout`.
pub fn readout(v: &[C], n: usize, readout: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; 1 << readout.len()];
    for (i, a) in v.iter().enumerate() {
        let k = readout.iter().fold(0, |k, &q| (k << 1) | bit(i, q, n));
        out[k] += a.norm_sqr();
    }
    out
}

/// Distribution of `circuit` applied to `|0…0⟩` over all wires.
pub fn circuit_distribution(circuit: &Circuit) -> Vec<f64> {
    let n = circuit.n_qubits();
    let mut zero = vec![c(0.0, 0.0); 1 << n];
    zero[0] = c(1.0, 0.0);
    let wires: Vec<usize> = (0..n).collect();
    readout(&apply(&circuit_unitary(circuit), &zero), n, &wires)
}

/// Mean cross-entropy of the classifier, computed through dense matrices.
pub fn oracle_loss(template: &ClassifierTemplate, params: &ModelParams, samples: &[LabeledSample]) -> f64 {
    let circuit = template.circuit(params).unwrap();
    let u = circuit_unitary(&circuit);
    let n = template.n_qubits();
    let total: f64 = samples
        .iter()
        .map(|s| {
            let out = apply(&u, s.input.amplitudes());
            let g = readout(&out, n, template.readout());
            s.label()
                .iter()
                .zip(&g)
                .filter(|(a, _)| **a != 0.0)
                .map(|(a, gk)| -a * gk.max(1e-12).ln())
                .sum::<f64>()
        })
        .sum();
    total / samples.len() as f64
}

/// Central finite-difference gradient of `oracle_loss`.
pub fn oracle_fd_gradient(template: &ClassifierTemplate, params: &ModelParams, samples: &[LabeledSample], h: f64) -> Vec<f64> {
    (0..params.len())
        .map(|i| {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus.theta[i] += h;
            minus.theta[i] -= h;
            (oracle_loss(template, &plus, samples) - oracle_loss(template, &minus, samples)) / (2.0 * h)
        })
        .collect()
}

/// A normalized random complex vector from `rng`.
pub fn random_state(n: usize, rng: &mut impl rand::Rng) -> Vec<C> {
    let v: Vec<C> = (0..1 << n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Path of the bundled data directory.
pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}
