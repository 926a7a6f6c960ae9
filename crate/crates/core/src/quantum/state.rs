use num_complex::Complex64;

use super::circuit::Circuit;
use super::gate::{Gate, Mat2};
use super::MAX_QUBITS;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense amplitude vector of an n-qubit register.
///
/// Qubit 0 is the most significant bit of the basis index, so on three
/// qubits `|q0 q1 q2⟩ = |1 0 0⟩` is amplitude index 4.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n_qubits));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Statevector { n_qubits, amps })
    }

    /// Wraps amplitudes that must already be normalized within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = dimension_to_qubits(amps.len())?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized(norm_sqr.sqrt()));
        }
        Ok(Statevector { n_qubits, amps })
    }

    /// Normalizes `amps` and wraps them; zero vectors are rejected.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = dimension_to_qubits(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateVector);
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Statevector { n_qubits, amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_amplitudes(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// `(|0⟩ + e^{iθ}|1⟩)/√2`
    pub fn plus_state(theta: f64) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Statevector {
            n_qubits: 1,
            amps: vec![Complex64::new(r, 0.0), Complex64::from_polar(r, theta)],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product `self ⊗ other`; `other` becomes the low-order qubits.
    pub fn tensor(&self, other: &Statevector) -> Result<Statevector> {
        let n = self.n_qubits + other.n_qubits;
        if n > MAX_QUBITS {
            return Err(Error::RegisterTooLarge(n));
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Statevector { n_qubits: n, amps })
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            Err(Error::QubitOutOfRange {
                index: q,
                n_qubits: self.n_qubits,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub(crate) fn stride(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// `⟨self|X_q|other⟩`
    pub(crate) fn x_overlap(&self, other: &Statevector, q: usize) -> Complex64 {
        let m = self.stride(q);
        let mut acc = ZERO;
        for (i, a) in self.amps.iter().enumerate() {
            acc += a.conj() * other.amps[i ^ m];
        }
        acc
    }

    /// `⟨self|Z_q|other⟩`
    pub(crate) fn z_overlap(&self, other: &Statevector, q: usize) -> Complex64 {
        let m = self.stride(q);
        let mut acc = ZERO;
        for (i, (a, b)) in self.amps.iter().zip(&other.amps).enumerate() {
            let t = a.conj() * b;
            if i & m == 0 {
                acc += t;
            } else {
                acc -= t;
            }
        }
        acc
    }

    /// `self += c·X_q·src`, without renormalizing.
    pub(crate) fn add_x_scaled(&mut self, src: &Statevector, q: usize, c: Complex64) {
        let m = self.stride(q);
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a += c * src.amps[i ^ m];
        }
    }

    /// `self += c·Z_q·src`, without renormalizing.
    pub(crate) fn add_z_scaled(&mut self, src: &Statevector, q: usize, c: Complex64) {
        let m = self.stride(q);
        for (i, (a, b)) in self.amps.iter_mut().zip(&src.amps).enumerate() {
            if i & m == 0 {
                *a += c * b;
            } else {
                *a -= c * b;
            }
        }
    }

    /// Applies `gate` in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Applies every gate of `circuit` in order, in place.
    pub fn run(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: circuit.n_qubits(),
            });
        }
        for g in circuit {
            self.apply_unchecked(g);
        }
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        match *gate {
            Gate::Rx { qubit, angle } => self.rx(qubit, angle),
            Gate::Rz { qubit, angle } => self.rz(qubit, angle),
            Gate::H { qubit } => self.h(qubit),
            Gate::Cnot { control, target } => self.cnot(control, target),
            Gate::Cz { a, b } => self.cz(a, b),
            Gate::Swap { a, b } => self.swap(a, b),
        }
    }

    pub(crate) fn rx(&mut self, q: usize, angle: f64) {
        let (s, c) = (angle / 2.0).sin_cos();
        let stride = self.stride(q);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                // c·x - i s·y
                *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
                *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
            }
        }
    }

    pub(crate) fn rz(&mut self, q: usize, angle: f64) {
        let lo_phase = Complex64::from_polar(1.0, -angle / 2.0);
        let hi_phase = lo_phase.conj();
        let stride = self.stride(q);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for a in lo {
                *a *= lo_phase;
            }
            for b in hi {
                *b *= hi_phase;
            }
        }
    }

    pub(crate) fn h(&mut self, q: usize) {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let stride = self.stride(q);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = (x + y) * r;
                *b = (x - y) * r;
            }
        }
    }

    /// Generic single-qubit unitary.
    pub fn apply_mat2(&mut self, q: usize, m: &Mat2) {
        let stride = self.stride(q);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    pub(crate) fn cnot(&mut self, control: usize, target: usize) {
        let cmask = self.stride(control);
        let tmask = self.stride(target);
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    pub(crate) fn cz(&mut self, a: usize, b: usize) {
        let mask = self.stride(a) | self.stride(b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    pub(crate) fn swap(&mut self, a: usize, b: usize) {
        let am = self.stride(a);
        let bm = self.stride(b);
        for i in 0..self.amps.len() {
            if i & am != 0 && i & bm == 0 {
                self.amps.swap(i, (i & !am) | bm);
            }
        }
    }

    /// Marginal computational-basis distribution over `readout`, which is
    /// `diag(ρ)` of the reduced state. `readout[0]` is the most significant
    /// bit of the outcome index.
    pub fn readout_distribution(&self, readout: &[usize]) -> Result<Vec<f64>> {
        if readout.is_empty() {
            return Err(Error::EmptyReadout);
        }
        for (i, &q) in readout.iter().enumerate() {
            self.check_qubit(q)?;
            if readout[..i].contains(&q) {
                return Err(Error::RepeatedQubit(q));
            }
        }
        let masks: Vec<usize> = readout.iter().map(|&q| self.stride(q)).collect();
        let mut out = vec![0.0; 1 << readout.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut k = 0;
            for &m in &masks {
                k = (k << 1) | usize::from(i & m != 0);
            }
            out[k] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Probability of outcome 0 (`|+_δ⟩`) and 1 (`|−_δ⟩`) for a measurement of
    /// `qubit` in the basis `(|0⟩ ± e^{iδ}|1⟩)/√2`.
    pub fn xy_probabilities(&self, qubit: usize, delta: f64) -> Result<[f64; 2]> {
        self.check_qubit(qubit)?;
        let phase = Complex64::from_polar(1.0, -delta);
        let stride = self.stride(qubit);
        let mut p = [0.0; 2];
        for block in self.amps.chunks_exact(2 * stride) {
            let (lo, hi) = block.split_at(stride);
            for (x, y) in lo.iter().zip(hi) {
                let t = phase * y;
                p[0] += (x + t).norm_sqr();
                p[1] += (x - t).norm_sqr();
            }
        }
        let total = p[0] + p[1];
        Ok([p[0] / total, p[1] / total])
    }

    /// XY-plane measurement driven by a pre-drawn `coin ∈ [0,1)`: outcome 0
    /// when `coin < p(0)`. The returned state keeps the measured qubit,
    /// collapsed onto the observed basis vector.
    pub fn measure_xy(&self, qubit: usize, delta: f64, coin: f64) -> Result<(u8, Statevector)> {
        let p = self.xy_probabilities(qubit, delta)?;
        let outcome = u8::from(coin >= p[0]);
        let (_, reduced) = self.project_out_xy(qubit, delta, outcome)?;
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let basis = Statevector {
            n_qubits: 1,
            amps: vec![
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Complex64::from_polar(sign * std::f64::consts::FRAC_1_SQRT_2, delta),
            ],
        };
        Ok((outcome, reduced.insert_qubit(qubit, &basis)))
    }

    /// Projects `qubit` onto `|±_δ⟩` and removes it from the register.
    /// Returns the outcome probability and the renormalized remainder.
    pub fn project_out_xy(&self, qubit: usize, delta: f64, outcome: u8) -> Result<(f64, Statevector)> {
        self.check_qubit(qubit)?;
        if self.n_qubits == 1 {
            let p = self.xy_probabilities(qubit, delta)?[usize::from(outcome)];
            return Ok((
                p,
                Statevector {
                    n_qubits: 0,
                    amps: vec![ONE],
                },
            ));
        }
        let phase = Complex64::from_polar(1.0, -delta);
        let sign = if outcome == 0 { 1.0 } else { -1.0 };
        let stride = self.stride(qubit);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = Vec::with_capacity(self.dim() / 2);
        for block in self.amps.chunks_exact(2 * stride) {
            let (lo, hi) = block.split_at(stride);
            for (x, y) in lo.iter().zip(hi) {
                amps.push((x + phase * y * sign) * r);
            }
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let total = self.norm_sqr();
        if p > 0.0 {
            let norm = p.sqrt();
            for a in &mut amps {
                *a /= norm;
            }
        }
        Ok((
            p / total,
            Statevector {
                n_qubits: self.n_qubits - 1,
                amps,
            },
        ))
    }

    /// Inserts a single-qubit state at position `qubit` (0 = most significant).
    pub fn insert_qubit(&self, qubit: usize, single: &Statevector) -> Statevector {
        let n = self.n_qubits + 1;
        let stride = 1usize << (n - 1 - qubit);
        let mut amps = vec![ZERO; 1 << n];
        for (i, a) in self.amps.iter().enumerate() {
            let high = (i / stride) * 2 * stride;
            let low = i % stride;
            amps[high + low] = a * single.amps[0];
            amps[high + stride + low] = a * single.amps[1];
        }
        Statevector { n_qubits: n, amps }
    }

    /// Appends one qubit as the new least significant position.
    pub fn push_qubit(&self, single: &Statevector) -> Result<Statevector> {
        self.tensor(single)
    }

    /// Multiplies by the global phase that makes the largest amplitude real
    /// and positive.
    pub fn canonical_phase(&mut self) {
        let mut best = ZERO;
        for a in &self.amps {
            if a.norm_sqr() > best.norm_sqr() + 1e-14 {
                best = *a;
            }
        }
        if best.norm() > 0.0 {
            let rot = best.conj() / best.norm();
            for a in &mut self.amps {
                *a *= rot;
            }
        }
    }
}

fn dimension_to_qubits(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "amplitude vector length {len} is not a power of two"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(n));
    }
    Ok(n)
}

/// Returns the image of `state` under `gate`.
pub fn apply_gate(state: &Statevector, gate: &Gate) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Returns the image of `state` under `circuit`.
pub fn run_circuit(state: &Statevector, circuit: &Circuit) -> Result<Statevector> {
    let mut out = state.clone();
    out.run(circuit)?;
    Ok(out)
}

/// `|⟨a|b⟩|²`
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn hadamard_on_zero() {
        let s = apply_gate(&Statevector::zero(1).unwrap(), &Gate::h(0)).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(FRAC_1_SQRT_2, 0.0)));
    }

    #[test]
    fn cnot_on_10() {
        let s = Statevector::basis(2, 0b10).unwrap();
        let s = apply_gate(&s, &Gate::cnot(0, 1)).unwrap();
        assert!(close(s.amplitudes()[0b11], Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn rx_pi_on_zero() {
        let s = apply_gate(&Statevector::zero(1).unwrap(), &Gate::rx(0, PI)).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(0.0, 0.0)));
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn gate_errors() {
        let mut s = Statevector::zero(2).unwrap();
        assert!(matches!(s.apply(&Gate::h(2)), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(
            s.apply(&Gate::rx(0, f64::INFINITY)),
            Err(Error::NonFiniteAngle(_))
        ));
        assert!(matches!(Statevector::zero(21), Err(Error::RegisterTooLarge(21))));
    }

    #[test]
    fn empty_circuit_is_identity() {
        let s = Statevector::normalized(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.0, 0.7),
            Complex64::new(0.1, 0.0),
        ])
        .unwrap();
        assert_eq!(run_circuit(&s, &Circuit::new(2)).unwrap(), s);
    }

    #[test]
    fn bell_preparation() {
        let c = Circuit::from_gates(2, vec![Gate::h(0), Gate::cnot(0, 1)]).unwrap();
        let s = run_circuit(&Statevector::zero(2).unwrap(), &c).unwrap();
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        assert!(close(s.amplitudes()[0], r));
        assert!(close(s.amplitudes()[3], r));
        assert_eq!(s.readout_distribution(&[0]).unwrap().len(), 2);
        let d = s.readout_distribution(&[0]).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-12 && (d[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn readout_of_zero_state() {
        let d = Statevector::zero(3).unwrap().readout_distribution(&[0]).unwrap();
        assert_eq!(d, vec![1.0, 0.0]);
        assert!(matches!(
            Statevector::zero(1).unwrap().readout_distribution(&[]),
            Err(Error::EmptyReadout)
        ));
    }

    #[test]
    fn xy_measurement_examples() {
        let plus = Statevector::plus_state(0.0);
        assert!((plus.xy_probabilities(0, 0.0).unwrap()[0] - 1.0).abs() < 1e-12);
        assert!((plus.xy_probabilities(0, PI).unwrap()[1] - 1.0).abs() < 1e-12);
        let quarter = Statevector::plus_state(PI / 2.0);
        assert!((quarter.xy_probabilities(0, 0.0).unwrap()[0] - 0.5).abs() < 1e-12);
        let (b, post) = quarter.measure_xy(0, 0.0, 0.7).unwrap();
        assert_eq!(b, 1);
        assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((post.xy_probabilities(0, 0.0).unwrap()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn insert_and_project_roundtrip() {
        let base = Statevector::normalized(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.2, 0.5),
            Complex64::new(0.0, 0.7),
            Complex64::new(0.1, 0.0),
        ])
        .unwrap();
        for q in 0..3 {
            let joined = base.insert_qubit(q, &Statevector::plus_state(0.4));
            let (p, back) = joined.project_out_xy(q, 0.4, 0).unwrap();
            assert!((p - 1.0).abs() < 1e-12);
            assert!(fidelity(&back, &base).unwrap() > 1.0 - 1e-12);
        }
    }
}
