use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use super::graph::{build_brickwork, Site, BRICK_WIDTH};
use super::pattern::{reduce_angle, Brick, BrickKind, MeasurementPattern};
use crate::error::{Error, Result};
use crate::quantum::{h_matrix, identity2, mat2_equal_up_to_phase, mat2_mul, zxz_euler_angles, Circuit, Gate, Mat2};

#[derive(Clone, Copy, Debug)]
enum Slot {
    Euler(Mat2),
    CnotControl,
    CnotTarget,
}

/// Measurement angles `(a1, a2, a3, a4)` of one wire through one brick
/// column. The wire undergoes `RX(−a4)·RZ(−a3)·RX(−a2)·RZ(−a1)`, with the
/// brick's vertical CZs after `a2` and after `a4`.
fn slot_angles(slot: &Slot) -> [f64; 4] {
    match slot {
        Slot::Euler(u) => {
            let (alpha, beta, gamma) = zxz_euler_angles(u);
            [-alpha, -beta, -gamma, 0.0]
        }
        Slot::CnotControl => [0.0, 0.0, FRAC_PI_2, 0.0],
        Slot::CnotTarget => [0.0, FRAC_PI_2, 0.0, -FRAC_PI_2],
    }
}

fn is_identity(u: &Mat2) -> bool {
    mat2_equal_up_to_phase(u, &identity2(), 1e-12)
}

struct Scheduler {
    n: usize,
    pending: Vec<Mat2>,
    avail: Vec<usize>,
    slots: HashMap<(usize, usize), Slot>,
}

impl Scheduler {
    fn new(n: usize) -> Self {
        Scheduler {
            n,
            pending: vec![identity2(); n],
            avail: vec![0; n],
            slots: HashMap::new(),
        }
    }

    fn single(&mut self, w: usize, m: &Mat2) {
        self.pending[w] = mat2_mul(m, &self.pending[w]);
    }

    fn flush(&mut self, w: usize) {
        if !is_identity(&self.pending[w]) {
            self.slots.insert((self.avail[w], w), Slot::Euler(self.pending[w]));
            self.avail[w] += 1;
        }
        self.pending[w] = identity2();
    }

    fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control.abs_diff(target) != 1 {
            return Err(Error::NonAdjacentCnot(control, target));
        }
        let lo = control.min(target);
        for w in [lo, lo + 1] {
            self.flush(w);
        }
        let mut b = self.avail[lo].max(self.avail[lo + 1]);
        if b % 2 != lo % 2 {
            b += 1;
        }
        let (top, bottom) = if control == lo {
            (Slot::CnotControl, Slot::CnotTarget)
        } else {
            (Slot::CnotTarget, Slot::CnotControl)
        };
        self.slots.insert((b, lo), top);
        self.slots.insert((b, lo + 1), bottom);
        self.avail[lo] = b + 1;
        self.avail[lo + 1] = b + 1;
        Ok(())
    }

    fn gate(&mut self, g: &Gate) -> Result<()> {
        match *g {
            Gate::Rx { .. } | Gate::Rz { .. } | Gate::H { .. } => {
                let w = g.qubits()[0];
                self.single(w, &g.matrix().expect("single-qubit gate"));
            }
            Gate::Cnot { control, target } => self.cnot(control, target)?,
            Gate::Cz { a, b } => {
                if a.abs_diff(b) != 1 {
                    return Err(Error::UnsupportedGate(format!("non-adjacent {g}")));
                }
                self.single(b, &h_matrix());
                self.cnot(a, b)?;
                self.single(b, &h_matrix());
            }
            Gate::Swap { a, b } => {
                if a.abs_diff(b) != 1 {
                    return Err(Error::UnsupportedGate(format!("non-adjacent {g}")));
                }
                self.cnot(a, b)?;
                self.cnot(b, a)?;
                self.cnot(a, b)?;
            }
        }
        Ok(())
    }
}

/// Compiles `circuit` (acting on `|0…0⟩`) to a brickwork pattern whose
/// output measurements sample the circuit's computational-basis
/// distribution. Accepts rotations and `H` on any wire and CNOT, CZ, SWAP
/// on adjacent wires.
pub fn compile_circuit(circuit: &Circuit) -> Result<MeasurementPattern> {
    let n = circuit.n_qubits();
    if n == 0 {
        return Err(Error::InvalidArgument("cannot compile a 0-qubit circuit".into()));
    }
    let mut s = Scheduler::new(n);
    // Inputs are |+⟩; H maps them to |0⟩.
    for w in 0..n {
        s.single(w, &h_matrix());
    }
    for g in circuit {
        s.gate(g)?;
    }
    // X-basis readout of the outputs becomes Z-basis readout of the circuit.
    for w in 0..n {
        s.single(w, &h_matrix());
        s.flush(w);
    }
    let n_bricks = s.avail.iter().copied().max().unwrap_or(0).max(1);
    let graph = build_brickwork(n, n_bricks)?;
    let mut phi = vec![0.0; graph.n_sites()];
    let mut bricks = Vec::new();
    let identity = Slot::Euler(identity2());
    for b in 0..n_bricks {
        let mut y = 0;
        while y < n {
            let paired = y % 2 == b % 2 && y + 1 < s.n;
            let rows: &[usize] = if paired { &[y, y + 1] } else { &[y] };
            let mut slots = Vec::new();
            for &w in rows {
                let slot = s.slots.get(&(b, w)).copied().unwrap_or(identity);
                let a = slot_angles(&slot);
                for (k, angle) in a.iter().enumerate() {
                    phi[graph.index(Site::new(BRICK_WIDTH * b + k, w))] = reduce_angle(*angle);
                }
                slots.push(slot);
            }
            let euler = |slot: &Slot| match slot {
                Slot::Euler(u) => zxz_euler_angles(u),
                _ => (0.0, 0.0, 0.0),
            };
            let kind = match slots.as_slice() {
                [Slot::CnotControl, Slot::CnotTarget] => BrickKind::Cnot { control_top: true },
                [Slot::CnotTarget, Slot::CnotControl] => BrickKind::Cnot { control_top: false },
                [top, bottom] => BrickKind::SingleQubitPair {
                    top: euler(top),
                    bottom: euler(bottom),
                },
                [one] => BrickKind::Single { euler: euler(one) },
                _ => unreachable!(),
            };
            bricks.push(Brick {
                top_row: y,
                bottom_row: *rows.last().unwrap(),
                start_col: BRICK_WIDTH * b,
                kind,
            });
            y += rows.len();
        }
    }
    let mut pattern = MeasurementPattern::with_flow(graph, phi)?;
    pattern.bricks = bricks;
    pattern.source = Some(circuit.clone());
    Ok(pattern)
}

/// Compiles `prep` followed by `circuit` into one pattern.
pub fn compile_with_input(prep: &Circuit, circuit: &Circuit) -> Result<MeasurementPattern> {
    compile_circuit(&prep.clone().then(circuit)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_compiles_to_zero_angles() {
        let p = compile_circuit(&Circuit::new(2)).unwrap();
        assert_eq!(p.graph().n_bricks(), 1);
        assert!(p.phis().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn rejects_non_adjacent() {
        let c = Circuit::from_gates(3, vec![Gate::cnot(0, 2)]).unwrap();
        assert!(matches!(compile_circuit(&c), Err(Error::NonAdjacentCnot(0, 2))));
        let c = Circuit::from_gates(3, vec![Gate::cz(0, 2)]).unwrap();
        assert!(compile_circuit(&c).is_err());
    }

    #[test]
    fn cnot_lands_on_matching_parity() {
        let c = Circuit::from_gates(3, vec![Gate::cnot(1, 2), Gate::cnot(0, 1)]).unwrap();
        let p = compile_circuit(&c).unwrap();
        let cnots: Vec<&Brick> = p
            .bricks()
            .iter()
            .filter(|b| matches!(b.kind, BrickKind::Cnot { .. }))
            .collect();
        assert_eq!(cnots.len(), 2);
        for b in cnots {
            assert_eq!((b.start_col / BRICK_WIDTH) % 2, b.top_row % 2);
            assert_eq!(b.bottom_row, b.top_row + 1);
        }
    }
}
