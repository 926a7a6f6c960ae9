use rand::Rng;

use super::compile::{compile_circuit, compile_with_input};
use super::pattern::{adapt_angle, MeasurementPattern};
use super::register::{activate, branch_sum, push_state_key, BranchNode, Frame, Influence, Schedule};
use crate::error::{Error, Result};
use crate::quantum::{Circuit, Statevector};
use crate::rng::stream;

/// Default limit on expanded branch nodes in exact mode.
pub const DEFAULT_BRANCH_CAP: usize = 1 << 24;

/// How a pattern is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Weighted sum over every measurement branch.
    Exact,
    /// Empirical frequencies of `shots` trajectories; shot `i` draws its
    /// coins from stream `i` of `seed`.
    Sampled { shots: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    /// Adapt angles to earlier outcomes. Disabling breaks the computation
    /// and exists as a negative control.
    pub corrections: bool,
    pub branch_cap: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            corrections: true,
            branch_cap: DEFAULT_BRANCH_CAP,
        }
    }
}

pub(crate) struct Plan<'a> {
    pub pattern: &'a MeasurementPattern,
    pub schedule: Schedule,
    pub influence: Influence,
    /// Output bit position (top row = most significant), per site.
    pub out_bit: Vec<Option<usize>>,
    pub corrections: bool,
}

impl<'a> Plan<'a> {
    pub fn new(pattern: &'a MeasurementPattern, corrections: bool) -> Self {
        let mut out_bit = vec![None; pattern.n_sites()];
        let n_out = pattern.output_sites().len();
        for (row, &site) in pattern.output_sites().iter().enumerate() {
            out_bit[site] = Some(n_out - 1 - row);
        }
        Plan {
            pattern,
            schedule: Schedule::new(pattern.graph()),
            influence: Influence::new(pattern),
            out_bit,
            corrections,
        }
    }

    /// Adapted angle for `site` given the frame.
    pub fn angle(&self, frame: &Frame, site: usize) -> f64 {
        let phi = self.pattern.phi(site);
        if self.corrections {
            let (sx, sz) = frame.peek(site);
            adapt_angle(phi, sx, sz)
        } else {
            adapt_angle(phi, 0, 0)
        }
    }
}

fn plus(_: usize) -> Statevector {
    Statevector::plus_state(0.0)
}

#[derive(Clone)]
struct Walker<'p, 'a> {
    plan: &'p Plan<'a>,
    step: usize,
    state: Statevector,
    frame: Frame,
    outputs: usize,
}

impl<'p, 'a> Walker<'p, 'a> {
    fn new(plan: &'p Plan<'a>) -> Result<Self> {
        let mut w = Walker {
            plan,
            step: 0,
            state: Statevector::zero(0)?,
            frame: Frame::default(),
            outputs: 0,
        };
        w.prepare()?;
        Ok(w)
    }

    fn prepare(&mut self) -> Result<()> {
        if let Some(step) = self.plan.schedule.steps.get(self.step) {
            activate(&mut self.state, step, plus)?;
        }
        Ok(())
    }

    fn current_angle(&self) -> f64 {
        let step = &self.plan.schedule.steps[self.step];
        self.plan.angle(&self.frame, step.site)
    }
}

impl BranchNode for Walker<'_, '_> {
    fn done(&self) -> bool {
        self.step == self.plan.schedule.steps.len()
    }

    fn probabilities(&self) -> Result<[f64; 2]> {
        let step = &self.plan.schedule.steps[self.step];
        self.state.xy_probabilities(step.pos, self.current_angle())
    }

    fn advance(&mut self, outcome: u8) -> Result<()> {
        let step = &self.plan.schedule.steps[self.step];
        let angle = self.current_angle();
        let (_, reduced) = self.state.project_out_xy(step.pos, angle, outcome)?;
        self.state = reduced;
        self.frame.take(step.site);
        self.frame.record(&self.plan.influence, step.site, outcome);
        if let Some(bit) = self.plan.out_bit[step.site] {
            self.outputs |= usize::from(outcome) << bit;
        }
        self.step += 1;
        self.prepare()
    }

    fn key(&self) -> Vec<i64> {
        let mut key = vec![self.outputs as i64];
        self.frame.push_key(&mut key);
        push_state_key(&self.state, &mut key);
        key
    }

    fn output_index(&self) -> usize {
        self.outputs
    }
}

/// Output distribution of `pattern` over its output sites (top row is the
/// most significant bit), with `input_prep` compiled in front of the
/// pattern's source circuit when nonempty.
pub fn evaluate_pattern(pattern: &MeasurementPattern, input_prep: &Circuit, mode: EvalMode) -> Result<Vec<f64>> {
    evaluate_pattern_with(pattern, input_prep, mode, &EvalOptions::default())
}

pub fn evaluate_pattern_with(
    pattern: &MeasurementPattern,
    input_prep: &Circuit,
    mode: EvalMode,
    options: &EvalOptions,
) -> Result<Vec<f64>> {
    if !input_prep.is_empty() {
        let source = pattern.source().ok_or_else(|| {
            Error::InvalidArgument("pattern has no source circuit to prepend an input preparation to".into())
        })?;
        let full = compile_with_input(input_prep, source)?;
        return evaluate_pattern_with(&full, &Circuit::new(full.n_wires()), mode, options);
    }
    let plan = Plan::new(pattern, options.corrections);
    let n_out = 1 << pattern.output_sites().len();
    match mode {
        EvalMode::Exact => branch_sum(Walker::new(&plan)?, n_out, options.branch_cap),
        EvalMode::Sampled { shots, seed } => {
            if shots == 0 {
                return Err(Error::InvalidArgument("sampled mode needs at least one shot".into()));
            }
            let mut counts = vec![0usize; n_out];
            for shot in 0..shots {
                let mut rng = stream(seed, shot as u64);
                let mut w = Walker::new(&plan)?;
                while !w.done() {
                    let p = w.probabilities()?;
                    let coin: f64 = rng.random();
                    w.advance(u8::from(coin >= p[0]))?;
                }
                counts[w.outputs] += 1;
            }
            Ok(counts.into_iter().map(|c| c as f64 / shots as f64).collect())
        }
    }
}

/// Outcome bits of one sampled trajectory, in measurement order.
pub fn sample_outcomes(pattern: &MeasurementPattern, seed: u64, shot: u64) -> Result<Vec<u8>> {
    let plan = Plan::new(pattern, true);
    let mut rng = stream(seed, shot);
    let mut w = Walker::new(&plan)?;
    let mut bits = Vec::with_capacity(pattern.n_sites());
    while !w.done() {
        let p = w.probabilities()?;
        let coin: f64 = rng.random();
        let b = u8::from(coin >= p[0]);
        bits.push(b);
        w.advance(b)?;
    }
    Ok(bits)
}

/// Marginal of a distribution over `n_wires` bits (wire 0 most
/// significant) onto `readout`, `readout[0]` most significant.
pub fn marginalize(dist: &[f64], n_wires: usize, readout: &[usize]) -> Result<Vec<f64>> {
    if dist.len() != 1 << n_wires {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_wires,
            actual: dist.len(),
        });
    }
    if readout.is_empty() {
        return Err(Error::EmptyReadout);
    }
    if let Some(&q) = readout.iter().find(|&&q| q >= n_wires) {
        return Err(Error::QubitOutOfRange {
            index: q,
            n_qubits: n_wires,
        });
    }
    let mut out = vec![0.0; 1 << readout.len()];
    for (i, p) in dist.iter().enumerate() {
        let mut k = 0;
        for &q in readout {
            k = (k << 1) | ((i >> (n_wires - 1 - q)) & 1);
        }
        out[k] += p;
    }
    Ok(out)
}

/// Compiles `circuit` and evaluates it, marginalized onto `readout`.
pub fn circuit_distribution(circuit: &Circuit, readout: &[usize], mode: EvalMode) -> Result<Vec<f64>> {
    let pattern = compile_circuit(circuit)?;
    let dist = evaluate_pattern(&pattern, &Circuit::new(circuit.n_qubits()), mode)?;
    marginalize(&dist, circuit.n_qubits(), readout)
}

/// Total-variation distance `½ Σ |p − q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{run_circuit, Gate};

    fn direct(c: &Circuit) -> Vec<f64> {
        let s = run_circuit(&Statevector::zero(c.n_qubits()).unwrap(), c).unwrap();
        s.readout_distribution(&(0..c.n_qubits()).collect::<Vec<_>>()).unwrap()
    }

    fn exact(c: &Circuit) -> Vec<f64> {
        evaluate_pattern(&compile_circuit(c).unwrap(), &Circuit::new(c.n_qubits()), EvalMode::Exact).unwrap()
    }

    #[test]
    fn identity_pattern() {
        let d = exact(&Circuit::new(2));
        assert!(total_variation(&d, &[1.0, 0.0, 0.0, 0.0]) < 1e-12);
    }

    #[test]
    fn rx_on_one_wire() {
        let c = Circuit::from_gates(1, vec![Gate::rx(0, 0.7)]).unwrap();
        assert!(total_variation(&exact(&c), &direct(&c)) < 1e-12);
    }

    #[test]
    fn cnot_on_10() {
        let c = Circuit::from_gates(2, vec![Gate::rx(0, std::f64::consts::PI), Gate::cnot(0, 1)]).unwrap();
        let d = exact(&c);
        assert!((d[3] - 1.0).abs() < 1e-10, "{d:?}");
    }

    #[test]
    fn bell_pair() {
        let c = Circuit::from_gates(2, vec![Gate::h(0), Gate::cnot(0, 1)]).unwrap();
        let d = exact(&c);
        assert!(total_variation(&d, &[0.5, 0.0, 0.0, 0.5]) < 1e-10, "{d:?}");
    }

    #[test]
    fn marginal_of_bell() {
        let m = marginalize(&[0.5, 0.0, 0.0, 0.5], 2, &[1]).unwrap();
        assert_eq!(m, vec![0.5, 0.5]);
        let m = marginalize(&[0.1, 0.2, 0.3, 0.4], 2, &[1, 0]).unwrap();
        assert_eq!(m, vec![0.1, 0.3, 0.2, 0.4]);
    }

    #[test]
    fn tiny_cap_is_reported() {
        let c = Circuit::from_gates(2, vec![Gate::h(0), Gate::cnot(0, 1)]).unwrap();
        let p = compile_circuit(&c).unwrap();
        let opts = EvalOptions {
            corrections: true,
            branch_cap: 4,
        };
        assert!(matches!(
            evaluate_pattern_with(&p, &Circuit::new(2), EvalMode::Exact, &opts),
            Err(Error::BranchCapExceeded(4))
        ));
    }
}
