//! Correctness and blindness checks of the delegation stack.
//!
//! Random circuits of at most two wires and three bricks are compiled and
//! evaluated three ways (direct statevector, exact MBQC branch sum, exact
//! delegated protocol). The same circuits evaluated with corrections
//! disabled must disagree somewhere. Two distinct computations of equal
//! shape then feed the blindness audit.

use std::f64::consts::{FRAC_PI_4, TAU};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mbqc::{compile_circuit, evaluate_pattern_with, total_variation, EvalMode, EvalOptions, MeasurementPattern};
use crate::quantum::{run_circuit, Circuit, Gate, Statevector};
use crate::rng::{stream, tag};
use crate::ubqc::{blindness_audit, delegate_shot, delegated_exact, AuditReport, ThetaDomain, UbqcConfig};

/// Largest circuits exercised, in wires and bricks.
pub const MAX_WIRES: usize = 2;
pub const MAX_BRICKS: usize = 3;
/// Gate-count bound for random self-test circuits.
pub const MAX_GATES: usize = 8;
/// CNOT-count bound for random two-wire self-test circuits.
pub const MAX_ENTANGLERS: usize = 3;
/// Agreement bound between exact evaluators.
pub const EQUIVALENCE_TV: f64 = 1e-9;
/// Disagreement an uncorrected evaluation must show to count as detected.
pub const NEGATIVE_CONTROL_TV: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub n_circuits: usize,
    pub theta: ThetaDomain,
    pub sessions: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            n_circuits: 12,
            theta: ThetaDomain::Continuous,
            sessions: crate::ubqc::MIN_TRANSCRIPTS,
            alpha: 0.01,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceCase {
    pub n_wires: usize,
    pub n_bricks: usize,
    pub n_gates: usize,
    pub tv_mbqc: f64,
    pub tv_ubqc: f64,
    pub tv_uncorrected: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub theta_domain: &'static str,
    pub equivalence: Vec<EquivalenceCase>,
    pub equivalence_pass: bool,
    /// Some case disagrees once corrections are disabled.
    pub negative_control_detected: bool,
    pub audit: AuditReport,
    pub pass: bool,
}

fn on_grid(a: f64) -> bool {
    let k = a / FRAC_PI_4;
    (k - k.round()).abs() < 1e-9
}

fn random_angle(rng: &mut impl Rng, discrete: bool) -> f64 {
    if discrete {
        rng.random_range(0..8u32) as f64 * FRAC_PI_4
    } else {
        rng.random_range(0.0..TAU)
    }
}

fn push_local(c: &mut Circuit, rng: &mut impl Rng, w: usize, discrete: bool) -> Result<()> {
    c.push(match rng.random_range(0..3u32) {
        0 => Gate::rx(w, random_angle(rng, discrete)),
        1 => Gate::rz(w, random_angle(rng, discrete)),
        _ => Gate::h(w),
    })
}

/// One wire: a run of local gates. Two wires: up to `MAX_ENTANGLERS` blocks
/// of local gates each closed by a CNOT, then a local tail.
fn random_circuit(rng: &mut impl Rng, n_wires: usize, discrete: bool) -> Result<Circuit> {
    let mut c = Circuit::new(n_wires);
    if n_wires == 1 {
        for _ in 0..rng.random_range(1..=MAX_GATES) {
            push_local(&mut c, rng, 0, discrete)?;
        }
        return Ok(c);
    }
    for _ in 0..rng.random_range(1..=MAX_ENTANGLERS) {
        for _ in 0..rng.random_range(0..=3) {
            let w = rng.random_range(0..n_wires);
            push_local(&mut c, rng, w, discrete)?;
        }
        let w = rng.random_range(0..n_wires);
        c.push(Gate::cnot(w, 1 - w))?;
    }
    for _ in 0..rng.random_range(0..=3) {
        let w = rng.random_range(0..n_wires);
        push_local(&mut c, rng, w, discrete)?;
    }
    Ok(c)
}

/// Deterministic suite of `n` circuits within the size bound. In the
/// eight-angle domain only circuits whose compiled angles stay on the
/// `kπ/4` grid are kept.
pub fn selftest_circuits(n: usize, domain: ThetaDomain, seed: u64) -> Result<Vec<(Circuit, MeasurementPattern)>> {
    let discrete = domain == ThetaDomain::Discrete8;
    let mut rng = stream(seed, tag::SELFTEST);
    let mut out = Vec::with_capacity(n);
    // Bell preparation first: a guaranteed entangling case.
    let mut bell = Circuit::new(2);
    bell.push(Gate::h(0))?;
    bell.push(Gate::cnot(0, 1))?;
    let mut candidates = vec![bell];
    let mut attempts = 0usize;
    while out.len() < n {
        attempts += 1;
        if attempts > 1000 * n.max(1) {
            return Err(Error::InvalidArgument("could not draw enough self-test circuits".into()));
        }
        let c = match candidates.pop() {
            Some(c) => c,
            None => {
                let wires = rng.random_range(1..=MAX_WIRES);
                random_circuit(&mut rng, wires, discrete)?
            }
        };
        let p = compile_circuit(&c)?;
        if p.graph().bricks_per_row() > MAX_BRICKS || (discrete && !p.phis().iter().all(|&a| on_grid(a))) {
            continue;
        }
        out.push((c, p));
    }
    Ok(out)
}

fn direct_distribution(c: &Circuit) -> Result<Vec<f64>> {
    let wires: Vec<usize> = (0..c.n_qubits()).collect();
    run_circuit(&Statevector::zero(c.n_qubits())?, c)?.readout_distribution(&wires)
}

fn equivalence_case(c: &Circuit, p: &MeasurementPattern, ubqc: &UbqcConfig, seed: u64) -> Result<EquivalenceCase> {
    let empty = Circuit::new(c.n_qubits());
    let direct = direct_distribution(c)?;
    let corrected = EvalOptions::default();
    let uncorrected = EvalOptions {
        corrections: false,
        ..EvalOptions::default()
    };
    let mbqc = evaluate_pattern_with(p, &empty, EvalMode::Exact, &corrected)?;
    let bare = evaluate_pattern_with(p, &empty, EvalMode::Exact, &uncorrected)?;
    let delegated = delegated_exact(p, ubqc, &mut stream(seed, tag::UBQC_SECRETS - 1))?;
    let tv_mbqc = total_variation(&mbqc, &direct);
    let tv_ubqc = total_variation(&delegated, &direct);
    Ok(EquivalenceCase {
        n_wires: c.n_qubits(),
        n_bricks: p.graph().bricks_per_row(),
        n_gates: c.len(),
        tv_mbqc,
        tv_ubqc,
        tv_uncorrected: total_variation(&bare, &direct),
        pass: tv_mbqc <= EQUIVALENCE_TV && tv_ubqc <= EQUIVALENCE_TV,
    })
}

/// Two patterns of identical shape with different angles.
fn audit_pair(suite: &[(Circuit, MeasurementPattern)]) -> Result<(&MeasurementPattern, &MeasurementPattern)> {
    for (i, (_, a)) in suite.iter().enumerate() {
        for (_, b) in &suite[i + 1..] {
            let same_shape = a.n_wires() == b.n_wires() && a.graph().n_bricks() == b.graph().n_bricks();
            if same_shape && a.n_wires() == MAX_WIRES && a.phis() != b.phis() {
                return Ok((a, b));
            }
        }
    }
    Err(Error::InvalidArgument("self-test suite has no two distinct computations of equal shape".into()))
}

/// Server transcripts of `sessions` delegated runs of `pattern`.
pub fn collect_transcripts(
    pattern: &MeasurementPattern,
    config: &UbqcConfig,
    seed: u64,
    sessions: usize,
) -> Result<Vec<crate::ubqc::ProtocolTranscript>> {
    (0..sessions as u64)
        .map(|shot| Ok(delegate_shot(pattern, config, seed, shot)?.transcript))
        .collect()
}

/// Runs the equivalence suite and the blindness audit under `config.theta`.
pub fn run_selftest(config: &SelftestConfig) -> Result<SelftestReport> {
    let ubqc = UbqcConfig {
        theta: config.theta,
        ..UbqcConfig::default()
    };
    let suite = selftest_circuits(config.n_circuits, config.theta, config.seed)?;
    let equivalence = suite
        .iter()
        .map(|(c, p)| equivalence_case(c, p, &ubqc, config.seed))
        .collect::<Result<Vec<_>>>()?;
    let equivalence_pass = equivalence.iter().all(|e| e.pass);
    let negative_control_detected = equivalence.iter().any(|e| e.tv_uncorrected > NEGATIVE_CONTROL_TV);

    let (a, b) = audit_pair(&suite)?;
    let base = config.seed.wrapping_mul(2);
    let groups = vec![
        collect_transcripts(a, &ubqc, base, config.sessions)?,
        collect_transcripts(b, &ubqc, base + 1, config.sessions)?,
    ];
    let audit = blindness_audit(&groups, config.theta, config.alpha)?;
    let pass = equivalence_pass && negative_control_detected && audit.pass;
    Ok(SelftestReport {
        theta_domain: config.theta.tag(),
        equivalence,
        equivalence_pass,
        negative_control_detected,
        audit,
        pass,
    })
}
