use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::message::Message;
use crate::error::{Error, Result};
use crate::mbqc::register::{activate, Frame, Influence, Schedule};
use crate::mbqc::{adapt_angle, reduce_angle, BrickworkGraph, MeasurementPattern, Site, DEFAULT_BRANCH_CAP};
use crate::quantum::{Statevector, MAX_QUBITS};

/// Where the client draws its rotation secrets `θ` from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThetaDomain {
    /// Uniform on `[0, 2π)`.
    Continuous,
    /// Uniform on `{kπ/4 : k = 0..7}`.
    Discrete8,
    /// Always 0. Leaks the computation; negative control only.
    Zero,
}

impl ThetaDomain {
    pub fn tag(&self) -> &'static str {
        match self {
            ThetaDomain::Continuous => "continuous",
            ThetaDomain::Discrete8 => "discrete8",
            ThetaDomain::Zero => "zero",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "continuous" => Ok(ThetaDomain::Continuous),
            "discrete8" => Ok(ThetaDomain::Discrete8),
            "zero" => Ok(ThetaDomain::Zero),
            other => Err(Error::InvalidArgument(format!("unknown theta domain {other:?}"))),
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> f64 {
        match self {
            ThetaDomain::Continuous => rng.random::<f64>() * TAU,
            ThetaDomain::Discrete8 => rng.random_range(0..8u8) as f64 * FRAC_PI_4,
            ThetaDomain::Zero => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UbqcConfig {
    pub theta: ThetaDomain,
    /// Draw uniform outcome flips `r`; when false every `r` is 0.
    pub flip_outcomes: bool,
    pub branch_cap: usize,
}

impl Default for UbqcConfig {
    fn default() -> Self {
        UbqcConfig {
            theta: ThetaDomain::Continuous,
            flip_outcomes: true,
            branch_cap: DEFAULT_BRANCH_CAP,
        }
    }
}

struct ClientShared {
    pattern: MeasurementPattern,
    theta: Vec<f64>,
    r: Vec<u8>,
    influence: Influence,
    out_bit: Vec<Option<usize>>,
}

/// Client state: the pattern, the secrets, and the decrypted outcomes.
#[derive(Clone)]
pub struct ClientSession {
    shared: Arc<ClientShared>,
    cursor: usize,
    frame: Frame,
    outputs: usize,
    decrypted: Option<Vec<u8>>,
}

/// Draws `θ` and `r` for every site and prepares `(|0⟩ + e^{iθ}|1⟩)/√2`.
/// Returned states are indexed by site.
pub fn client_prepare(
    pattern: &MeasurementPattern,
    config: &UbqcConfig,
    rng: &mut impl Rng,
) -> (ClientSession, Vec<Statevector>) {
    let n = pattern.n_sites();
    let mut theta = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for _ in 0..n {
        theta.push(config.theta.draw(rng));
        r.push(if config.flip_outcomes { rng.random_range(0..2u8) } else { 0 });
    }
    let states = theta.iter().map(|&t| Statevector::plus_state(t)).collect();
    let mut out_bit = vec![None; n];
    let n_out = pattern.output_sites().len();
    for (row, &site) in pattern.output_sites().iter().enumerate() {
        out_bit[site] = Some(n_out - 1 - row);
    }
    let shared = ClientShared {
        pattern: pattern.clone(),
        theta,
        r,
        influence: Influence::new(pattern),
        out_bit,
    };
    (
        ClientSession {
            shared: Arc::new(shared),
            cursor: 0,
            frame: Frame::default(),
            outputs: 0,
            decrypted: Some(Vec::with_capacity(n)),
        },
        states,
    )
}

impl ClientSession {
    pub fn pattern(&self) -> &MeasurementPattern {
        &self.shared.pattern
    }

    /// Secret rotation of every site.
    pub fn thetas(&self) -> &[f64] {
        &self.shared.theta
    }

    /// Secret outcome flip of every site.
    pub fn flips(&self) -> &[u8] {
        &self.shared.r
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn is_done(&self) -> bool {
        self.cursor == self.shared.pattern.n_sites()
    }

    /// Decrypted outcomes in measurement order.
    pub fn decrypted_outcomes(&self) -> &[u8] {
        self.decrypted.as_deref().unwrap_or(&[])
    }

    /// Decrypted output bits, top row most significant.
    pub fn output_index(&self) -> usize {
        self.outputs
    }

    pub(crate) fn without_log(mut self) -> Self {
        self.decrypted = None;
        self
    }

    pub(crate) fn frame(&self) -> &Frame {
        &self.frame
    }
}

/// `δ = φ' + θ + π·r mod 2π` for the cursor site, where `φ'` is the
/// flow-adapted target angle.
pub fn client_instruction(session: &ClientSession) -> Result<Message> {
    if session.is_done() {
        return Err(Error::Protocol("instruction requested after the last site".into()));
    }
    let sh = &session.shared;
    let site = session.cursor;
    let (sx, sz) = session.frame.peek(site);
    let adapted = adapt_angle(sh.pattern.phi(site), sx, sz);
    let delta = reduce_angle(adapted + sh.theta[site] + PI * f64::from(sh.r[site]));
    Ok(Message::MeasureInstruction {
        site: sh.pattern.graph().site(site),
        delta,
    })
}

/// Decrypts `s = b ⊕ r` for the cursor site and advances.
pub fn client_record(session: &mut ClientSession, result: &Message) -> Result<()> {
    let Message::MeasureResult { site, b } = *result else {
        return Err(Error::Protocol(format!("expected a measurement result, got {result:?}")));
    };
    if session.is_done() {
        return Err(Error::Protocol("result received after the last site".into()));
    }
    let sh = Arc::clone(&session.shared);
    let expected = sh.pattern.graph().site(session.cursor);
    if site != expected {
        return Err(Error::Protocol(format!(
            "result for site {site:?} out of order, expected {expected:?}"
        )));
    }
    let index = session.cursor;
    let s = (b ^ sh.r[index]) & 1;
    session.frame.take(index);
    session.frame.record(&sh.influence, index, s);
    if let Some(bit) = sh.out_bit[index] {
        session.outputs |= usize::from(s) << bit;
    }
    if let Some(log) = session.decrypted.as_mut() {
        log.push(s);
    }
    session.cursor += 1;
    Ok(())
}

struct ServerShared {
    graph: BrickworkGraph,
    schedule: Option<Schedule>,
    states: Vec<Statevector>,
}

#[derive(Clone)]
enum Register {
    /// Sites join just before a neighbor is measured and leave once
    /// measured; measurements must follow column-major order.
    Lazy { state: Statevector, step: usize },
    /// Every site held at once; any order.
    Full { state: Statevector, measured: Vec<bool> },
}

/// Server state: received qubits, the entangled register, and the log of
/// everything it has seen.
#[derive(Clone)]
pub struct ServerSession {
    shared: Arc<ServerShared>,
    register: Register,
    log: Option<Vec<Message>>,
}

fn check_states(states: &[Statevector], graph: &BrickworkGraph) -> Result<()> {
    if states.len() != graph.n_sites() {
        return Err(Error::Protocol(format!(
            "missing site state: got {} states for {} sites",
            states.len(),
            graph.n_sites()
        )));
    }
    if let Some(i) = states.iter().position(|s| s.n_qubits() != 1) {
        return Err(Error::Protocol(format!("state for site {i} is not a single qubit")));
    }
    Ok(())
}

fn prep_log(graph: &BrickworkGraph) -> Vec<Message> {
    let mut log: Vec<Message> = (0..graph.n_sites())
        .map(|i| Message::QubitPrep { site: graph.site(i) })
        .collect();
    log.push(Message::EntangleAck);
    log
}

/// Receives one state per site and entangles them along every graph edge.
/// The register is built lazily in measurement order, holding only the
/// sites between the measurement front and its neighbors.
pub fn server_entangle(states: Vec<Statevector>, graph: &BrickworkGraph) -> Result<ServerSession> {
    check_states(&states, graph)?;
    let schedule = Schedule::new(graph);
    let mut state = Statevector::zero(0)?;
    let shared = ServerShared {
        graph: graph.clone(),
        schedule: Some(schedule),
        states,
    };
    {
        let step = &shared.schedule.as_ref().unwrap().steps[0];
        activate(&mut state, step, |i| shared.states[i].clone())?;
    }
    Ok(ServerSession {
        register: Register::Lazy { state, step: 0 },
        log: Some(prep_log(graph)),
        shared: Arc::new(shared),
    })
}

/// Like [`server_entangle`] but materializes the whole graph state at once
/// (at most 20 sites). Qubit `i` of the register is site `i`.
pub fn entangle_all(states: Vec<Statevector>, graph: &BrickworkGraph) -> Result<ServerSession> {
    check_states(&states, graph)?;
    if graph.n_sites() > MAX_QUBITS {
        return Err(Error::RegisterTooLarge(graph.n_sites()));
    }
    let mut state = Statevector::zero(0)?;
    for s in &states {
        state = state.push_qubit(s)?;
    }
    for &(a, b) in graph.cz_edges() {
        state.cz(graph.index(a), graph.index(b));
    }
    let n = graph.n_sites();
    Ok(ServerSession {
        register: Register::Full {
            state,
            measured: vec![false; n],
        },
        log: Some(prep_log(graph)),
        shared: Arc::new(ServerShared {
            graph: graph.clone(),
            schedule: None,
            states,
        }),
    })
}

impl ServerSession {
    /// The current register. For the lazy server this is the live window.
    pub fn register(&self) -> &Statevector {
        match &self.register {
            Register::Lazy { state, .. } | Register::Full { state, .. } => state,
        }
    }

    pub fn graph(&self) -> &BrickworkGraph {
        &self.shared.graph
    }

    /// Everything the server has seen so far.
    pub fn transcript(&self) -> &[Message] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn into_transcript(self) -> Vec<Message> {
        self.log.unwrap_or_default()
    }

    pub(crate) fn without_log(mut self) -> Self {
        self.log = None;
        self
    }

    /// Records the end of the session.
    pub fn finish(&mut self) {
        if let Some(log) = self.log.as_mut() {
            log.push(Message::Done);
        }
    }

    fn locate(&self, instr: &Message) -> Result<(Site, f64, usize)> {
        let Message::MeasureInstruction { site, delta } = *instr else {
            return Err(Error::Protocol(format!("expected a measurement instruction, got {instr:?}")));
        };
        if !(0.0..TAU).contains(&delta) {
            return Err(Error::Protocol(format!("angle {delta} outside [0, 2π)")));
        }
        let g = &self.shared.graph;
        if site.x >= g.n_cols() || site.y >= g.n_rows() {
            return Err(Error::Protocol(format!("site {site:?} is not on the graph")));
        }
        let index = g.index(site);
        let pos = match &self.register {
            Register::Lazy { step, .. } => {
                let schedule = self.shared.schedule.as_ref().expect("lazy server has a schedule");
                match schedule.steps.get(*step) {
                    Some(s) if s.site == index => s.pos,
                    Some(s) if index < s.site => {
                        return Err(Error::Protocol(format!("site {site:?} was already measured")))
                    }
                    _ => return Err(Error::Protocol(format!("site {site:?} measured out of order"))),
                }
            }
            Register::Full { measured, .. } => {
                if measured[index] {
                    return Err(Error::Protocol(format!("site {site:?} was already measured")));
                }
                index
            }
        };
        Ok((site, delta, pos))
    }

    /// Outcome probabilities of `instr` without measuring.
    pub fn probabilities(&self, instr: &Message) -> Result<[f64; 2]> {
        let (_, delta, pos) = self.locate(instr)?;
        self.register().xy_probabilities(pos, delta)
    }

    /// Applies `instr` with a forced outcome `b`.
    pub fn measure_forced(&mut self, instr: &Message, b: u8) -> Result<Message> {
        let (site, delta, pos) = self.locate(instr)?;
        let shared = Arc::clone(&self.shared);
        match &mut self.register {
            Register::Lazy { state, step } => {
                let (_, reduced) = state.project_out_xy(pos, delta, b)?;
                *state = reduced;
                *step += 1;
                let schedule = shared.schedule.as_ref().expect("lazy server has a schedule");
                if let Some(next) = schedule.steps.get(*step) {
                    activate(state, next, |i| shared.states[i].clone())?;
                }
            }
            Register::Full { state, measured } => {
                let (_, reduced) = state.project_out_xy(pos, delta, b)?;
                let sign = if b == 0 { 1.0 } else { -1.0 };
                let basis = Statevector::from_amplitudes(vec![
                    num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                    num_complex::Complex64::from_polar(sign * std::f64::consts::FRAC_1_SQRT_2, delta),
                ])?;
                *state = reduced.insert_qubit(pos, &basis);
                measured[pos] = true;
            }
        }
        let result = Message::MeasureResult { site, b };
        if let Some(log) = self.log.as_mut() {
            log.push(*instr);
            log.push(result);
        }
        Ok(result)
    }
}

/// Measures the instructed site at `δ`; outcome 0 when a uniform coin falls
/// below `p(0)`.
pub fn server_measure(session: &mut ServerSession, instr: &Message, rng: &mut impl Rng) -> Result<Message> {
    let p = session.probabilities(instr)?;
    let coin: f64 = rng.random();
    session.measure_forced(instr, u8::from(coin >= p[0]))
}
