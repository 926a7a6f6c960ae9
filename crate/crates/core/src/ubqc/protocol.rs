use rand::Rng;

use super::message::{Message, ProtocolTranscript};
use super::session::{
    client_instruction, client_prepare, client_record, server_entangle, server_measure, ClientSession,
    ServerSession, UbqcConfig,
};
use crate::error::{Error, Result};
use crate::mbqc::register::{branch_sum, push_state_key, BranchNode};
use crate::mbqc::{compile_circuit, marginalize, EvalMode, MeasurementPattern};
use crate::quantum::Circuit;
use crate::rng::{stream, tag};

/// Result of one full protocol run.
#[derive(Clone, Debug)]
pub struct DelegatedShot {
    /// Decrypted output bits, top row most significant.
    pub output: usize,
    pub transcript: ProtocolTranscript,
    pub decrypted: Vec<u8>,
}

/// Runs the protocol once. Secrets come from `client_rng`, measurement
/// coins from `server_rng`.
pub fn run_session(
    pattern: &MeasurementPattern,
    config: &UbqcConfig,
    client_rng: &mut impl Rng,
    server_rng: &mut impl Rng,
) -> Result<DelegatedShot> {
    let (mut client, states) = client_prepare(pattern, config, client_rng);
    let mut server = server_entangle(states, pattern.graph())?;
    while !client.is_done() {
        let instr = client_instruction(&client)?;
        let result = server_measure(&mut server, &instr, server_rng)?;
        client_record(&mut client, &result)?;
    }
    server.finish();
    Ok(DelegatedShot {
        output: client.output_index(),
        decrypted: client.decrypted_outcomes().to_vec(),
        transcript: server.into_transcript(),
    })
}

/// Shot `shot` under `seed`: coins from stream `shot`, the same coins the
/// local sampled evaluator uses, and secrets from a disjoint stream.
pub fn delegate_shot(pattern: &MeasurementPattern, config: &UbqcConfig, seed: u64, shot: u64) -> Result<DelegatedShot> {
    let mut client_rng = stream(seed, tag::UBQC_SECRETS + shot);
    let mut server_rng = stream(seed, shot);
    run_session(pattern, config, &mut client_rng, &mut server_rng)
}

#[derive(Clone)]
struct Pair {
    client: ClientSession,
    server: ServerSession,
}

impl BranchNode for Pair {
    fn done(&self) -> bool {
        self.client.is_done()
    }

    fn probabilities(&self) -> Result<[f64; 2]> {
        self.server.probabilities(&client_instruction(&self.client)?)
    }

    fn advance(&mut self, outcome: u8) -> Result<()> {
        let instr = client_instruction(&self.client)?;
        let result = self.server.measure_forced(&instr, outcome)?;
        client_record(&mut self.client, &result)
    }

    fn key(&self) -> Vec<i64> {
        let mut key = vec![self.client.output_index() as i64];
        self.client.frame().push_key(&mut key);
        push_state_key(self.server.register(), &mut key);
        key
    }

    fn output_index(&self) -> usize {
        self.client.output_index()
    }
}

/// Exact output distribution of the protocol with one fixed draw of secrets,
/// summed over every server outcome branch.
pub fn delegated_exact(pattern: &MeasurementPattern, config: &UbqcConfig, client_rng: &mut impl Rng) -> Result<Vec<f64>> {
    let (client, states) = client_prepare(pattern, config, client_rng);
    let server = server_entangle(states, pattern.graph())?;
    let root = Pair {
        client: client.without_log(),
        server: server.without_log(),
    };
    branch_sum(root, 1 << pattern.n_wires(), config.branch_cap)
}

/// Compiles `circuit` and delegates it. Returns the output distribution
/// over all wires and one server transcript.
///
/// `Exact` draws one set of secrets from `seed` and sums all branches;
/// the transcript is shot 0 under `seed`. `Sampled` runs `shots` sessions
/// with fresh secrets each (see [`delegate_shot`]) and returns the
/// transcript of shot 0.
pub fn run_delegated(
    circuit: &Circuit,
    mode: EvalMode,
    config: &UbqcConfig,
    seed: u64,
) -> Result<(Vec<f64>, ProtocolTranscript)> {
    let pattern = compile_circuit(circuit)?;
    match mode {
        EvalMode::Exact => {
            let mut client_rng = stream(seed, tag::UBQC_SECRETS - 1);
            let dist = delegated_exact(&pattern, config, &mut client_rng)?;
            let transcript = delegate_shot(&pattern, config, seed, 0)?.transcript;
            Ok((dist, transcript))
        }
        EvalMode::Sampled { shots, seed } => {
            if shots == 0 {
                return Err(Error::InvalidArgument("sampled mode needs at least one shot".into()));
            }
            let mut counts = vec![0usize; 1 << pattern.n_wires()];
            let mut first = None;
            for shot in 0..shots as u64 {
                let run = delegate_shot(&pattern, config, seed, shot)?;
                counts[run.output] += 1;
                if first.is_none() {
                    first = Some(run.transcript);
                }
            }
            let dist = counts.iter().map(|&c| c as f64 / shots as f64).collect();
            Ok((dist, first.unwrap_or_default()))
        }
    }
}

/// Delegated readout distribution on `readout` (exact mode uses seed 0).
pub fn delegated_distribution(
    circuit: &Circuit,
    readout: &[usize],
    mode: EvalMode,
    config: &UbqcConfig,
) -> Result<Vec<f64>> {
    let pattern = compile_circuit(circuit)?;
    let dist = match mode {
        EvalMode::Exact => {
            let mut client_rng = stream(0, tag::UBQC_SECRETS - 1);
            delegated_exact(&pattern, config, &mut client_rng)?
        }
        EvalMode::Sampled { .. } => run_delegated(circuit, mode, config, 0)?.0,
    };
    marginalize(&dist, circuit.n_qubits(), readout)
}

/// `δ` values of a transcript in order.
pub fn transcript_angles(t: &[Message]) -> Vec<f64> {
    t.iter()
        .filter_map(|m| match m {
            Message::MeasureInstruction { delta, .. } => Some(*delta),
            _ => None,
        })
        .collect()
}
