//! Blind delegation of brickwork patterns.
//!
//! The client prepares every site as `(|0⟩ + e^{iθ}|1⟩)/√2` with secret
//! `θ`, asks for each measurement at `δ = φ' + θ + π·r` with a secret flip
//! `r`, and decrypts `s = b ⊕ r`. The server only ever sees qubits, `δ`
//! and raw outcomes `b`.

mod audit;
mod message;
mod protocol;
mod session;

pub use audit::{blindness_audit, AuditReport, AuditTest, MIN_TRANSCRIPTS};
pub use message::{read_transcript, write_transcript, Message, ProtocolTranscript};
pub use protocol::{
    delegate_shot, delegated_distribution, delegated_exact, run_delegated, run_session, transcript_angles,
    DelegatedShot,
};
pub use session::{
    client_instruction, client_prepare, client_record, entangle_all, server_entangle, server_measure, ClientSession,
    ServerSession, ThetaDomain, UbqcConfig,
};
