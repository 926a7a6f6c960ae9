//! Gradient-inversion attack: recover a client's input state and label
//! from one uploaded gradient by matching gradients.
//!
//! For each candidate label the attacker starts from the uniform
//! superposition and runs Adam on the amplitudes (real parts by default,
//! optionally real and imaginary parts), renormalizing after every step, to
//! minimize
//! `L_GA = ‖∇_Θ L(candidate) − target‖²`. The label whose run ends lowest
//! wins.

mod loss;
mod output;
mod run;

pub use loss::{attack_loss, input_gradient, sample_gradient, InputGradMethod};
pub use output::{attack_result_json, write_pgm};
pub use run::{
    attack_label, fidelity, run_attack, victim_upload, AttackConfig, AttackResult, CandidateDomain, Defense, LabelRun,
};
