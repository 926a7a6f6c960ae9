//! Config-driven experiment runs behind the `qfl` binary.
//!
//! A run validates its configuration and loads its inputs first; only then
//! does it lock the output directory and write `manifest.json`, its result
//! files and `summary.json`. A manifest can be fed back as a config, and a
//! direct-backend rerun from it reproduces every history file exactly.

mod config;
mod pipeline;
mod run;
mod selftest;

pub use config::{Command, DatasetKind, EncodingKind, ExperimentConfig, KEYS};
pub use pipeline::{
    dense_features, federated_split, load_raw, rotation_encoder, rotation_samples, single_split, RawData, Split,
    ENCODER_QUBITS,
};
pub use run::{
    attack_sample, attack_targets, classifier_template, federation_config, history_summary, manifest_json, run_experiment,
    run_federated, run_single, train_config, OutputLock, RunOutcome, CODE_VERSION,
};
pub use selftest::{
    collect_transcripts, run_selftest, selftest_circuits, EquivalenceCase, SelftestConfig, SelftestReport,
    EQUIVALENCE_TV, MAX_BRICKS, MAX_WIRES, NEGATIVE_CONTROL_TV,
};

/// Preset configs: `(name, command, text)`. `full` presets use the
/// parameter-table values, `ci` presets are reduced for quick runs.
pub const PRESETS: &[(&str, Command, &str)] = &[
    ("train-single-mnist-full", Command::TrainSingle, include_str!("../../configs/train-single-mnist-full.conf")),
    ("train-single-mnist-ci", Command::TrainSingle, include_str!("../../configs/train-single-mnist-ci.conf")),
    ("train-single-wdbc-full", Command::TrainSingle, include_str!("../../configs/train-single-wdbc-full.conf")),
    ("train-rotation-mnist-full", Command::TrainSingle, include_str!("../../configs/train-rotation-mnist-full.conf")),
    ("train-federated-mnist-full", Command::TrainFederated, include_str!("../../configs/train-federated-mnist-full.conf")),
    ("train-federated-mnist-ci", Command::TrainFederated, include_str!("../../configs/train-federated-mnist-ci.conf")),
    ("train-federated-wdbc-full", Command::TrainFederated, include_str!("../../configs/train-federated-wdbc-full.conf")),
    ("train-federated-vector-mu", Command::TrainFederated, include_str!("../../configs/train-federated-vector-mu.conf")),
    ("dp-sweep-mnist-full", Command::DpSweep, include_str!("../../configs/dp-sweep-mnist-full.conf")),
    ("dp-sweep-mnist-ci", Command::DpSweep, include_str!("../../configs/dp-sweep-mnist-ci.conf")),
    ("robustness-sweep-mnist-full", Command::RobustnessSweep, include_str!("../../configs/robustness-sweep-mnist-full.conf")),
    ("robustness-sweep-mnist-ci", Command::RobustnessSweep, include_str!("../../configs/robustness-sweep-mnist-ci.conf")),
    ("attack-mnist-full", Command::Attack, include_str!("../../configs/attack-mnist-full.conf")),
    ("attack-mnist-ci", Command::Attack, include_str!("../../configs/attack-mnist-ci.conf")),
    ("attack-mnist-dp-ci", Command::Attack, include_str!("../../configs/attack-mnist-dp-ci.conf")),
    ("ubqc-selftest", Command::UbqcSelftest, include_str!("../../configs/ubqc-selftest.conf")),
    ("ubqc-selftest-discrete", Command::UbqcSelftest, include_str!("../../configs/ubqc-selftest-discrete.conf")),
    ("ubqc-selftest-sabotage", Command::UbqcSelftest, include_str!("../../configs/ubqc-selftest-sabotage.conf")),
];

/// Text of preset `name`.
pub fn preset(name: &str) -> Option<(Command, &'static str)> {
    PRESETS.iter().find(|(n, _, _)| *n == name).map(|&(_, c, t)| (c, t))
}
