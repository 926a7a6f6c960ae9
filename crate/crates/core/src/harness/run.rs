//! Command runners. Each validates its config and loads its inputs before
//! creating any output, then writes a manifest and its results under a
//! locked output directory.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::config::{Command, ExperimentConfig};
use super::pipeline::{dense_features, federated_split, load_raw, single_split, RawData, Split};
use super::selftest::{run_selftest, SelftestConfig};
use crate::attack::{attack_result_json, run_attack, sample_gradient, victim_upload, write_pgm, AttackConfig, AttackResult, Defense};
use crate::error::{Error, Result};
use crate::federated::{federated_train, FederationConfig};
use crate::rng::{stream, tag};
use crate::vqc::io::{load_model, save_model, write_history};
use crate::vqc::{
    train_classical_baseline, train_single, BaselineConfig, ClassifierTemplate, HistoryRecord, LabeledSample,
    ModelParams, TrainConfig, TrainOutcome,
};

/// Version tag recorded in every manifest.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id())?;
                Ok(OutputLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Config(format!(
                "output directory {} is in use by another run",
                dir.display()
            ))),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Manifest document: command, code version, seed and every resolved key.
pub fn manifest_json(config: &ExperimentConfig) -> String {
    let cfg: Map<String, Value> = config.to_pairs().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    let doc = json!({
        "command": config.command.tag(),
        "code_version": CODE_VERSION,
        "seed": config.seed,
        "config": cfg,
    });
    serde_json::to_string_pretty(&doc).expect("manifest serializes") + "\n"
}

/// Result of a run: whether every check inside it held, and its summary.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub pass: bool,
    pub summary: Value,
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    fs::write(path, text)?;
    Ok(())
}

fn save_history(path: &Path, history: &[HistoryRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_history(&mut w, history)?;
    w.flush()?;
    Ok(())
}

fn last_some(history: &[HistoryRecord], f: impl Fn(&HistoryRecord) -> Option<f64>) -> Option<f64> {
    history.iter().rev().find_map(f)
}

/// Final accuracies and loss of a history.
pub fn history_summary(history: &[HistoryRecord]) -> Value {
    json!({
        "iterations": history.last().map_or(0, |r| r.iteration),
        "final_loss": history.last().map(|r| r.loss),
        "final_train_acc": last_some(history, |r| r.train_acc),
        "final_val_acc": last_some(history, |r| r.val_acc),
    })
}

/// Classifier template described by `config`.
pub fn classifier_template(config: &ExperimentConfig) -> Result<ClassifierTemplate> {
    ClassifierTemplate::new(config.num_qubits, config.circuit_depth, &[0], config.rotation_layout)
}

/// Single-client training settings of `config`.
pub fn train_config(config: &ExperimentConfig) -> TrainConfig {
    TrainConfig {
        learning_rate: config.learning_rate,
        iterations: config.num_iterations,
        batch_size: config.batch_size,
        seed: config.seed,
        eval_every: config.eval_every,
        eval_subset: config.eval_subset,
        input_noise: config.input_noise,
        gradient_noise: config.gradient_noise,
        gradient_method: config.gradient_method,
        backend: config.backend,
        record_wallclock: config.record_wallclock,
    }
}

/// Federated settings of `config`, with privacy strength `mu`.
pub fn federation_config(config: &ExperimentConfig, mu: f64) -> FederationConfig {
    FederationConfig {
        n_clients: config.num_clients,
        samples_per_client: config.training_set_per_client,
        batch_size: config.batch_size_per_client,
        iterations: config.num_iterations,
        learning_rate: config.learning_rate,
        clip_bound: config.gradient_bound,
        clip_mode: config.clip_mode,
        mu,
        per_client_mu: config.per_client_mu.clone(),
        noise: config.noise_kind,
        seed: config.seed,
        eval_every: config.eval_every,
        gradient_method: config.gradient_method,
        backend: config.backend,
        record_wallclock: config.record_wallclock,
    }
}

/// Baseline settings matched to the classifier's iteration budget.
fn baseline_config(config: &ExperimentConfig) -> BaselineConfig {
    BaselineConfig {
        seed: config.seed,
        eval_every: config.eval_every,
        ..BaselineConfig::default()
    }
}

/// Single-client training on `split`.
pub fn run_single(config: &ExperimentConfig, split: &Split) -> Result<TrainOutcome> {
    train_single(&split.train, &split.validation, &classifier_template(config)?, &train_config(config))
}

/// Federated training under `config` with privacy strength `mu`.
pub fn run_federated(config: &ExperimentConfig, raw: &RawData, mu: f64) -> Result<TrainOutcome> {
    let (mut shards, validation) = federated_split(config, raw, config.seed)?;
    federated_train(&mut shards, &validation, &classifier_template(config)?, &federation_config(config, mu))
}

fn point_dir(out: &Path, name: &str) -> Result<PathBuf> {
    let dir = out.join(name);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn final_val(history: &[HistoryRecord]) -> f64 {
    last_some(history, |r| r.val_acc).unwrap_or(f64::NAN)
}

/// Attack target: the `index`-th validation sample of each class.
pub fn attack_targets(split: &Split, n_classes: usize, index: usize) -> Result<Vec<LabeledSample>> {
    (0..n_classes)
        .map(|c| {
            split
                .validation
                .iter()
                .filter(|s| s.class() == c)
                .nth(index)
                .cloned()
                .ok_or_else(|| Error::Config(format!("attack_sample_index: class {c} has no sample {index}")))
        })
        .collect()
}

/// Attacks one target sample, optionally through the privacy defense.
pub fn attack_sample(
    config: &ExperimentConfig,
    template: &ClassifierTemplate,
    params: &ModelParams,
    target: &LabeledSample,
    stream_id: u64,
) -> Result<AttackResult> {
    let upload = if config.attack_dp {
        let defense = Defense {
            clip_bound: config.gradient_bound,
            clip_mode: config.clip_mode,
            mu: config.noise_strength,
            noise: config.noise_kind,
        };
        let mut rng = stream(config.seed, tag::ATTACK + 1 + stream_id);
        victim_upload(template, params, &target.input, target.label(), Some(defense), &mut rng)?
    } else {
        sample_gradient(template, params, &target.input, target.label())?
    };
    let attack = AttackConfig {
        domain: config.attack_domain,
        ..AttackConfig::all_labels(
            template.n_outcomes(),
            config.attack_iterations,
            config.attack_learning_rate,
            config.attack_method,
        )
    };
    run_attack(template, params, &upload, &attack, Some(&target.input))
}

/// PGM of `|a_j|` when the state is a square image; other sizes are skipped.
fn write_image(path: &Path, state: &crate::quantum::Statevector) -> Result<()> {
    let dim = state.amplitudes().len();
    let side = (dim as f64).sqrt().round() as usize;
    if side * side != dim {
        return Ok(());
    }
    let mut w = BufWriter::new(File::create(path)?);
    write_pgm(&mut w, state, side)?;
    w.flush()?;
    Ok(())
}

enum Prepared {
    Single(Split),
    Federated(RawData),
    Sweep(RawData),
    Attack {
        split: Split,
        template: ClassifierTemplate,
        params: ModelParams,
    },
    Selftest,
}

fn prepare(config: &ExperimentConfig) -> Result<Prepared> {
    config.validate()?;
    Ok(match config.command {
        Command::TrainSingle => Prepared::Single(single_split(config, &load_raw(config)?, config.seed)?),
        Command::TrainFederated => {
            let raw = load_raw(config)?;
            federated_split(config, &raw, config.seed)?;
            Prepared::Federated(raw)
        }
        Command::RobustnessSweep => {
            let raw = load_raw(config)?;
            single_split(config, &raw, config.seed)?;
            Prepared::Sweep(raw)
        }
        Command::DpSweep => {
            let raw = load_raw(config)?;
            federated_split(config, &raw, config.seed)?;
            Prepared::Sweep(raw)
        }
        Command::Attack => {
            let path = config.attack_model.as_ref().expect("validated");
            if !path.is_file() {
                return Err(Error::Config(format!("attack_model: {} does not exist", path.display())));
            }
            let (template, params) = load_model(path)?;
            let split = single_split(config, &load_raw(config)?, config.seed)?;
            let dim = split.validation.first().map_or(0, |s| s.input.n_qubits());
            if dim != template.n_qubits() {
                return Err(Error::Config(format!(
                    "attack_model: the model has {} qubits but the data encode to {dim}",
                    template.n_qubits()
                )));
            }
            attack_targets(&split, template.n_outcomes(), config.attack_sample_index)?;
            Prepared::Attack { split, template, params }
        }
        Command::UbqcSelftest => Prepared::Selftest,
    })
}

/// Runs `config.command`, writing outputs into `out`.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<RunOutcome> {
    let prepared = prepare(config)?;
    let _lock = OutputLock::acquire(out)?;
    fs::write(out.join("manifest.json"), manifest_json(config))?;
    let outcome = match prepared {
        Prepared::Single(split) => train_single_cmd(config, &split, out)?,
        Prepared::Federated(raw) => {
            let result = run_federated(config, &raw, config.noise_strength)?;
            save_history(&out.join("history.jsonl"), &result.history)?;
            save_model(&out.join("model.bin"), &classifier_template(config)?, &result.params)?;
            RunOutcome {
                pass: true,
                summary: history_summary(&result.history),
            }
        }
        Prepared::Sweep(raw) if config.command == Command::RobustnessSweep => robustness_cmd(config, &raw, out)?,
        Prepared::Sweep(raw) => dp_sweep_cmd(config, &raw, out)?,
        Prepared::Attack { split, template, params } => attack_cmd(config, &split, &template, &params, out)?,
        Prepared::Selftest => {
            let report = run_selftest(&SelftestConfig {
                n_circuits: config.selftest_circuits,
                theta: config.theta_domain,
                sessions: config.audit_sessions,
                alpha: config.audit_alpha,
                seed: config.seed,
            })?;
            let value = serde_json::to_value(&report)?;
            write_json(&out.join("report.json"), &value)?;
            RunOutcome {
                pass: report.pass,
                summary: json!({
                    "theta_domain": report.theta_domain,
                    "circuits": report.equivalence.len(),
                    "equivalence_pass": report.equivalence_pass,
                    "max_tv_mbqc": report.equivalence.iter().map(|e| e.tv_mbqc).fold(0.0, f64::max),
                    "max_tv_ubqc": report.equivalence.iter().map(|e| e.tv_ubqc).fold(0.0, f64::max),
                    "negative_control_detected": report.negative_control_detected,
                    "audit_tests": report.audit.n_tests,
                    "audit_rejected": report.audit.n_rejected,
                    "audit_pass": report.audit.pass,
                    "pass": report.pass,
                }),
            }
        }
    };
    write_json(&out.join("summary.json"), &outcome.summary)?;
    Ok(outcome)
}

fn train_single_cmd(config: &ExperimentConfig, split: &Split, out: &Path) -> Result<RunOutcome> {
    let result = run_single(config, split)?;
    save_history(&out.join("history.jsonl"), &result.history)?;
    save_model(&out.join("model.bin"), &classifier_template(config)?, &result.params)?;
    let mut summary = history_summary(&result.history);
    if config.baseline {
        let (mlp, history) = train_classical_baseline(
            &dense_features(&split.train),
            &dense_features(&split.validation),
            split.class_names.len(),
            &baseline_config(config),
        )?;
        save_history(&out.join("baseline_history.jsonl"), &history)?;
        summary["baseline_val_acc"] = json!(mlp.accuracy(&dense_features(&split.validation))?);
    }
    Ok(RunOutcome { pass: true, summary })
}

fn robustness_cmd(config: &ExperimentConfig, raw: &RawData, out: &Path) -> Result<RunOutcome> {
    let mut points = Vec::new();
    for &sigma in &config.sweep_sigmas {
        let mut finals = Vec::new();
        for &seed in &config.sweep_seeds {
            let mut point = config.clone().with_seed(seed);
            point.input_noise = sigma;
            if sigma == 0.0 {
                point.gradient_noise = 0.0;
            }
            let result = run_single(&point, &single_split(&point, raw, seed)?)?;
            save_history(&point_dir(out, &format!("sigma_{sigma}_seed_{seed}"))?.join("history.jsonl"), &result.history)?;
            finals.push(final_val(&result.history));
        }
        points.push(json!({ "sigma": sigma, "final_val_acc": finals, "mean_final_val_acc": mean(&finals) }));
    }
    Ok(RunOutcome {
        pass: true,
        summary: json!({ "points": points }),
    })
}

fn dp_sweep_cmd(config: &ExperimentConfig, raw: &RawData, out: &Path) -> Result<RunOutcome> {
    let mut points = Vec::new();
    for &mu in &config.sweep_mus {
        let mut finals = Vec::new();
        for &seed in &config.sweep_seeds {
            let point = config.clone().with_seed(seed);
            let result = run_federated(&point, raw, mu)?;
            save_history(&point_dir(out, &format!("mu_{mu}_seed_{seed}"))?.join("history.jsonl"), &result.history)?;
            finals.push(final_val(&result.history));
        }
        points.push(json!({ "mu": mu.to_string(), "final_val_acc": finals, "mean_final_val_acc": mean(&finals) }));
    }
    Ok(RunOutcome {
        pass: true,
        summary: json!({ "points": points }),
    })
}

fn attack_cmd(
    config: &ExperimentConfig,
    split: &Split,
    template: &ClassifierTemplate,
    params: &ModelParams,
    out: &Path,
) -> Result<RunOutcome> {
    let targets = attack_targets(split, template.n_outcomes(), config.attack_sample_index)?;
    let mut entries = Vec::new();
    for (class, target) in targets.iter().enumerate() {
        let name = split.class_names.get(class).cloned().unwrap_or_else(|| class.to_string());
        let result = attack_sample(config, template, params, target, class as u64)?;
        fs::write(out.join(format!("attack_{name}.json")), attack_result_json(&result)? + "\n")?;
        write_image(&out.join(format!("truth_{name}.pgm")), &target.input)?;
        for run in &result.runs {
            let k = crate::vqc::argmax(&run.label);
            let label = split.class_names.get(k).cloned().unwrap_or_else(|| k.to_string());
            write_image(&out.join(format!("recovered_{name}_as_{label}.pgm")), &run.state)?;
        }
        let recovered = crate::vqc::argmax(&result.recovered_label);
        entries.push(json!({
            "digit": name,
            "class": class,
            "recovered_class": recovered,
            "label_correct": recovered == class,
            "fidelity_vs_truth": result.fidelity_vs_truth,
            "final_loss": result.final_loss,
            "per_label_losses": result.runs.iter().map(|r| r.final_loss).collect::<Vec<_>>(),
        }));
    }
    Ok(RunOutcome {
        pass: true,
        summary: json!({ "dp": config.attack_dp, "targets": entries }),
    })
}
