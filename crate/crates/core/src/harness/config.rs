//! Flat `key = value` experiment configuration.
//!
//! Keys follow the parameter tables row by row (`classes`,
//! `gradient_bound`, `circuit_depth`, `num_qubits`, `learning_rate`,
//! `num_iterations`, `num_clients`, `training_set_per_client`,
//! `batch_size_per_client`, `batch_size`, `optimizer`) plus run settings.
//! Lines starting with `#` are comments. Unknown keys, repeated keys and
//! out-of-range values are errors.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt::Display;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::Value;

use crate::attack::{CandidateDomain, InputGradMethod};
use crate::data::Downsample;
use crate::error::{Error, Result};
use crate::federated::{ClipMode, NoiseKind};
use crate::mbqc::EvalMode;
use crate::ubqc::ThetaDomain;
use crate::vqc::{Backend, GradientMethod, RotationLayout};

/// Experiment kinds, one per CLI subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    TrainSingle,
    TrainFederated,
    Attack,
    UbqcSelftest,
    RobustnessSweep,
    DpSweep,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::TrainSingle,
        Command::TrainFederated,
        Command::Attack,
        Command::UbqcSelftest,
        Command::RobustnessSweep,
        Command::DpSweep,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Command::TrainSingle => "train-single",
            Command::TrainFederated => "train-federated",
            Command::Attack => "attack",
            Command::UbqcSelftest => "ubqc-selftest",
            Command::RobustnessSweep => "robustness-sweep",
            Command::DpSweep => "dp-sweep",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Command::ALL.into_iter().find(|c| c.tag() == s)
    }

    fn federated(&self) -> bool {
        matches!(self, Command::TrainFederated | Command::DpSweep)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    Mnist,
    Wdbc,
}

impl DatasetKind {
    pub fn tag(&self) -> &'static str {
        match self {
            DatasetKind::Mnist => "mnist",
            DatasetKind::Wdbc => "wdbc",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodingKind {
    Amplitude,
    /// Pixels become angles of a fixed encoder circuit whose output state
    /// is the classifier input.
    Rotation,
}

/// Fully resolved experiment settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub dataset: DatasetKind,
    pub data_dir: PathBuf,
    pub classes: usize,
    pub num_qubits: usize,
    pub circuit_depth: usize,
    pub rotation_layout: RotationLayout,
    pub learning_rate: f64,
    pub num_iterations: usize,
    pub batch_size: usize,
    pub num_clients: usize,
    pub training_set_per_client: usize,
    pub batch_size_per_client: usize,
    pub gradient_bound: f64,
    pub noise_strength: f64,
    pub per_client_mu: Option<Vec<f64>>,
    pub noise_kind: NoiseKind,
    pub clip_mode: ClipMode,
    pub seed: u64,
    pub backend: Backend,
    pub gradient_method: GradientMethod,
    pub train_size: usize,
    pub validation_size: usize,
    pub train_fraction: f64,
    pub downsample: Downsample,
    pub encoding: EncodingKind,
    pub encoder_depth: usize,
    pub rotation_angle_max: f64,
    pub baseline: bool,
    pub eval_every: usize,
    pub eval_subset: usize,
    pub input_noise: f64,
    pub gradient_noise: f64,
    pub record_wallclock: bool,
    pub sweep_sigmas: Vec<f64>,
    pub sweep_mus: Vec<f64>,
    pub sweep_seeds: Vec<u64>,
    pub attack_model: Option<PathBuf>,
    pub attack_iterations: usize,
    pub attack_learning_rate: f64,
    pub attack_method: InputGradMethod,
    pub attack_domain: CandidateDomain,
    pub attack_dp: bool,
    pub attack_sample_index: usize,
    pub audit_sessions: usize,
    pub audit_alpha: f64,
    pub theta_domain: ThetaDomain,
    pub selftest_circuits: usize,
}

/// Every accepted key, in manifest order.
pub const KEYS: &[&str] = &[
    "dataset",
    "data_dir",
    "classes",
    "num_qubits",
    "circuit_depth",
    "rotation_layout",
    "learning_rate",
    "num_iterations",
    "batch_size",
    "optimizer",
    "num_clients",
    "training_set_per_client",
    "batch_size_per_client",
    "gradient_bound",
    "noise_strength",
    "per_client_mu",
    "noise_kind",
    "clip_mode",
    "seed",
    "backend",
    "eval_mode",
    "shots",
    "gradient_method",
    "train_size",
    "validation_size",
    "train_fraction",
    "downsample",
    "encoding",
    "encoder_depth",
    "rotation_angle_max",
    "baseline",
    "eval_every",
    "eval_subset",
    "input_noise",
    "gradient_noise",
    "record_wallclock",
    "sweep_sigmas",
    "sweep_mus",
    "sweep_seeds",
    "attack_model",
    "attack_iterations",
    "attack_learning_rate",
    "attack_method",
    "fd_step",
    "attack_domain",
    "attack_dp",
    "attack_sample_index",
    "audit_sessions",
    "audit_alpha",
    "theta_domain",
    "selftest_circuits",
];

fn cfg_err(key: &str, msg: impl Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: Display,
{
    v.parse().map_err(|e| cfg_err(key, format!("cannot parse {v:?}: {e}")))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| num(key, x.trim())).collect()
}

fn join<T: Display>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(cfg_err(key, format!("expected true or false, got {v:?}"))),
    }
}

impl ExperimentConfig {
    /// Parameter-table defaults for `command` on `dataset`.
    pub fn defaults(command: Command, dataset: DatasetKind) -> Self {
        let mnist = dataset == DatasetKind::Mnist;
        let fed = command.federated();
        ExperimentConfig {
            command,
            dataset,
            data_dir: PathBuf::from("data"),
            classes: 2,
            num_qubits: if mnist { 8 } else { 6 },
            circuit_depth: 30,
            rotation_layout: RotationLayout::Zx,
            learning_rate: 0.001,
            num_iterations: match (fed, mnist) {
                (false, _) => 300,
                (true, true) => 1500,
                (true, false) => 1000,
            },
            batch_size: if mnist { 50 } else { 100 },
            num_clients: if mnist { 10 } else { 4 },
            training_set_per_client: if mnist { 200 } else { 100 },
            batch_size_per_client: 50,
            gradient_bound: 0.01,
            noise_strength: if command == Command::Attack { 0.05 } else { 1.0 },
            per_client_mu: None,
            noise_kind: NoiseKind::Gaussian,
            clip_mode: ClipMode::Elementwise,
            seed: 0,
            backend: Backend::Direct,
            gradient_method: GradientMethod::Adjoint,
            train_size: 2000,
            validation_size: if mnist { 500 } else { 169 },
            train_fraction: 0.8,
            downsample: Downsample::AreaAverage,
            encoding: EncodingKind::Amplitude,
            encoder_depth: 11,
            rotation_angle_max: FRAC_PI_4,
            baseline: false,
            eval_every: 10,
            eval_subset: 500,
            input_noise: 0.0,
            gradient_noise: if command == Command::RobustnessSweep { 0.001 } else { 0.0 },
            record_wallclock: false,
            sweep_sigmas: vec![0.0, 0.02, 0.05, 0.1],
            sweep_mus: vec![f64::INFINITY, 1.0, 0.1, 0.05],
            sweep_seeds: vec![0, 1, 2],
            attack_model: None,
            attack_iterations: 500,
            attack_learning_rate: 0.01,
            attack_method: InputGradMethod::default(),
            attack_domain: CandidateDomain::default(),
            attack_dp: false,
            attack_sample_index: 0,
            audit_sessions: 1000,
            audit_alpha: 0.01,
            theta_domain: ThetaDomain::Continuous,
            selftest_circuits: 12,
        }
    }

    fn eval_mode(&self) -> Option<EvalMode> {
        match self.backend {
            Backend::Direct => None,
            Backend::Mbqc(m) | Backend::Ubqc(m) => Some(m),
        }
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let v = v.trim();
        match key {
            "dataset" => {
                self.dataset = match v {
                    "mnist" => DatasetKind::Mnist,
                    "wdbc" => DatasetKind::Wdbc,
                    _ => return Err(cfg_err(key, format!("unknown dataset {v:?}"))),
                }
            }
            "data_dir" => self.data_dir = PathBuf::from(v),
            "classes" => self.classes = num(key, v)?,
            "num_qubits" => self.num_qubits = num(key, v)?,
            "circuit_depth" => self.circuit_depth = num(key, v)?,
            "rotation_layout" => self.rotation_layout = RotationLayout::from_tag(v).map_err(|e| cfg_err(key, e))?,
            "learning_rate" => self.learning_rate = num(key, v)?,
            "num_iterations" => self.num_iterations = num(key, v)?,
            "batch_size" => self.batch_size = num(key, v)?,
            "optimizer" => {
                if !v.eq_ignore_ascii_case("adam") {
                    return Err(cfg_err(key, format!("only adam is supported, got {v:?}")));
                }
            }
            "num_clients" => self.num_clients = num(key, v)?,
            "training_set_per_client" => self.training_set_per_client = num(key, v)?,
            "batch_size_per_client" => self.batch_size_per_client = num(key, v)?,
            "gradient_bound" => self.gradient_bound = num(key, v)?,
            "noise_strength" => self.noise_strength = num(key, v)?,
            "per_client_mu" => {
                self.per_client_mu = match v {
                    "" | "none" => None,
                    _ => Some(list(key, v)?),
                }
            }
            "noise_kind" => {
                self.noise_kind = match v {
                    "gaussian" => NoiseKind::Gaussian,
                    "laplace" => NoiseKind::Laplace,
                    _ => return Err(cfg_err(key, format!("unknown noise kind {v:?}"))),
                }
            }
            "clip_mode" => {
                self.clip_mode = match v {
                    "elementwise" => ClipMode::Elementwise,
                    "l2" => ClipMode::L2,
                    _ => return Err(cfg_err(key, format!("unknown clip mode {v:?}"))),
                }
            }
            "seed" => self.seed = num(key, v)?,
            "backend" => {
                let mode = self.eval_mode().unwrap_or(EvalMode::Exact);
                self.backend = match v {
                    "direct" => Backend::Direct,
                    "mbqc" => Backend::Mbqc(mode),
                    "ubqc" => Backend::Ubqc(mode),
                    _ => return Err(cfg_err(key, format!("unknown backend {v:?}"))),
                }
            }
            "eval_mode" | "shots" => {
                let current = self.eval_mode().unwrap_or(EvalMode::Exact);
                let mode = match (key, v) {
                    ("eval_mode", "exact") => EvalMode::Exact,
                    ("eval_mode", "sampled") => match current {
                        EvalMode::Sampled { .. } => current,
                        EvalMode::Exact => EvalMode::Sampled { shots: 1000, seed: self.seed },
                    },
                    ("eval_mode", _) => return Err(cfg_err(key, format!("unknown eval mode {v:?}"))),
                    _ => match current {
                        EvalMode::Sampled { seed, .. } => EvalMode::Sampled { shots: num(key, v)?, seed },
                        EvalMode::Exact => {
                            num::<usize>(key, v)?;
                            EvalMode::Exact
                        }
                    },
                };
                self.backend = match self.backend {
                    Backend::Direct => Backend::Direct,
                    Backend::Mbqc(_) => Backend::Mbqc(mode),
                    Backend::Ubqc(_) => Backend::Ubqc(mode),
                };
            }
            "gradient_method" => {
                self.gradient_method = match v {
                    "adjoint" => GradientMethod::Adjoint,
                    "parameter_shift" => GradientMethod::ParameterShift,
                    _ => return Err(cfg_err(key, format!("unknown gradient method {v:?}"))),
                }
            }
            "train_size" => self.train_size = num(key, v)?,
            "validation_size" => self.validation_size = num(key, v)?,
            "train_fraction" => self.train_fraction = num(key, v)?,
            "downsample" => {
                self.downsample = Downsample::from_tag(v).ok_or_else(|| cfg_err(key, format!("unknown method {v:?}")))?
            }
            "encoding" => {
                self.encoding = match v {
                    "amplitude" => EncodingKind::Amplitude,
                    "rotation" => EncodingKind::Rotation,
                    _ => return Err(cfg_err(key, format!("unknown encoding {v:?}"))),
                }
            }
            "encoder_depth" => self.encoder_depth = num(key, v)?,
            "rotation_angle_max" => self.rotation_angle_max = num(key, v)?,
            "baseline" => self.baseline = boolean(key, v)?,
            "eval_every" => self.eval_every = num(key, v)?,
            "eval_subset" => self.eval_subset = num(key, v)?,
            "input_noise" => self.input_noise = num(key, v)?,
            "gradient_noise" => self.gradient_noise = num(key, v)?,
            "record_wallclock" => self.record_wallclock = boolean(key, v)?,
            "sweep_sigmas" => self.sweep_sigmas = list(key, v)?,
            "sweep_mus" => self.sweep_mus = list(key, v)?,
            "sweep_seeds" => self.sweep_seeds = list(key, v)?,
            "attack_model" => {
                self.attack_model = match v {
                    "" | "none" => None,
                    _ => Some(PathBuf::from(v)),
                }
            }
            "attack_iterations" => self.attack_iterations = num(key, v)?,
            "attack_learning_rate" => self.attack_learning_rate = num(key, v)?,
            "attack_method" => {
                let step = match self.attack_method {
                    InputGradMethod::CentralFiniteDifference { step } => step,
                    InputGradMethod::Analytic => 1e-4,
                };
                self.attack_method = match v {
                    "finite_difference" => InputGradMethod::CentralFiniteDifference { step },
                    "analytic" => InputGradMethod::Analytic,
                    _ => return Err(cfg_err(key, format!("unknown method {v:?}"))),
                }
            }
            "fd_step" => {
                let step: f64 = num(key, v)?;
                if let InputGradMethod::CentralFiniteDifference { .. } = self.attack_method {
                    self.attack_method = InputGradMethod::CentralFiniteDifference { step };
                } else if !(step > 0.0) {
                    return Err(cfg_err(key, "must be positive"));
                }
            }
            "attack_domain" => {
                self.attack_domain =
                    CandidateDomain::from_tag(v).ok_or_else(|| cfg_err(key, format!("unknown domain {v:?}")))?
            }
            "attack_dp" => self.attack_dp = boolean(key, v)?,
            "attack_sample_index" => self.attack_sample_index = num(key, v)?,
            "audit_sessions" => self.audit_sessions = num(key, v)?,
            "audit_alpha" => self.audit_alpha = num(key, v)?,
            "theta_domain" => self.theta_domain = ThetaDomain::from_tag(v).map_err(|e| cfg_err(key, e))?,
            "selftest_circuits" => self.selftest_circuits = num(key, v)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Builds a config from `(key, value)` pairs on top of the defaults of
    /// the chosen dataset.
    pub fn from_pairs(command: Command, pairs: &[(String, String)]) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (i, (k, _)) in pairs.iter().enumerate() {
            if seen.insert(k.as_str(), i).is_some() {
                return Err(Error::Config(format!("key {k:?} given twice")));
            }
        }
        let dataset = match seen.get("dataset") {
            Some(&i) if pairs[i].1.trim() == "wdbc" => DatasetKind::Wdbc,
            _ => DatasetKind::Mnist,
        };
        let mut cfg = ExperimentConfig::defaults(command, dataset);
        // Backend before eval_mode/shots; fd_step after attack_method.
        let rank = |k: &str| match k {
            "backend" | "attack_method" | "seed" => 0,
            _ => 1,
        };
        let mut ordered: Vec<&(String, String)> = pairs.iter().collect();
        ordered.sort_by_key(|(k, _)| rank(k));
        for (k, v) in ordered {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses `key = value` lines.
    pub fn parse(command: Command, text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                what: "config line",
                line: i + 1,
                reason: format!("expected key = value, got {line:?}"),
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_pairs(command, &pairs)
    }

    /// Reads the `config` object of a run manifest.
    pub fn from_manifest(command: Command, text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        if let Some(c) = doc.get("command").and_then(Value::as_str) {
            if c != command.tag() {
                return Err(Error::Config(format!(
                    "manifest is for {c}, not {}",
                    command.tag()
                )));
            }
        }
        let obj = doc
            .get("config")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Config("manifest has no config object".into()))?;
        let pairs: Vec<(String, String)> = obj
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => Ok((k.clone(), s.clone())),
                other => Err(Error::Config(format!("manifest value for {k} is not a string: {other}"))),
            })
            .collect::<Result<_>>()?;
        Self::from_pairs(command, &pairs)
    }

    /// Parses either a manifest (JSON) or a `key = value` file.
    pub fn load(command: Command, text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_manifest(command, text)
        } else {
            Self::parse(command, text)
        }
    }

    /// Range checks on every setting.
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, key: &str, msg: &str| if ok { Ok(()) } else { Err(cfg_err(key, msg)) };
        let pos_f = |x: f64| x > 0.0 && x.is_finite();
        check(self.classes == 2, "classes", "only binary tasks are supported")?;
        check((1..=crate::quantum::MAX_QUBITS).contains(&self.num_qubits), "num_qubits", "out of range")?;
        let need = match (self.encoding, self.dataset) {
            (EncodingKind::Rotation, _) | (_, DatasetKind::Mnist) => 8,
            (_, DatasetKind::Wdbc) => 6,
        };
        check(self.num_qubits >= need, "num_qubits", "too few qubits for the dataset")?;
        check(self.circuit_depth >= 1, "circuit_depth", "must be at least 1")?;
        check(self.learning_rate >= 0.0 && self.learning_rate.is_finite(), "learning_rate", "must be finite and non-negative")?;
        check(self.num_iterations >= 1, "num_iterations", "must be at least 1")?;
        check(self.batch_size >= 1, "batch_size", "must be at least 1")?;
        check(self.num_clients >= 1, "num_clients", "must be at least 1")?;
        check(self.training_set_per_client >= 1, "training_set_per_client", "must be at least 1")?;
        check(
            (1..=self.training_set_per_client).contains(&self.batch_size_per_client),
            "batch_size_per_client",
            "must be between 1 and training_set_per_client",
        )?;
        check(self.gradient_bound > 0.0, "gradient_bound", "must be positive")?;
        check(self.noise_strength > 0.0, "noise_strength", "must be positive or inf")?;
        if let Some(v) = &self.per_client_mu {
            check(v.len() == self.num_clients, "per_client_mu", "needs one entry per client")?;
            check(v.iter().all(|&m| m > 0.0), "per_client_mu", "entries must be positive or inf")?;
        }
        if let Some(EvalMode::Sampled { shots, .. }) = self.eval_mode() {
            check(shots >= 1, "shots", "must be at least 1")?;
        }
        check(self.train_size >= 2, "train_size", "must be at least 2")?;
        check(self.validation_size >= 1, "validation_size", "must be at least 1")?;
        check(self.train_fraction > 0.0 && self.train_fraction < 1.0, "train_fraction", "must be in (0, 1)")?;
        check(self.encoder_depth >= 1, "encoder_depth", "must be at least 1")?;
        check(pos_f(self.rotation_angle_max), "rotation_angle_max", "must be positive")?;
        check(
            self.encoding == EncodingKind::Amplitude || self.dataset == DatasetKind::Mnist,
            "encoding",
            "rotation encoding is defined for mnist only",
        )?;
        check(self.eval_every >= 1, "eval_every", "must be at least 1")?;
        check(self.eval_subset >= 1, "eval_subset", "must be at least 1")?;
        check(self.input_noise >= 0.0 && self.input_noise.is_finite(), "input_noise", "must be non-negative")?;
        check(self.gradient_noise >= 0.0 && self.gradient_noise.is_finite(), "gradient_noise", "must be non-negative")?;
        check(self.sweep_sigmas.iter().all(|&s| s >= 0.0 && s.is_finite()), "sweep_sigmas", "must be non-negative")?;
        check(self.sweep_mus.iter().all(|&m| m > 0.0), "sweep_mus", "must be positive or inf")?;
        match self.command {
            Command::RobustnessSweep => {
                check(!self.sweep_sigmas.is_empty(), "sweep_sigmas", "must not be empty")?;
                check(!self.sweep_seeds.is_empty(), "sweep_seeds", "must not be empty")?;
            }
            Command::DpSweep => {
                check(!self.sweep_mus.is_empty(), "sweep_mus", "must not be empty")?;
                check(!self.sweep_seeds.is_empty(), "sweep_seeds", "must not be empty")?;
            }
            _ => {}
        }
        check(self.attack_iterations >= 1, "attack_iterations", "must be at least 1")?;
        check(pos_f(self.attack_learning_rate), "attack_learning_rate", "must be positive")?;
        if let InputGradMethod::CentralFiniteDifference { step } = self.attack_method {
            check(pos_f(step), "fd_step", "must be positive")?;
        }
        if self.command == Command::Attack {
            check(self.attack_model.is_some(), "attack_model", "attack needs a trained model file")?;
        }
        check(self.audit_sessions >= crate::ubqc::MIN_TRANSCRIPTS, "audit_sessions", "must be at least 1000")?;
        check(self.audit_alpha > 0.0 && self.audit_alpha < 1.0, "audit_alpha", "must be in (0, 1)")?;
        check(self.selftest_circuits >= 1, "selftest_circuits", "must be at least 1")?;
        Ok(())
    }

    /// Canonical text of one key.
    pub fn get(&self, key: &str) -> Option<String> {
        let mode = self.eval_mode();
        Some(match key {
            "dataset" => self.dataset.tag().into(),
            "data_dir" => self.data_dir.display().to_string(),
            "classes" => self.classes.to_string(),
            "num_qubits" => self.num_qubits.to_string(),
            "circuit_depth" => self.circuit_depth.to_string(),
            "rotation_layout" => self.rotation_layout.tag().into(),
            "learning_rate" => self.learning_rate.to_string(),
            "num_iterations" => self.num_iterations.to_string(),
            "batch_size" => self.batch_size.to_string(),
            "optimizer" => "adam".into(),
            "num_clients" => self.num_clients.to_string(),
            "training_set_per_client" => self.training_set_per_client.to_string(),
            "batch_size_per_client" => self.batch_size_per_client.to_string(),
            "gradient_bound" => self.gradient_bound.to_string(),
            "noise_strength" => self.noise_strength.to_string(),
            "per_client_mu" => self.per_client_mu.as_deref().map_or("none".into(), join),
            "noise_kind" => match self.noise_kind {
                NoiseKind::Gaussian => "gaussian".into(),
                NoiseKind::Laplace => "laplace".into(),
            },
            "clip_mode" => match self.clip_mode {
                ClipMode::Elementwise => "elementwise".into(),
                ClipMode::L2 => "l2".into(),
            },
            "seed" => self.seed.to_string(),
            "backend" => self.backend.tag().into(),
            "eval_mode" => match mode {
                Some(EvalMode::Sampled { .. }) => "sampled".into(),
                _ => "exact".into(),
            },
            "shots" => match mode {
                Some(EvalMode::Sampled { shots, .. }) => shots.to_string(),
                _ => "1000".into(),
            },
            "gradient_method" => self.gradient_method.tag().into(),
            "train_size" => self.train_size.to_string(),
            "validation_size" => self.validation_size.to_string(),
            "train_fraction" => self.train_fraction.to_string(),
            "downsample" => self.downsample.tag().into(),
            "encoding" => match self.encoding {
                EncodingKind::Amplitude => "amplitude".into(),
                EncodingKind::Rotation => "rotation".into(),
            },
            "encoder_depth" => self.encoder_depth.to_string(),
            "rotation_angle_max" => self.rotation_angle_max.to_string(),
            "baseline" => self.baseline.to_string(),
            "eval_every" => self.eval_every.to_string(),
            "eval_subset" => self.eval_subset.to_string(),
            "input_noise" => self.input_noise.to_string(),
            "gradient_noise" => self.gradient_noise.to_string(),
            "record_wallclock" => self.record_wallclock.to_string(),
            "sweep_sigmas" => join(&self.sweep_sigmas),
            "sweep_mus" => join(&self.sweep_mus),
            "sweep_seeds" => join(&self.sweep_seeds),
            "attack_model" => self.attack_model.as_ref().map_or("none".into(), |p| p.display().to_string()),
            "attack_iterations" => self.attack_iterations.to_string(),
            "attack_learning_rate" => self.attack_learning_rate.to_string(),
            "attack_method" => match self.attack_method {
                InputGradMethod::CentralFiniteDifference { .. } => "finite_difference".into(),
                InputGradMethod::Analytic => "analytic".into(),
            },
            "fd_step" => match self.attack_method {
                InputGradMethod::CentralFiniteDifference { step } => step.to_string(),
                InputGradMethod::Analytic => "0.0001".into(),
            },
            "attack_domain" => self.attack_domain.tag().into(),
            "attack_dp" => self.attack_dp.to_string(),
            "attack_sample_index" => self.attack_sample_index.to_string(),
            "audit_sessions" => self.audit_sessions.to_string(),
            "audit_alpha" => self.audit_alpha.to_string(),
            "theta_domain" => self.theta_domain.tag().into(),
            "selftest_circuits" => self.selftest_circuits.to_string(),
            _ => return None,
        })
    }

    /// Every key with its resolved value, in [`KEYS`] order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        KEYS.iter()
            .map(|&k| (k.to_string(), self.get(k).expect("every listed key resolves")))
            .collect()
    }

    pub fn to_text(&self) -> String {
        self.to_pairs().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Sampled-mode shot seeds follow the run seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        if let Backend::Mbqc(EvalMode::Sampled { shots, .. }) = self.backend {
            self.backend = Backend::Mbqc(EvalMode::Sampled { shots, seed });
        }
        if let Backend::Ubqc(EvalMode::Sampled { shots, .. }) = self.backend {
            self.backend = Backend::Ubqc(EvalMode::Sampled { shots, seed });
        }
        self
    }
}
