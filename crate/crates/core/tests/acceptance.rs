//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails. `QFL_ACCEPTANCE=4,9` restricts the run.

mod common;

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use qfl::attack::fidelity;
use qfl::encoding::{amplitude_encode, FeatureVector};
use qfl::harness::{
    attack_sample, attack_targets, load_raw, preset, run_experiment, run_selftest, selftest_circuits, single_split,
    Command, ExperimentConfig, SelftestConfig,
};
use qfl::mbqc::{evaluate_pattern, evaluate_pattern_with, total_variation, EvalMode, EvalOptions};
use qfl::quantum::{Circuit, Statevector};
use qfl::rng::stream;
use qfl::ubqc::{delegated_exact, ThetaDomain, UbqcConfig};
use qfl::vqc::io::{load_model, read_history};
use qfl::vqc::{parameter_shift_gradient, Backend, ClassifierTemplate, HistoryRecord, LabeledSample, ModelParams, RotationLayout};
use rand::Rng;
use serde_json::Value;

const GRADIENT_FD_STEP: f64 = 1e-5;
const GRADIENT_TOL: f64 = 1e-6;
const GRADIENT_INSTANCES: u64 = 20;
const EQUIVALENCE_TV: f64 = 1e-9;
const UNCORRECTED_TV: f64 = 1e-3;
const EQUIVALENCE_CIRCUITS: usize = 40;
const AUDIT_SESSIONS: usize = 1000;
const AUDIT_ALPHA: f64 = 0.01;
const MNIST_SINGLE_MIN: f64 = 0.95;
const WDBC_SINGLE_MIN: f64 = 0.90;
const FEDERATED_MIN: f64 = 0.90;
const CONVERGENCE_LEVEL: f64 = 0.90;
const CONVERGENCE_EVAL_EVERY: &str = "5";
const SWEEP_ALLOWANCE: f64 = 0.02;
const ROBUSTNESS_ALLOWANCE: f64 = 0.03;
const ATTACK_RECOVERY_MIN: f64 = 0.95;
const ATTACK_DEFENDED_MAX: f64 = 0.5;
const ATTACK_TREND_MUS: [f64; 4] = [f64::INFINITY, 1.0, 0.1, 0.05];
const ATTACK_TREND_SEEDS: u64 = 10;
const AMPLITUDE_VECTORS: usize = 100;
const AMPLITUDE_FIDELITY_MIN: f64 = 1.0 - 1e-10;
const ROTATION_TARGET: f64 = 0.90;
const ROTATION_BAND: f64 = 0.03;

type Check = Result<(bool, String), Box<dyn std::error::Error>>;

fn config(name: &str) -> ExperimentConfig {
    let (command, text) = preset(name).expect("preset exists");
    let mut c = ExperimentConfig::parse(command, text).expect("preset parses");
    c.set("data_dir", common::data_dir().to_str().unwrap()).unwrap();
    c
}

fn run(c: &ExperimentConfig, out: &Path) -> Result<Value, Box<dyn std::error::Error>> {
    Ok(run_experiment(c, out)?.summary)
}

fn history(path: &Path) -> Vec<HistoryRecord> {
    read_history(std::fs::File::open(path).expect("history exists")).expect("history parses")
}

fn first_reaching(h: &[HistoryRecord], level: f64) -> Option<usize> {
    h.iter().find(|r| r.val_acc.is_some_and(|a| a >= level)).map(|r| r.iteration)
}

fn final_val(h: &[HistoryRecord]) -> f64 {
    h.iter().rev().find_map(|r| r.val_acc).unwrap_or(f64::NAN)
}

fn sweep_means(summary: &Value) -> Vec<f64> {
    summary["points"].as_array().unwrap().iter().map(|p| p["mean_final_val_acc"].as_f64().unwrap()).collect()
}

/// Non-increasing up to `slack` between consecutive entries.
fn non_increasing(v: &[f64], slack: f64) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] + slack)
}

fn gradients() -> Check {
    let mut worst: f64 = 0.0;
    for seed in 0..GRADIENT_INSTANCES {
        let mut rng = stream(seed, 0);
        let t = ClassifierTemplate::new(4, 3, &[0], RotationLayout::Zx)?;
        let p = ModelParams::random(t.parameter_count(), &mut rng);
        let batch: Vec<LabeledSample> = (0..2)
            .map(|_| {
                let input = Statevector::from_amplitudes(common::random_state(4, &mut rng)).unwrap();
                LabeledSample::from_class(input, rng.random_range(0..2), 2).unwrap()
            })
            .collect();
        let ps = parameter_shift_gradient(&t, &p, &batch, Backend::Direct)?;
        let fd = common::oracle_fd_gradient(&t, &p, &batch, GRADIENT_FD_STEP);
        worst = worst.max(common::max_abs_diff(&ps.values, &fd));
    }
    Ok((worst <= GRADIENT_TOL, format!("{GRADIENT_INSTANCES} instances, max |ps - fd| = {worst:.2e}")))
}

fn equivalence() -> Check {
    let suite = selftest_circuits(EQUIVALENCE_CIRCUITS, ThetaDomain::Continuous, 0)?;
    let off = EvalOptions { corrections: false, ..EvalOptions::default() };
    let (mut worst, mut uncorrected, mut max_bricks, mut max_wires) = (0.0f64, 0.0f64, 0, 0);
    for (i, (c, p)) in suite.iter().enumerate() {
        let oracle = common::circuit_distribution(c);
        let empty = Circuit::new(c.n_qubits());
        let mbqc = evaluate_pattern(p, &empty, EvalMode::Exact)?;
        let ubqc = delegated_exact(p, &UbqcConfig::default(), &mut stream(i as u64, 0))?;
        let bare = evaluate_pattern_with(p, &empty, EvalMode::Exact, &off)?;
        worst = worst.max(total_variation(&mbqc, &oracle)).max(total_variation(&ubqc, &oracle));
        uncorrected = uncorrected.max(total_variation(&bare, &oracle));
        max_bricks = max_bricks.max(p.graph().bricks_per_row());
        max_wires = max_wires.max(c.n_qubits());
    }
    let pass = worst <= EQUIVALENCE_TV && uncorrected > UNCORRECTED_TV && max_bricks == 3 && max_wires == 2;
    Ok((
        pass,
        format!(
            "{} circuits up to {max_wires} wires x {max_bricks} bricks, max tv {worst:.1e}, uncorrected max tv {uncorrected:.3}",
            suite.len()
        ),
    ))
}

fn blindness() -> Check {
    let base = SelftestConfig { sessions: AUDIT_SESSIONS, alpha: AUDIT_ALPHA, ..SelftestConfig::default() };
    let honest = run_selftest(&base)?;
    let sabotage = run_selftest(&SelftestConfig { theta: ThetaDomain::Zero, ..base })?;
    let pass = honest.audit.pass && !sabotage.audit.pass;
    Ok((
        pass,
        format!(
            "{AUDIT_SESSIONS} sessions per computation: honest {}/{} rejected, theta=0 {}/{} rejected",
            honest.audit.n_rejected, honest.audit.n_tests, sabotage.audit.n_rejected, sabotage.audit.n_tests
        ),
    ))
}

fn single_client(dir: &Path) -> Check {
    let mnist = run(&config("train-single-mnist-full"), &dir.join("mnist"))?["final_val_acc"].as_f64().unwrap();
    let wdbc = run(&config("train-single-wdbc-full"), &dir.join("wdbc"))?["final_val_acc"].as_f64().unwrap();
    Ok((
        mnist >= MNIST_SINGLE_MIN && wdbc >= WDBC_SINGLE_MIN,
        format!("MNIST val {mnist:.3} (>= {MNIST_SINGLE_MIN}), WDBC val {wdbc:.3} (>= {WDBC_SINGLE_MIN})"),
    ))
}

fn federated(dir: &Path) -> Check {
    let mut single = config("train-single-mnist-full");
    single.set("eval_every", CONVERGENCE_EVAL_EVERY)?;
    run(&single, &dir.join("single"))?;
    let single_first = first_reaching(&history(&dir.join("single/history.jsonl")), CONVERGENCE_LEVEL);

    let mut sweep = config("dp-sweep-mnist-ci");
    sweep.set("eval_every", CONVERGENCE_EVAL_EVERY)?;
    let means = sweep_means(&run(&sweep, &dir.join("sweep"))?);
    let mu1 = history(&dir.join("sweep/mu_1_seed_0/history.jsonl"));
    let (fed_final, fed_first) = (final_val(&mu1), first_reaching(&mu1, CONVERGENCE_LEVEL));
    let slower = match (single_first, fed_first) {
        (Some(s), Some(f)) => f > s,
        _ => false,
    };
    // Strongest noise: degradation beyond the seed-noise allowance.
    let strained = means[0] - means[means.len() - 1] > SWEEP_ALLOWANCE;
    let pass = fed_final >= FEDERATED_MIN && slower && non_increasing(&means, SWEEP_ALLOWANCE) && strained;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ");
    Ok((
        pass,
        format!(
            "mu=1 val {fed_final:.3}, first >= {CONVERGENCE_LEVEL} at {fed_first:?} vs single {single_first:?}; \
             3-seed means over mu inf,1,0.1,0.05: {}",
            fmt(&means)
        ),
    ))
}

fn robustness(dir: &Path) -> Check {
    let means = sweep_means(&run(&config("robustness-sweep-mnist-ci"), dir)?);
    let (clean, low, high) = (means[0], means[1], means[2]);
    let pass = (clean - low).abs() <= ROBUSTNESS_ALLOWANCE && clean - high > clean - low;
    Ok((pass, format!("3-seed means at sigma 0, 0.02, 0.1: {clean:.3} {low:.3} {high:.3}")))
}

fn attack(dir: &Path) -> Check {
    let model = dir.join("model");
    run(&config("train-single-mnist-ci"), &model)?;
    let with_model = |name: &str| {
        let mut c = config(name);
        c.set("attack_model", model.join("model.bin").to_str().unwrap()).unwrap();
        c
    };
    let clear = run(&with_model("attack-mnist-ci"), &dir.join("clear"))?;
    let defended = run(&with_model("attack-mnist-dp-ci"), &dir.join("dp"))?;
    let targets = |v: &Value| -> Vec<(f64, bool)> {
        v["targets"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| (t["fidelity_vs_truth"].as_f64().unwrap(), t["label_correct"].as_bool().unwrap()))
            .collect()
    };
    let (clear, defended) = (targets(&clear), targets(&defended));
    let recovered = clear.iter().all(|&(f, ok)| f >= ATTACK_RECOVERY_MIN && ok);
    let protected = defended.iter().all(|&(f, _)| f <= ATTACK_DEFENDED_MAX);

    let mut trend_config = with_model("attack-mnist-dp-ci");
    let (template, params) = load_model(trend_config.attack_model.as_ref().unwrap())?;
    let split = single_split(&trend_config, &load_raw(&trend_config)?, trend_config.seed)?;
    let samples = attack_targets(&split, template.n_outcomes(), trend_config.attack_sample_index)?;
    let mut trend = Vec::new();
    for mu in ATTACK_TREND_MUS {
        trend_config.noise_strength = mu;
        let mut total = 0.0;
        for seed in 0..ATTACK_TREND_SEEDS {
            trend_config.seed = seed;
            for (class, target) in samples.iter().enumerate() {
                let r = attack_sample(&trend_config, &template, &params, target, class as u64)?;
                total += r.fidelity_vs_truth.unwrap();
            }
        }
        trend.push(total / (ATTACK_TREND_SEEDS as usize * samples.len()) as f64);
    }
    let monotone = non_increasing(&trend, 0.0);
    let fmt = |v: &[(f64, bool)]| v.iter().map(|(f, ok)| format!("{f:.4}{}", if *ok { "" } else { "(wrong label)" })).collect::<Vec<_>>().join(" ");
    Ok((
        recovered && protected && monotone,
        format!(
            "clear fidelity {}, defended {}, {ATTACK_TREND_SEEDS}-seed means over mu inf,1,0.1,0.05: {}",
            fmt(&clear),
            fmt(&defended),
            trend.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
        ),
    ))
}

fn encoding(dir: &Path) -> Check {
    let mut rng = stream(0, 0);
    let mut worst: f64 = 1.0;
    for n in [6usize, 8] {
        for _ in 0..AMPLITUDE_VECTORS {
            let values: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = FeatureVector::padded_normalized(&values, 1 << n, 0)?;
            let prep = amplitude_encode(&f, n)?;
            let target = Statevector::from_real(&f.values)?;
            let out = if n == 6 {
                let mut zero = vec![Complex64::new(0.0, 0.0); 1 << n];
                zero[0] = Complex64::new(1.0, 0.0);
                Statevector::from_amplitudes(common::apply(&common::circuit_unitary(&prep.circuit), &zero))?
            } else {
                let mut s = Statevector::zero(n)?;
                s.run(&prep.circuit)?;
                s
            };
            worst = worst.min(fidelity(&out, &target)?);
        }
    }
    let summary = run(&config("train-rotation-mnist-full"), dir)?;
    let vqc = summary["final_val_acc"].as_f64().unwrap();
    let mlp = summary["baseline_val_acc"].as_f64().unwrap();
    let pass = worst >= AMPLITUDE_FIDELITY_MIN && (vqc - ROTATION_TARGET).abs() <= ROTATION_BAND && mlp > vqc;
    Ok((
        pass,
        format!("min amplitude fidelity 1 - {:.1e}; rotation VQC val {vqc:.3}, MLP val {mlp:.3}", 1.0 - worst),
    ))
}

fn determinism(dir: &Path) -> Check {
    let mut mismatched = Vec::new();
    for name in ["train-single-mnist-ci", "train-federated-wdbc-full"] {
        let mut c = config(name);
        if c.command == Command::TrainFederated {
            c.set("num_iterations", "100")?;
        }
        let (a, b) = (dir.join(format!("{name}-a")), dir.join(format!("{name}-b")));
        run(&c, &a)?;
        let manifest = std::fs::read_to_string(a.join("manifest.json"))?;
        run(&ExperimentConfig::from_manifest(c.command, &manifest)?, &b)?;
        for file in ["manifest.json", "history.jsonl", "model.bin"] {
            if std::fs::read(a.join(file))? != std::fs::read(b.join(file))? {
                mismatched.push(format!("{name}/{file}"));
            }
        }
    }
    Ok((mismatched.is_empty(), format!("single and federated reruns, mismatched files: {mismatched:?}")))
}

fn main() {
    let only: Option<Vec<usize>> =
        std::env::var("QFL_ACCEPTANCE").ok().map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let scratch = tempfile::tempdir().expect("scratch directory");
    let dir = |name: &str| scratch.path().join(name);
    let checks: Vec<(usize, &str, Box<dyn Fn() -> Check>)> = vec![
        (1, "gradient correctness", Box::new(gradients)),
        (2, "mbqc/ubqc equivalence", Box::new(equivalence)),
        (3, "blindness audit", Box::new(blindness)),
        (4, "single-client accuracy", Box::new(move || single_client(&dir("c4")))),
        (5, "federated privacy", Box::new(move || federated(&dir("c5")))),
        (6, "input-noise robustness", Box::new(move || robustness(&dir("c6")))),
        (7, "gradient attack", Box::new(move || attack(&dir("c7")))),
        (8, "encodings", Box::new(move || encoding(&dir("c8")))),
        (9, "determinism", Box::new(move || determinism(&dir("c9")))),
    ];
    let mut failed = 0;
    for (id, name, check) in &checks {
        if only.as_ref().is_some_and(|o| !o.contains(id)) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!pass);
        println!(
            "criterion {id} ({name}): {} | {detail} | {:.0}s",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
