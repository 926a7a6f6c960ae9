mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use qfl::harness::{Command as Cmd, ExperimentConfig, KEYS, PRESETS};

fn qfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfl")).args(args).output().unwrap()
}

fn data() -> String {
    common::data_dir().display().to_string()
}

/// Small WDBC training config.
fn small_config(dir: &Path, extra: &str) -> PathBuf {
    let text = format!(
        "dataset = wdbc\ndata_dir = {}\ncircuit_depth = 3\nnum_iterations = 30\nlearning_rate = 0.01\neval_every = 10\n{extra}",
        data()
    );
    let path = dir.join(format!("c{}.conf", text.len()));
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn invalid_configs_exit_nonzero_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    for extra in ["bogus_key = 1\n", "learning_rate = -0.5\n", "num_qubits = 99\n", "seed = 1\nseed = 2\n", "backend = cloud\n"] {
        let cfg = small_config(tmp.path(), extra);
        let out = tmp.path().join("out");
        let o = qfl(&["train-single", "--config", s(&cfg), "--out", s(&out)]);
        assert_eq!(o.status.code(), Some(2), "{extra}");
        assert!(!out.exists(), "{extra} left output behind");
    }
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), "");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(qfl(&["train-single", "--config", s(&cfg), "--seed", "4", "--out", s(&a)]).status.success());
    let manifest = a.join("manifest.json");
    assert!(qfl(&["train-single", "--config", s(&manifest), "--out", s(&b)]).status.success());
    for f in ["manifest.json", "history.jsonl", "model.bin", "summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(doc["seed"], 4);
    assert_eq!(doc["config"]["seed"], "4");
    assert!(!a.join(".lock").exists());
    assert_eq!(std::fs::read_to_string(a.join("history.jsonl")).unwrap().lines().count(), 30);
}

#[test]
fn zero_noise_sweep_point_reproduces_single_training() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), "gradient_noise = 0.001\nsweep_sigmas = 0,0.05\nsweep_seeds = 7\nseed = 7\n");
    let (single, sweep) = (tmp.path().join("single"), tmp.path().join("sweep"));
    let plain = small_config(tmp.path(), "seed = 7\n");
    assert!(qfl(&["train-single", "--config", s(&plain), "--out", s(&single)]).status.success());
    assert!(qfl(&["robustness-sweep", "--config", s(&cfg), "--out", s(&sweep)]).status.success());
    assert_eq!(
        std::fs::read(single.join("history.jsonl")).unwrap(),
        std::fs::read(sweep.join("sigma_0_seed_7/history.jsonl")).unwrap()
    );
    assert!(sweep.join("sigma_0.05_seed_7/history.jsonl").exists());
}

#[test]
fn federated_runs_and_privacy_sweeps_write_their_histories() {
    let tmp = tempfile::tempdir().unwrap();
    let fed = small_config(tmp.path(), "num_clients = 4\ntraining_set_per_client = 100\nper_client_mu = 1,0.9,0.8,inf\n");
    let out = tmp.path().join("fed");
    let o = qfl(&["train-federated", "--config", s(&fed), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(out.join("history.jsonl")).unwrap().lines().count(), 30);

    let sweep = small_config(tmp.path(), "sweep_mus = inf,0.1\nsweep_seeds = 0\n");
    let out = tmp.path().join("dp");
    assert!(qfl(&["dp-sweep", "--config", s(&sweep), "--out", s(&out)]).status.success());
    assert!(out.join("mu_inf_seed_0/history.jsonl").exists());
    assert!(out.join("mu_0.1_seed_0/history.jsonl").exists());
}

#[test]
fn attack_needs_an_existing_model() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.bin");
    let cfg = small_config(tmp.path(), &format!("attack_model = {}\n", missing.display()));
    let out = tmp.path().join("out");
    let o = qfl(&["attack", "--config", s(&cfg), "--out", s(&out)]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!out.exists());
}

#[test]
fn attack_writes_results_and_images() {
    let tmp = tempfile::tempdir().unwrap();
    let train = tmp.path().join("train");
    let cfg = small_config(tmp.path(), "");
    assert!(qfl(&["train-single", "--config", s(&cfg), "--out", s(&train)]).status.success());
    let model = train.join("model.bin");
    let attack = small_config(
        tmp.path(),
        &format!("attack_model = {}\nattack_iterations = 20\nattack_method = analytic\nattack_dp = true\n", model.display()),
    );
    let out = tmp.path().join("attack");
    let o = qfl(&["attack", "--config", s(&attack), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["attack_M.json", "attack_B.json", "truth_M.pgm", "recovered_M_as_M.pgm", "recovered_M_as_B.pgm", "recovered_B_as_B.pgm"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let pgm = std::fs::read(out.join("truth_B.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n8 8\n255\n"));
    assert_eq!(pgm.len(), 11 + 64);
}

#[test]
fn selftest_exit_code_follows_the_audit() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = tmp.path().join("ok");
    assert_eq!(qfl(&["ubqc-selftest", "--preset", "ubqc-selftest", "--out", s(&ok)]).status.code(), Some(0));
    let bad = tmp.path().join("bad");
    assert_eq!(qfl(&["ubqc-selftest", "--preset", "ubqc-selftest-sabotage", "--out", s(&bad)]).status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(bad.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert_eq!(report["equivalence_pass"], true);
}

#[test]
fn locked_output_directories_are_refused() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("busy");
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(out.join(".lock"), "1").unwrap();
    let o = qfl(&["ubqc-selftest", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.join("manifest.json").exists());
    assert!(out.join(".lock").exists());
}

#[test]
fn presets_parse_for_their_commands() {
    for (name, command, text) in PRESETS {
        let cfg = ExperimentConfig::parse(*command, text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(ExperimentConfig::parse(*command, &cfg.to_text()).unwrap(), cfg, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resolved_configs_round_trip(
        lr in 1e-5f64..1.0,
        iters in 1usize..5000,
        mu in prop_oneof![Just(f64::INFINITY), 0.01f64..10.0],
        seed in any::<u64>(),
        backend in prop_oneof![Just("direct"), Just("mbqc"), Just("ubqc")],
        federated in any::<bool>(),
    ) {
        let command = if federated { Cmd::TrainFederated } else { Cmd::TrainSingle };
        let text = format!("learning_rate = {lr}\nnum_iterations = {iters}\nnoise_strength = {mu}\nseed = {seed}\nbackend = {backend}\n");
        let cfg = ExperimentConfig::parse(command, &text).unwrap();
        prop_assert_eq!(cfg.learning_rate, lr);
        prop_assert_eq!(cfg.noise_strength, mu);
        let again = ExperimentConfig::parse(command, &cfg.to_text()).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(cfg.to_pairs().len(), KEYS.len());
    }
}
