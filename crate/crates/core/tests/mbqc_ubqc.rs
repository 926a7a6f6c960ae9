mod common;

use std::f64::consts::FRAC_PI_4;

use proptest::prelude::*;
use qfl::mbqc::{
    Site,
    compile_circuit, evaluate_pattern, evaluate_pattern_with, total_variation, EvalMode, EvalOptions,
};
use qfl::quantum::{Circuit, Gate};
use qfl::ubqc::{
    blindness_audit, client_instruction, client_prepare, client_record, delegated_exact, read_transcript, run_delegated,
    server_entangle, server_measure, write_transcript, Message, ThetaDomain, UbqcConfig,
};
use qfl::harness::{collect_transcripts, selftest_circuits};
use qfl::rng::stream;

const TV_TOL: f64 = 1e-9;

fn gate_strategy(n_wires: usize) -> impl Strategy<Value = Gate> {
    let w = 0..n_wires;
    let angle = 0.0..std::f64::consts::TAU;
    prop_oneof![
        (w.clone(), angle.clone()).prop_map(|(q, a)| Gate::rx(q, a)),
        (w.clone(), angle).prop_map(|(q, a)| Gate::rz(q, a)),
        w.clone().prop_map(Gate::h),
        w.prop_map(move |q| if n_wires > 1 { Gate::cnot(q, 1 - q) } else { Gate::h(q) }),
    ]
}

fn circuit_strategy() -> impl Strategy<Value = Circuit> {
    (1..=2usize)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(gate_strategy(n), 1..6)))
        .prop_map(|(n, gates)| Circuit::from_gates(n, gates).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_pattern_matches_dense_oracle(c in circuit_strategy()) {
        let p = compile_circuit(&c).unwrap();
        prop_assume!(p.graph().bricks_per_row() <= 3);
        let oracle = common::circuit_distribution(&c);
        let mbqc = evaluate_pattern(&p, &Circuit::new(c.n_qubits()), EvalMode::Exact).unwrap();
        prop_assert!(total_variation(&mbqc, &oracle) <= TV_TOL);
        let ubqc = delegated_exact(&p, &UbqcConfig::default(), &mut stream(5, 0)).unwrap();
        prop_assert!(total_variation(&ubqc, &oracle) <= TV_TOL);
    }

    #[test]
    fn prepared_inputs_follow_the_dense_unitary(prep in circuit_strategy(), body in circuit_strategy()) {
        prop_assume!(prep.n_qubits() == body.n_qubits());
        let p = compile_circuit(&body).unwrap();
        prop_assume!(p.graph().bricks_per_row() <= 3);
        let full = prep.clone().then(&body).unwrap();
        let got = evaluate_pattern(&p, &prep, EvalMode::Exact).unwrap();
        prop_assert!(total_variation(&got, &common::circuit_distribution(&full)) <= TV_TOL);
    }

    #[test]
    fn unflipped_delegation_reproduces_sampled_mbqc(c in circuit_strategy(), seed in 0u64..1000) {
        let p = compile_circuit(&c).unwrap();
        prop_assume!(p.graph().bricks_per_row() <= 3);
        let config = UbqcConfig { flip_outcomes: false, ..UbqcConfig::default() };
        let mode = EvalMode::Sampled { shots: 64, seed };
        let local = evaluate_pattern(&p, &Circuit::new(c.n_qubits()), mode).unwrap();
        let (delegated, _) = run_delegated(&c, mode, &config, seed).unwrap();
        prop_assert_eq!(local, delegated);
    }
}

#[test]
fn disabling_corrections_breaks_some_circuit() {
    let suite = selftest_circuits(12, ThetaDomain::Continuous, 0).unwrap();
    let off = EvalOptions { corrections: false, ..EvalOptions::default() };
    let worst = suite
        .iter()
        .map(|(c, p)| {
            let bare = evaluate_pattern_with(p, &Circuit::new(c.n_qubits()), EvalMode::Exact, &off).unwrap();
            total_variation(&bare, &common::circuit_distribution(c))
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "uncorrected evaluation agreed everywhere (worst tv {worst})");
}

#[test]
fn discrete_secrets_keep_the_eight_angle_grid() {
    let suite = selftest_circuits(6, ThetaDomain::Discrete8, 1).unwrap();
    let config = UbqcConfig { theta: ThetaDomain::Discrete8, ..UbqcConfig::default() };
    for (c, p) in &suite {
        let dist = delegated_exact(p, &config, &mut stream(2, 0)).unwrap();
        assert!(total_variation(&dist, &common::circuit_distribution(c)) <= TV_TOL);
        for t in collect_transcripts(p, &config, 3, 20).unwrap() {
            for m in t {
                if let Message::MeasureInstruction { delta, .. } = m {
                    let k = delta / FRAC_PI_4;
                    assert!((k - k.round()).abs() < 1e-9, "delta {delta} off grid");
                }
            }
        }
    }
}

#[test]
fn transcripts_never_carry_secrets_or_target_angles() {
    let mut c = Circuit::new(2);
    c.push(Gate::rx(0, 0.77)).unwrap();
    c.push(Gate::cnot(0, 1)).unwrap();
    c.push(Gate::rz(1, 2.1)).unwrap();
    let p = compile_circuit(&c).unwrap();
    let config = UbqcConfig::default();
    for s in 0..20u64 {
        let (mut client, states) = client_prepare(&p, &config, &mut stream(s, 1));
        let mut server = server_entangle(states, p.graph()).unwrap();
        let mut coins = stream(s, 2);
        while !client.is_done() {
            let instr = client_instruction(&client).unwrap();
            let result = server_measure(&mut server, &instr, &mut coins).unwrap();
            client_record(&mut client, &result).unwrap();
        }
        server.finish();
        let mut bytes = Vec::new();
        write_transcript(&mut bytes, server.transcript()).unwrap();
        // A delta equals its theta whenever the adapted angle and flip are both zero.
        assert_eq!(client.thetas().len(), p.n_sites());
        for v in p.phis().iter().filter(|a| **a != 0.0) {
            let needle = v.to_le_bytes();
            assert!(!bytes.windows(8).any(|w| w == needle), "transcript contains {v}");
        }
        // The server sees exactly one instruction and one result per site.
        let n = p.n_sites();
        let instr = server.transcript().iter().filter(|m| matches!(m, Message::MeasureInstruction { .. })).count();
        assert_eq!(instr, n);
        assert_eq!(read_transcript(bytes.as_slice()).unwrap(), server.transcript());
    }
}

#[test]
fn message_order_is_independent_of_the_computation() {
    let suite = selftest_circuits(12, ThetaDomain::Continuous, 4).unwrap();
    let wide: Vec<_> = suite.iter().filter(|(c, p)| c.n_qubits() == 2 && p.graph().bricks_per_row() == 3).collect();
    let two: Vec<_> = wide
        .iter()
        .enumerate()
        .find_map(|(i, a)| wide[i + 1..].iter().find(|b| b.1.graph().n_cols() == a.1.graph().n_cols()).map(|b| vec![*a, *b]))
        .unwrap_or_default();
    assert_eq!(two.len(), 2, "suite has no pair of equal-shape three-brick circuits");
    {
        let shape = |p| {
            collect_transcripts(p, &UbqcConfig::default(), 0, 1).unwrap()[0]
                .iter()
                .map(|m| match m {
                    Message::MeasureInstruction { site, .. } => (3u8, *site),
                    Message::MeasureResult { site, .. } => (4, *site),
                    Message::QubitPrep { site } => (1, *site),
                    other => (other.tag(), Site::new(0, 0)),
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(shape(&two[0].1), shape(&two[1].1));
    }
}

#[test]
fn zero_secrets_are_caught_by_the_audit() {
    let suite = selftest_circuits(12, ThetaDomain::Continuous, 0).unwrap();
    let two: Vec<_> = suite
        .iter()
        .filter(|(c, _)| c.n_qubits() == 2)
        .map(|(_, p)| p)
        .collect();
    let (a, b) = two
        .iter()
        .enumerate()
        .find_map(|(i, a)| two[i + 1..].iter().find(|b| b.graph().n_bricks() == a.graph().n_bricks()).map(|b| (*a, *b)))
        .unwrap();
    for (theta, expect_pass) in [(ThetaDomain::Continuous, true), (ThetaDomain::Zero, false)] {
        let config = UbqcConfig { theta, ..UbqcConfig::default() };
        let groups = vec![
            collect_transcripts(a, &config, 10, 1000).unwrap(),
            collect_transcripts(b, &config, 11, 1000).unwrap(),
        ];
        let report = blindness_audit(&groups, theta, 0.01).unwrap();
        assert_eq!(report.pass, expect_pass, "{theta:?}: {} rejected", report.n_rejected);
    }
}
