mod common;

use common::{max_abs_diff, oracle_fd_gradient, oracle_loss, random_state};
use proptest::prelude::*;
use qfl::quantum::Statevector;
use qfl::rng::stream;
use qfl::vqc::{
    adjoint_gradient, build_classifier, mean_loss, parameter_shift_gradient, Backend, ClassifierTemplate, LabeledSample,
    ModelParams, RotationLayout,
};
use rand::Rng;

/// Four-qubit depth-three instance with a two-sample batch.
fn instance(seed: u64, layout: RotationLayout) -> (ClassifierTemplate, ModelParams, Vec<LabeledSample>) {
    let mut rng = stream(seed, 0);
    let template = ClassifierTemplate::new(4, 3, &[0], layout).unwrap();
    let params = ModelParams::random(template.parameter_count(), &mut rng);
    let batch = (0..2)
        .map(|_| {
            let input = Statevector::from_amplitudes(random_state(4, &mut rng)).unwrap();
            LabeledSample::from_class(input, rng.random_range(0..2), 2).unwrap()
        })
        .collect();
    (template, params, batch)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn parameter_shift_matches_finite_differences(seed in any::<u64>()) {
        let (t, p, batch) = instance(seed, RotationLayout::Zx);
        let ps = parameter_shift_gradient(&t, &p, &batch, Backend::Direct).unwrap();
        let fd = oracle_fd_gradient(&t, &p, &batch, 1e-5);
        prop_assert!(max_abs_diff(&ps.values, &fd) <= 1e-6);
    }

    #[test]
    fn adjoint_matches_parameter_shift(seed in any::<u64>(), layout in prop_oneof![Just(RotationLayout::Zx), Just(RotationLayout::Zxz), Just(RotationLayout::Rotor)]) {
        let (t, p, batch) = instance(seed, layout);
        let ps = parameter_shift_gradient(&t, &p, &batch, Backend::Direct).unwrap();
        let (adj, loss) = adjoint_gradient(&t, &p, &batch).unwrap();
        prop_assert!(max_abs_diff(&ps.values, &adj.values) <= 1e-10);
        prop_assert!((loss - oracle_loss(&t, &p, &batch)).abs() <= 1e-10);
    }

    #[test]
    fn loss_matches_dense_oracle(seed in any::<u64>()) {
        let (t, p, batch) = instance(seed, RotationLayout::Zx);
        prop_assert!((mean_loss(&t, &p, &batch).unwrap() - oracle_loss(&t, &p, &batch)).abs() <= 1e-12);
    }
}

#[test]
fn parameter_count_follows_layout() {
    assert_eq!(build_classifier(8, 30, &[0]).unwrap().parameter_count(), 2 * 8 * 30);
    let rotor = ClassifierTemplate::new(8, 11, &[0], RotationLayout::Rotor).unwrap();
    assert_eq!(rotor.parameter_count(), 272);
}
