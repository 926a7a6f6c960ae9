mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qfl::encoding::{amplitude_encode, route_adjacent, rotation_encode, rotation_encoded_state, scale_to_angles, FeatureVector};
use qfl::quantum::{Circuit, Gate};
use qfl::vqc::{ClassifierTemplate, RotationLayout};
use qfl::Error;

fn zero(n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

fn overlap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn prepared_state_matches_the_features(n in 1usize..=5, values in prop::collection::vec(-1.0f64..1.0, 32)) {
        let f = FeatureVector::padded_normalized(&values[..1 << n], 1 << n, 0);
        prop_assume!(f.is_ok());
        let f = f.unwrap();
        let prep = amplitude_encode(&f, n).unwrap();
        let out = common::apply(&common::circuit_unitary(&prep.circuit), &zero(n));
        let target: Vec<Complex64> = f.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        prop_assert!(overlap(&out, &target) >= 1.0 - 1e-10);
        let native = prep.circuit.gates().iter().all(|g| match *g {
            Gate::Rx { .. } | Gate::Rz { .. } => true,
            Gate::Cnot { control, target } => control.abs_diff(target) == 1,
            _ => false,
        });
        prop_assert!(native);
    }

    #[test]
    fn routing_preserves_the_unitary(control in 0usize..4, target in 0usize..4) {
        prop_assume!(control != target);
        let mut c = Circuit::new(4);
        c.push(Gate::rx(0, 0.3)).unwrap();
        c.push(Gate::h(2)).unwrap();
        c.push(Gate::cnot(control, target)).unwrap();
        let routed = route_adjacent(&c).unwrap();
        let a = common::apply(&common::circuit_unitary(&c), &zero(4));
        let b = common::apply(&common::circuit_unitary(&routed), &zero(4));
        prop_assert!(overlap(&a, &b) > 1.0 - 1e-12);
        let adjacent = routed.gates().iter().all(|g| match *g {
            Gate::Cnot { control, target } => control.abs_diff(target) == 1,
            _ => true,
        });
        prop_assert!(adjacent);
    }

    #[test]
    fn angles_are_clamped_into_range(values in prop::collection::vec(-0.5f64..1.5, 1..64), max in 0.1f64..6.0) {
        let a = scale_to_angles(&values, 0.0, 1.0, max).unwrap();
        for (x, v) in a.iter().zip(&values) {
            prop_assert!((0.0..=max).contains(x));
            if (0.0..=1.0).contains(v) {
                prop_assert!((x - v * max).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn degenerate_and_oversized_inputs_are_rejected() {
    assert!(matches!(FeatureVector::padded_normalized(&[0.0; 4], 4, 0), Err(Error::DegenerateVector)));
    assert!(matches!(
        FeatureVector::padded_normalized(&[1.0; 5], 4, 0),
        Err(Error::DimensionOverflow { .. })
    ));
    assert!(scale_to_angles(&[0.5], 1.0, 1.0, 1.0).is_err());
    assert!(scale_to_angles(&[0.5], 0.0, 1.0, 0.0).is_err());
}

#[test]
fn rotation_encoder_fills_leading_parameters() {
    let t = ClassifierTemplate::new(3, 2, &[0], RotationLayout::Rotor).unwrap();
    let angles: Vec<f64> = (0..10).map(|i| 0.1 * i as f64).collect();
    let p = rotation_encode(&angles, &t).unwrap();
    assert_eq!(&p.theta[..10], angles.as_slice());
    assert!(p.theta[10..].iter().all(|&x| x == 0.0));
    let state = rotation_encoded_state(&angles, &t).unwrap();
    let oracle = common::apply(&common::circuit_unitary(&t.circuit(&p).unwrap()), &zero(3));
    assert!(overlap(state.amplitudes(), &oracle) > 1.0 - 1e-12);
    let too_many = vec![0.0; t.parameter_count() + 1];
    assert!(matches!(rotation_encode(&too_many, &t), Err(Error::DimensionOverflow { .. })));
}
