use serde::{Deserialize, Serialize};

use super::model::GradientVector;
use super::template::ModelParams;
use crate::error::{Error, Result};

/// Adam moments and constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_hat: f64,
    pub t: u64,
}

impl AdamState {
    /// Zero moments with `β1 = 0.9`, `β2 = 0.999`, `ε̂ = 1e-8`.
    pub fn new(n: usize) -> Self {
        AdamState {
            first_moment: vec![0.0; n],
            second_moment: vec![0.0; n],
            beta1: 0.9,
            beta2: 0.999,
            eps_hat: 1e-8,
            t: 0,
        }
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(params: &mut ModelParams, grad: &GradientVector, state: &mut AdamState, learning_rate: f64) -> Result<()> {
    adam_update(&mut params.theta, &grad.values, state, learning_rate)?;
    params.step_count += 1;
    Ok(())
}

/// Adam on a raw vector.
pub fn adam_update(x: &mut [f64], grad: &[f64], state: &mut AdamState, learning_rate: f64) -> Result<()> {
    let n = x.len();
    for len in [grad.len(), state.first_moment.len(), state.second_moment.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, actual: len });
        }
    }
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - state.beta1.powi(t);
    let c2 = 1.0 - state.beta2.powi(t);
    for i in 0..n {
        let g = grad[i];
        let m = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g;
        let v = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g * g;
        state.first_moment[i] = m;
        state.second_moment[i] = v;
        x[i] -= learning_rate * (m / c1) / ((v / c2).sqrt() + state.eps_hat);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = ModelParams::new(vec![0.3, -1.0]).unwrap();
        let mut s = AdamState::new(2);
        adam_step(&mut p, &GradientVector::zeros(2), &mut s, 0.1).unwrap();
        assert_eq!(p.theta, vec![0.3, -1.0]);
        assert_eq!(p.step_count, 1);
    }

    #[test]
    fn first_step_is_signed_learning_rate() {
        let mut p = ModelParams::zeros(3);
        let mut s = AdamState::new(3);
        let g = GradientVector::new(vec![2.0, -0.5, 1e-3]).unwrap();
        adam_step(&mut p, &g, &mut s, 0.01).unwrap();
        for (x, gv) in p.theta.iter().zip(&g.values) {
            assert!((x + 0.01 * gv.signum()).abs() < 1e-6);
        }
    }

    #[test]
    fn shape_mismatch() {
        let mut p = ModelParams::zeros(2);
        let mut s = AdamState::new(3);
        assert!(adam_step(&mut p, &GradientVector::zeros(2), &mut s, 0.1).is_err());
    }
}
