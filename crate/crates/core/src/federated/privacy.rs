use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vqc::GradientVector;

/// Client visiting order, one index per iteration.
pub type ScheduleString = Vec<usize>;

/// `t` i.i.d. uniform client indices in `[0, n)`.
pub fn make_schedule(t: usize, n: usize, rng: &mut impl Rng) -> Result<ScheduleString> {
    if t == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "schedule needs T ≥ 1 and N ≥ 1, got T={t}, N={n}"
        )));
    }
    Ok((0..t).map(|_| rng.random_range(0..n)).collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipMode {
    /// `g[j] / max(1, |g[j]|/R)` for every element.
    #[default]
    Elementwise,
    /// `g / max(1, ‖g‖₂/R)`.
    L2,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    #[default]
    Gaussian,
    Laplace,
}

fn check_bound(r: f64) -> Result<()> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("clip bound {r} must be positive")))
    }
}

/// Elementwise clipping to `[-R, R]`.
pub fn clip_gradient(grad: &GradientVector, r: f64) -> Result<GradientVector> {
    clip_with(grad, r, ClipMode::Elementwise)
}

pub fn clip_with(grad: &GradientVector, r: f64, mode: ClipMode) -> Result<GradientVector> {
    check_bound(r)?;
    let values = match mode {
        ClipMode::Elementwise => grad.values.iter().map(|g| g / (g.abs() / r).max(1.0)).collect(),
        ClipMode::L2 => {
            let s = (grad.l2_norm() / r).max(1.0);
            grad.values.iter().map(|g| g / s).collect()
        }
    };
    GradientVector::new(values)
}

/// Standard deviation `2R/μ` of the added noise; zero for `μ = ∞`.
pub fn noise_scale(r: f64, mu: f64) -> f64 {
    if mu.is_infinite() {
        0.0
    } else {
        2.0 * r / mu
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("noise strength μ={mu} must be positive")))
    }
}

/// `ḡ[j] + (2R/μ)·z_j` with standard normal `z_j`. `μ = ∞` is the identity.
pub fn add_dp_noise(clipped: &GradientVector, r: f64, mu: f64, rng: &mut impl Rng) -> Result<GradientVector> {
    add_noise_with(clipped, r, mu, NoiseKind::Gaussian, rng)
}

/// As [`add_dp_noise`]; `Laplace` draws `z_j` from the Laplace distribution
/// with unit scale.
pub fn add_noise_with(
    clipped: &GradientVector,
    r: f64,
    mu: f64,
    kind: NoiseKind,
    rng: &mut impl Rng,
) -> Result<GradientVector> {
    check_mu(mu)?;
    if mu.is_infinite() {
        return Ok(clipped.clone());
    }
    check_bound(r)?;
    let scale = noise_scale(r, mu);
    let values = clipped
        .values
        .iter()
        .map(|g| {
            let z = match kind {
                NoiseKind::Gaussian => StandardNormal.sample(rng),
                NoiseKind::Laplace => {
                    let u: f64 = rng.random::<f64>() - 0.5;
                    -u.signum() * (1.0 - 2.0 * u.abs()).ln()
                }
            };
            g + scale * z
        })
        .collect();
    GradientVector::new(values)
}
