//! Goodness-of-fit tests used by the blindness audit.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.27 {
        // Series converges too slowly here; the value is 1 to double precision.
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Stephens' small-sample scaling of `√n`.
fn effective_sqrt_n(n: f64) -> f64 {
    let s = n.sqrt();
    s + 0.12 + 0.11 / s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample KS test of `samples` against Uniform[0, 1).
pub fn ks_uniform(samples: &[f64]) -> Result<TestOutcome> {
    if samples.is_empty() {
        return Err(Error::InsufficientSamples("KS test on an empty sample".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in s.iter().enumerate() {
        let f = v.clamp(0.0, 1.0);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(TestOutcome {
        statistic: d,
        p_value: kolmogorov_sf(d * effective_sqrt_n(n)),
    })
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<TestOutcome> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientSamples("KS test on an empty sample".into()));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = n * m / (n + m);
    Ok(TestOutcome {
        statistic: d,
        p_value: kolmogorov_sf(d * effective_sqrt_n(en)),
    })
}

/// Critical one-sample KS statistic at level `alpha` for `n` samples.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let (mut lo, mut hi) = (0.27, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / effective_sqrt_n(n as f64)
}

/// Pearson χ² test of `counts` against equal cell probabilities.
pub fn chi2_uniform(counts: &[u64]) -> Result<TestOutcome> {
    let k = counts.len();
    let total: u64 = counts.iter().sum();
    if k < 2 || total == 0 {
        return Err(Error::InsufficientSamples("χ² test needs ≥ 2 cells and ≥ 1 count".into()));
    }
    let expected = total as f64 / k as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    chi2_outcome(stat, (k - 1) as f64)
}

/// Pearson χ² test of homogeneity for a table of rows × categories.
/// Categories empty in every row are dropped.
pub fn chi2_homogeneity(table: &[Vec<u64>]) -> Result<TestOutcome> {
    let rows = table.len();
    let cols = table.first().map_or(0, Vec::len);
    if rows < 2 || cols < 2 || table.iter().any(|r| r.len() != cols) {
        return Err(Error::InsufficientSamples("χ² homogeneity needs a ≥ 2×2 table".into()));
    }
    let row_tot: Vec<f64> = table.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_tot: Vec<f64> = (0..cols).map(|c| table.iter().map(|r| r[c]).sum::<u64>() as f64).collect();
    let total: f64 = row_tot.iter().sum();
    let live_cols = col_tot.iter().filter(|&&c| c > 0.0).count();
    if total == 0.0 || live_cols < 2 {
        return Ok(TestOutcome {
            statistic: 0.0,
            p_value: 1.0,
        });
    }
    let mut stat = 0.0;
    for (r, row) in table.iter().enumerate() {
        for c in 0..cols {
            let e = row_tot[r] * col_tot[c] / total;
            if e > 0.0 {
                stat += (row[c] as f64 - e).powi(2) / e;
            }
        }
    }
    chi2_outcome(stat, ((rows - 1) * (live_cols - 1)) as f64)
}

fn chi2_outcome(stat: f64, dof: f64) -> Result<TestOutcome> {
    let dist = ChiSquared::new(dof).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(TestOutcome {
        statistic: stat,
        p_value: dist.sf(stat),
    })
}
