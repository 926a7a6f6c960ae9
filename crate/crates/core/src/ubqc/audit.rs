use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, TAU};

use serde::Serialize;

use super::message::{Message, ProtocolTranscript};
use super::session::ThetaDomain;
use crate::error::{Error, Result};
use crate::mbqc::Site;
use crate::stats::{chi2_homogeneity, chi2_uniform, ks_two_sample, ks_uniform, TestOutcome};

/// Minimum transcripts per group.
pub const MIN_TRANSCRIPTS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditTest {
    /// `delta_uniform`, `delta_two_sample` or `bits_uniform`.
    pub kind: &'static str,
    pub site: (usize, usize),
    /// Group index, or the compared pair for two-sample tests.
    pub groups: Vec<usize>,
    pub statistic: f64,
    pub p_value: f64,
    pub rejected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub alpha: f64,
    /// `alpha` divided by the number of tests.
    pub corrected_alpha: f64,
    pub n_tests: usize,
    pub n_rejected: usize,
    pub pass: bool,
    pub tests: Vec<AuditTest>,
}

#[derive(Default)]
struct SiteData {
    deltas: Vec<f64>,
    bits: [u64; 2],
}

fn collect(group: &[ProtocolTranscript]) -> BTreeMap<Site, SiteData> {
    let mut map: BTreeMap<Site, SiteData> = BTreeMap::new();
    for t in group {
        for m in t {
            match *m {
                Message::MeasureInstruction { site, delta } => map.entry(site).or_default().deltas.push(delta),
                Message::MeasureResult { site, b } => map.entry(site).or_default().bits[usize::from(b & 1)] += 1,
                _ => {}
            }
        }
    }
    map
}

/// Histogram over the eight angles `kπ/4`; off-grid angles land in a ninth
/// bin that must stay empty.
fn discrete_counts(deltas: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; 9];
    for &d in deltas {
        let k = d / FRAC_PI_4;
        let r = k.round();
        if (k - r).abs() < 1e-9 {
            counts[(r as usize) % 8] += 1;
        } else {
            counts[8] += 1;
        }
    }
    counts
}

/// Statistical check that the server's view does not depend on which
/// computation is running.
///
/// For every site: `δ` uniformity within each group, `δ` equality across
/// each pair of groups, and uniformity of raw outcome bits within each
/// group. Continuous `δ` use KS tests; the eight-angle domain uses χ².
/// The audit passes when no test rejects at `alpha / n_tests`.
pub fn blindness_audit(groups: &[Vec<ProtocolTranscript>], domain: ThetaDomain, alpha: f64) -> Result<AuditReport> {
    if groups.len() < 2 {
        return Err(Error::InsufficientSamples(format!(
            "audit needs at least 2 groups, got {}",
            groups.len()
        )));
    }
    if let Some((i, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < MIN_TRANSCRIPTS) {
        return Err(Error::InsufficientSamples(format!(
            "group {i} has {} transcripts, need {MIN_TRANSCRIPTS}",
            g.len()
        )));
    }
    let data: Vec<BTreeMap<Site, SiteData>> = groups.iter().map(|g| collect(g)).collect();
    let discrete = domain == ThetaDomain::Discrete8;
    let mut raw: Vec<(&'static str, Site, Vec<usize>, TestOutcome)> = Vec::new();
    for (gi, map) in data.iter().enumerate() {
        for (site, d) in map {
            if !d.deltas.is_empty() {
                let t = if discrete {
                    let counts = discrete_counts(&d.deltas);
                    if counts[8] > 0 {
                        TestOutcome {
                            statistic: counts[8] as f64,
                            p_value: 0.0,
                        }
                    } else {
                        chi2_uniform(&counts[..8])?
                    }
                } else {
                    let unit: Vec<f64> = d.deltas.iter().map(|v| v / TAU).collect();
                    ks_uniform(&unit)?
                };
                raw.push(("delta_uniform", *site, vec![gi], t));
            }
            if d.bits[0] + d.bits[1] > 0 {
                raw.push(("bits_uniform", *site, vec![gi], chi2_uniform(&d.bits)?));
            }
        }
    }
    for a in 0..data.len() {
        for b in a + 1..data.len() {
            for (site, da) in &data[a] {
                let Some(db) = data[b].get(site) else { continue };
                if da.deltas.is_empty() || db.deltas.is_empty() {
                    continue;
                }
                let t = if discrete {
                    chi2_homogeneity(&[discrete_counts(&da.deltas), discrete_counts(&db.deltas)])?
                } else {
                    ks_two_sample(&da.deltas, &db.deltas)?
                };
                raw.push(("delta_two_sample", *site, vec![a, b], t));
            }
        }
    }
    let n_tests = raw.len();
    if n_tests == 0 {
        return Err(Error::InsufficientSamples("transcripts contain no measurements".into()));
    }
    let corrected_alpha = alpha / n_tests as f64;
    let tests: Vec<AuditTest> = raw
        .into_iter()
        .map(|(kind, site, groups, t)| AuditTest {
            kind,
            site: (site.x, site.y),
            groups,
            statistic: t.statistic,
            p_value: t.p_value,
            rejected: t.p_value < corrected_alpha,
        })
        .collect();
    let n_rejected = tests.iter().filter(|t| t.rejected).count();
    Ok(AuditReport {
        alpha,
        corrected_alpha,
        n_tests,
        n_rejected,
        pass: n_rejected == 0,
        tests,
    })
}
