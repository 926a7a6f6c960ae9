//! Audits server transcripts of two different computations for any
//! dependence on the computation, first with uniform secret angles, then with
//! the angles forced to zero.
//!
//! ```text
//! cargo run --release --example blindness_audit -- [sessions]
//! ```

use qfl::harness::{run_selftest, SelftestConfig};
use qfl::ubqc::ThetaDomain;

fn main() -> qfl::Result<()> {
    let sessions: usize = std::env::args().nth(1).map_or(1000, |s| s.parse().expect("sessions"));
    for theta in [ThetaDomain::Continuous, ThetaDomain::Discrete8, ThetaDomain::Zero] {
        let report = run_selftest(&SelftestConfig {
            theta,
            sessions,
            ..SelftestConfig::default()
        })?;
        let worst = report.audit.tests.iter().map(|t| t.p_value).fold(1.0, f64::min);
        println!(
            "{:<10} equivalence {} | audit: {} of {} tests rejected at {:.1e}, smallest p {:.2e} | {}",
            theta.tag(),
            if report.equivalence_pass { "ok" } else { "FAILED" },
            report.audit.n_rejected,
            report.audit.n_tests,
            report.audit.corrected_alpha,
            worst,
            if report.pass { "pass" } else { "fail" }
        );
    }
    Ok(())
}
