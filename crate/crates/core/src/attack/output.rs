use std::io::Write;

use serde::Serialize;

use super::run::AttackResult;
use crate::error::{Error, Result};
use crate::quantum::Statevector;

/// Binary P5 image of `|a_j|` on a `side × side` grid, scaled so the
/// largest magnitude is 255.
pub fn write_pgm(mut w: impl Write, state: &Statevector, side: usize) -> Result<()> {
    let amps = state.amplitudes();
    if side * side != amps.len() {
        return Err(Error::DimensionMismatch {
            expected: side * side,
            actual: amps.len(),
        });
    }
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let pixels: Vec<u8> = amps
        .iter()
        .map(|a| if max > 0.0 { (a.norm() / max * 255.0).round() as u8 } else { 0 })
        .collect();
    write!(w, "P5\n{side} {side}\n255\n")?;
    w.write_all(&pixels)?;
    Ok(())
}

#[derive(Serialize)]
struct RunDoc<'a> {
    label: &'a [f64],
    final_loss: f64,
    state: Vec<[f64; 2]>,
    loss_trace: &'a [f64],
}

#[derive(Serialize)]
struct ResultDoc<'a> {
    recovered_label: &'a [f64],
    final_loss: f64,
    fidelity_vs_truth: Option<f64>,
    per_label_losses: Vec<(&'a [f64], f64)>,
    recovered_state: Vec<[f64; 2]>,
    runs: Vec<RunDoc<'a>>,
}

fn amps(s: &Statevector) -> Vec<[f64; 2]> {
    s.amplitudes().iter().map(|a| [a.re, a.im]).collect()
}

/// Pretty-printed JSON document of an attack result.
pub fn attack_result_json(r: &AttackResult) -> Result<String> {
    let doc = ResultDoc {
        recovered_label: &r.recovered_label,
        final_loss: r.final_loss,
        fidelity_vs_truth: r.fidelity_vs_truth,
        per_label_losses: r.runs.iter().map(|x| (x.label.as_slice(), x.final_loss)).collect(),
        recovered_state: amps(&r.recovered_state),
        runs: r
            .runs
            .iter()
            .map(|x| RunDoc {
                label: &x.label,
                final_loss: x.final_loss,
                state: amps(&x.state),
                loss_trace: &x.loss_trace,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}
