//! Delegates a circuit to a simulated server through the blind protocol and
//! shows what each side sees.
//!
//! ```text
//! cargo run --example blind_delegation
//! ```

use qfl::mbqc::{compile_circuit, total_variation, EvalMode};
use qfl::quantum::{run_circuit, Circuit, Gate, Statevector};
use qfl::ubqc::{delegate_shot, run_delegated, transcript_angles, UbqcConfig};

fn main() -> qfl::Result<()> {
    let mut c = Circuit::new(2);
    c.push(Gate::h(0))?;
    c.push(Gate::cnot(0, 1))?;
    c.push(Gate::rx(1, 0.4))?;
    let config = UbqcConfig::default();

    let pattern = compile_circuit(&c)?;
    for shot in 0..3 {
        let run = delegate_shot(&pattern, &config, 11, shot)?;
        let deltas: Vec<String> = transcript_angles(&run.transcript).iter().take(6).map(|d| format!("{d:.3}")).collect();
        println!("shot {shot}: server saw deltas [{} ...], client decoded output {:02b}", deltas.join(", "), run.output);
    }

    let direct = run_circuit(&Statevector::zero(2)?, &c)?.readout_distribution(&[0, 1])?;
    let (exact, _) = run_delegated(&c, EvalMode::Exact, &config, 11)?;
    let (sampled, _) = run_delegated(&c, EvalMode::Sampled { shots: 2000, seed: 11 }, &config, 11)?;
    println!("direct          {direct:.4?}");
    println!("delegated exact {exact:.4?}  tv {:.2e}", total_variation(&exact, &direct));
    println!("2000 sessions   {sampled:.4?}  tv {:.2e}", total_variation(&sampled, &direct));
    Ok(())
}
