//! Compiles a two-wire circuit onto the brickwork graph and evaluates the
//! measurement pattern exactly, by sampling, and with corrections switched
//! off.
//!
//! ```text
//! cargo run --example brickwork_pattern
//! ```

use qfl::mbqc::{compile_circuit, evaluate_pattern, evaluate_pattern_with, total_variation, EvalMode, EvalOptions};
use qfl::quantum::{run_circuit, Circuit, Gate, Statevector};

fn main() -> qfl::Result<()> {
    let mut c = Circuit::new(2);
    c.push(Gate::rx(0, 0.9))?;
    c.push(Gate::h(1))?;
    c.push(Gate::cnot(1, 0))?;
    c.push(Gate::rz(0, 1.7))?;

    let pattern = compile_circuit(&c)?;
    let g = pattern.graph();
    println!("{} rows x {} columns, {} bricks, {} sites", g.n_rows(), g.n_cols(), g.n_bricks(), g.n_sites());
    println!("{}", pattern.to_text());

    let direct = run_circuit(&Statevector::zero(2)?, &c)?.readout_distribution(&[0, 1])?;
    let empty = Circuit::new(2);
    let exact = evaluate_pattern(&pattern, &empty, EvalMode::Exact)?;
    let sampled = evaluate_pattern(&pattern, &empty, EvalMode::Sampled { shots: 4000, seed: 1 })?;
    let bare = evaluate_pattern_with(
        &pattern,
        &empty,
        EvalMode::Exact,
        &EvalOptions {
            corrections: false,
            ..EvalOptions::default()
        },
    )?;
    println!("direct        {direct:.4?}");
    println!("exact pattern {exact:.4?}  tv {:.2e}", total_variation(&exact, &direct));
    println!("4000 shots    {sampled:.4?}  tv {:.2e}", total_variation(&sampled, &direct));
    println!("uncorrected   {bare:.4?}  tv {:.2e}", total_variation(&bare, &direct));
    Ok(())
}
