//! Compiles state-preparation circuits for random feature vectors and checks
//! the prepared state against the target.
//!
//! ```text
//! cargo run --release --example amplitude_encoding -- [n_qubits] [n_vectors]
//! ```

use qfl::encoding::{amplitude_encode, FeatureVector};
use qfl::quantum::{fidelity, run_circuit, Gate, Statevector};
use qfl::rng::stream;
use rand::Rng;

fn main() -> qfl::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(6, |s| s.parse().expect("n_qubits"));
    let count: usize = args.next().map_or(10, |s| s.parse().expect("n_vectors"));
    let mut rng = stream(7, 0);
    let mut worst = 1.0f64;
    for i in 0..count {
        let values: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let features = FeatureVector::padded_normalized(&values, 1 << n, 0)?;
        let prep = amplitude_encode(&features, n)?;
        let prepared = run_circuit(&Statevector::zero(n)?, &prep.circuit)?;
        let f = fidelity(&prepared, &features.to_state(n)?)?;
        worst = worst.min(f);
        if i == 0 {
            let cnots = prep.circuit.count_where(|g| matches!(g, Gate::Cnot { .. }));
            println!("{n} qubits: {} gates, {cnots} nearest-neighbour CNOTs", prep.circuit.len());
        }
    }
    println!("worst fidelity over {count} vectors: {worst:.15}");
    Ok(())
}
