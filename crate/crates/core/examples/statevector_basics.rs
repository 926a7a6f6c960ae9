//! Builds a Bell-state circuit from the native gate set and reads out its
//! computational-basis distribution.
//!
//! ```text
//! cargo run --example statevector_basics
//! ```

use std::f64::consts::FRAC_PI_2;

use qfl::quantum::{fidelity, run_circuit, Circuit, Gate, Statevector};

fn main() -> qfl::Result<()> {
    let mut bell = Circuit::new(2);
    bell.push(Gate::h(0))?;
    bell.push(Gate::cnot(0, 1))?;
    let state = run_circuit(&Statevector::zero(2)?, &bell)?;
    println!("Bell amplitudes: {:?}", state.amplitudes());
    println!("P(00, 01, 10, 11) = {:?}", state.readout_distribution(&[0, 1])?);
    println!("P(qubit 0) = {:?}", state.readout_distribution(&[0])?);

    // H = RZ(π/2) RX(π/2) RZ(π/2) up to a global phase.
    let mut euler = Circuit::new(1);
    euler.push(Gate::rz(0, FRAC_PI_2))?;
    euler.push(Gate::rx(0, FRAC_PI_2))?;
    euler.push(Gate::rz(0, FRAC_PI_2))?;
    let a = run_circuit(&Statevector::zero(1)?, &euler)?;
    let b = apply_h()?;
    println!("fidelity(RZ RX RZ |0>, H |0>) = {:.12}", fidelity(&a, &b)?);

    let undo = bell.clone().then(&bell.inverse())?;
    let back = run_circuit(&Statevector::zero(2)?, &undo)?;
    println!("circuit then inverse returns |00> with fidelity {:.12}", fidelity(&back, &Statevector::zero(2)?)?);
    Ok(())
}

fn apply_h() -> qfl::Result<Statevector> {
    let mut s = Statevector::zero(1)?;
    s.apply(&Gate::h(0))?;
    Ok(s)
}
