//! Measurement-based computation on brickwork graph states.
//!
//! A circuit on `n` wires compiles to an `n`-row brickwork pattern. Every
//! site is measured in the XY plane; outcome `s` at angle `φ` applies
//! `X^s·H·RZ(−φ)` to the logical wire. Angles are adapted to earlier
//! outcomes through the flow `(x, y) → (x+1, y)`. Output sites are measured
//! at angle 0 so that their corrected outcomes are the computational-basis
//! readout of the circuit.

mod compile;
mod evaluate;
mod graph;
mod pattern;
pub(crate) mod register;

pub use compile::{compile_circuit, compile_with_input};
pub use evaluate::{
    circuit_distribution, evaluate_pattern, evaluate_pattern_with, marginalize, sample_outcomes, total_variation,
    EvalMode, EvalOptions, DEFAULT_BRANCH_CAP,
};
pub use graph::{build_brickwork, BrickworkGraph, Site, BRICK_WIDTH};
pub use pattern::{adapt_angle, reduce_angle, Brick, BrickKind, MeasurementPattern};
