//! Exact statevector simulation.
//!
//! Rotation conventions are `RX(θ) = exp(-iθX/2)` and `RZ(θ) = exp(-iθZ/2)`.
//! Qubit 0 is the most significant bit of every basis index. Registers are
//! dense and capped at [`MAX_QUBITS`].

mod circuit;
mod gate;
mod state;

pub use circuit::Circuit;
pub use gate::{
    h_matrix, identity2, mat2_equal_up_to_phase, mat2_mul, rx_matrix, rz_matrix,
    zxz_euler_angles, Gate, Mat2,
};
pub use state::{apply_gate, fidelity, run_circuit, Statevector};

pub const MAX_QUBITS: usize = 20;
