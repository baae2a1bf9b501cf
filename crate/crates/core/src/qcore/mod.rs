//! Dense state-vector and density-matrix primitives over named registers.

pub mod info;
pub mod layout;
pub mod linalg;
pub mod ops;
pub mod random;
pub mod state;

pub use info::{
    binary_entropy, conditional_entropy, fidelity, purified_distance, trace_distance, von_neumann_entropy,
};
pub use layout::{Register, RegisterLayout, Split, MAX_MIXED_QUBITS, MAX_QUBITS};
pub use linalg::{CMatrix, CVector, C64};
pub use ops::{apply, gates, measure, partial_trace, Povm, Unitary};
pub use random::{haar_random_unitary, random_pure_state};
pub use state::{bb84_state, bell_state, QuantumState, StateData};
