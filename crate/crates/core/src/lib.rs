//! Simulation and verification toolkit for single-qubit quantum position
//! verification on a line: protocol execution, two-phase attacks and their
//! numerical optimization, communication-complexity brute force, and
//! numerical checks of the supporting inequalities.

pub mod analysis;
pub mod attacks;
pub mod checks;
pub mod error;
pub mod qcore;
pub mod protocol;
pub mod rng;

pub use analysis::BooleanFunction;
pub use attacks::{AttackKind, AttackReport, AttackStrategy, Shape};
pub use error::{Error, Result};
pub use qcore::{
    apply, bb84_state, bell_state, binary_entropy, conditional_entropy, fidelity, measure, partial_trace, purified_distance, Povm, QuantumState,
    RegisterLayout, Unitary,
};
pub use rng::SeedStream;
