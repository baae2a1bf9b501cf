//! The verification protocols on a line: single rounds with a timing model,
//! sequential repetition and the noisy threshold rule, and JSON experiments.

pub mod experiment;
pub mod prover;
pub mod repeat;
pub mod run;
pub mod timing;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentResult, ExperimentRow, ExperimentSummary, FunctionSpec, ProverSpec};
pub use prover::Prover;
pub use repeat::{
    repeat_sequential, run_noisy_threshold, AcceptTable, NoiseModel, NoisyOutcome, NoisyRepeatConfig, NoisyRunner, RoundOutcome,
    SequentialOutcome,
};
pub use run::{
    accept_probability, average_accept_probability, m1_accept_probability, m2_accept_probability, run_meas, run_protocol,
    run_route_bb84, run_route_entangled, timing_check, ProtocolConfig, ProtocolKind, ProtocolRun,
};
pub use timing::{Geometry, SpacetimeEvent, Verifier};
