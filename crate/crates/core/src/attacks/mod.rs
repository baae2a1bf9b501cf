//! Two-phase attacks: strategies, their execution, hand-built and compiled
//! attacks, numerical optimization, and set-membership oracles.

pub mod builtin;
pub mod execute;
pub mod gardenhose;
pub mod seesaw;
pub mod serial;
pub mod sset;
pub mod strategy;

pub use builtin::{classical_copy_attack, forward_to_bob, grid_search_measure_and_copy, keep_q, measure_and_copy};
pub use execute::{
    attack_report, average_success, epsilon_l_report, execute, execute_meas, execute_route, mix_strategies, pair_successes,
    AttackReport, PairSuccess,
};
pub use gardenhose::GardenHose;
pub use seesaw::{seesaw_optimize, SeesawConfig, SeesawResult, StartMode};
pub use serial::StrategyFile;
pub use sset::{s_set_distance, SetMembership, Which};
pub use strategy::{AttackKind, AttackStrategy, Finale, Shape};
