//! Boolean functions, counting arithmetic and communication-complexity
//! brute force.

pub mod boolean;
pub mod cc;
pub mod counting;

pub use boolean::{hamming, ip_function, random_function, BooleanFunction};
pub use cc::{oneway_cc_bruteforce, smp_cc, smp_cc_bruteforce, CcResult};
pub use counting::{
    attacker_qubit_bound, counting_bound, delta_margin_check, hamming_volume, net_size_report,
    volume_entropy_check, CountingReport, NetSizeReport, QubitBoundInput,
};
