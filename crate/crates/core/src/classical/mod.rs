//! One-bit classical communication, with and without shared randomness.

pub mod feasibility;
pub mod hull;
pub mod sr;
pub mod strategy;
pub mod strict1bit;

pub use feasibility::{
    enumerate_partitions, mixed_feasibility, mixed_strategy_from_certificate, MixedFeasibility,
    PartitionCertificate,
};
pub use hull::{hull_membership_oracle, HullResult, HullWitnessEntry};
pub use sr::{extreme_game_strategy, strict_sr_protocol, synth_sr_strategy};
pub use strategy::{
    sr_amount, visit_matrix_correlated, visit_matrix_mixed, Branch, CorrelatedStrategy,
    DeterministicStrategy, MixedStrategy,
};
pub use strict1bit::{strict_1bitsr_infeasibility, SearchConfig, Strict1BitSrReport};
