//! Replicated Monte Carlo experiments checked against the exact oracles.
//!
//! Replication `i` of an experiment always runs on stream `i` of the
//! experiment seed, and results are folded in index order, so a report is a
//! pure function of its parameters whatever the number of workers.

mod containment;
mod percolation;
mod report;
mod runner;
mod semiline;
pub mod stats;
mod tree;

pub use containment::{containment_check, max_depth_profile, ContainmentParams};
pub use percolation::{
    percolation_cluster, sample_cluster_direct, ClusterLaw, PercolationParams, PERCOLATION_BAND,
};
pub use report::{Estimate, ExperimentReport, Verdict, REPORT_CSV_HEADER};
pub use runner::{Runner, Survivors};
pub use semiline::{
    complete_recovery_indices, estimate_complete_recovery, estimate_tail_law,
    wchain_transition_check, CompleteRecoveryParams, TailLawParams, WChainParams, LIMIT_BAND,
};
pub use tree::{
    boundary_at_count, check_boundary_inequality, estimate_eta, exploration_chain, growth_report,
    liminf_trend, BoundaryParams, EtaParams, GrowthParams, Observable, SurvivalMode,
    SurvivalPolicy, TrendParams, KS_LEVEL, MAX_ATTEMPTS_PER_REP, TREND_LEVEL,
};
