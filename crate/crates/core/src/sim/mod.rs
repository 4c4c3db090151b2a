//! Event-driven realization of first passage percolation with recovery.
//!
//! [`run_replication`] produces an immutable [`EventLog`]; every observable is a
//! pure function of the log (recovery is resolved at query time, never queued).

mod config;
mod engine;
mod export;
mod log;
mod observables;
mod snapshot;

pub use config::{RunConfig, StopRule, DEFAULT_VERTEX_CAP};
pub use engine::run_replication;
pub use export::{write_event_log_csv, write_snapshots_csv, EVENT_LOG_HEADER, SNAPSHOT_HEADER};
pub use log::{EventLog, LogEntry, LoggedVertex};
pub use observables::{jump_chain, reaching_times, tail_cluster_size, JumpPoint};
pub use snapshot::{largest_red_cluster, longest_red_path, snapshot, Snapshot};
