//! First passage percolation with recovery on the semi-line and on
//! Galton–Watson trees.
//!
//! The crate is split into four layers:
//!
//! - [`graph`]: offspring distributions and lazy vertex structure,
//! - [`sim`]: the event-driven engine producing an [`sim::EventLog`] and the
//!   per-run observables (occupied set, red set, longest red path, largest red
//!   cluster, tail cluster, jump chain),
//! - [`exact`]: closed-form values for the tail-cluster law, complete-recovery
//!   probabilities and the constants of the percolation coupling,
//! - [`lab`]: replicated Monte Carlo experiments that reconcile the two.

pub mod error;
pub mod exact;
pub mod graph;
pub mod lab;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use graph::{OffspringKind, OffspringSpec};
pub use sim::{run_replication, snapshot, EventLog, RunConfig, Snapshot, StopRule};
