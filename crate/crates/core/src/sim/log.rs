use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{OffspringSpec, VertexId, VertexRecord};

pub(crate) const NO_PARENT: VertexId = VertexId::MAX;

/// Full realization of one run, stored column-wise in activation order.
///
/// Vertex `i` (0-based) is the `(i+1)`-th vertex reached; the root is vertex 0.
/// Besides the activation time and recovery duration the log keeps each
/// vertex's offspring count, which is what the external boundary is made of.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventLog {
    pub(crate) graph: OffspringSpec,
    pub(crate) gamma: f64,
    pub(crate) parent: Vec<VertexId>,
    pub(crate) depth: Vec<u32>,
    pub(crate) tau: Vec<f64>,
    pub(crate) recovery: Vec<f64>,
    pub(crate) offspring: Vec<u32>,
    pub(crate) extinct: bool,
    pub(crate) final_time: f64,
}

/// One row of an [`EventLog`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoggedVertex {
    pub record: VertexRecord,
    pub tau: f64,
    pub recovery_duration: f64,
    pub offspring: u32,
}

/// Input row for [`EventLog::from_entries`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogEntry {
    pub parent: Option<VertexId>,
    pub tau: f64,
    pub recovery_duration: f64,
    pub offspring: u32,
}

impl EventLog {
    pub(crate) fn with_capacity(graph: OffspringSpec, gamma: f64, capacity: usize) -> Self {
        Self {
            graph,
            gamma,
            parent: Vec::with_capacity(capacity),
            depth: Vec::with_capacity(capacity),
            tau: Vec::with_capacity(capacity),
            recovery: Vec::with_capacity(capacity),
            offspring: Vec::with_capacity(capacity),
            extinct: false,
            final_time: 0.0,
        }
    }

    /// Builds a log from explicit rows, checking every structural invariant:
    /// the root comes first at time 0, parents precede children, activation
    /// times strictly increase, each child is reached strictly after its
    /// parent, and no vertex has more logged children than offspring.
    pub fn from_entries(
        graph: OffspringSpec,
        gamma: f64,
        entries: &[LogEntry],
        final_time: f64,
        extinct: bool,
    ) -> Result<Self> {
        let mut log = Self::with_capacity(graph, gamma, entries.len());
        let mut children = vec![0u32; entries.len()];
        for (i, e) in entries.iter().enumerate() {
            let id = i as VertexId;
            match (i, e.parent) {
                (0, None) => {
                    if e.tau != 0.0 {
                        return Err(Error::invalid("root must be reached at time 0"));
                    }
                }
                (0, Some(_)) => return Err(Error::invalid("vertex 0 must be the root")),
                (_, None) => return Err(Error::invalid(format!("vertex {id} has no parent"))),
                (_, Some(p)) => {
                    if p >= id {
                        return Err(Error::invalid(format!(
                            "vertex {id} has parent {p}, which is not reached earlier"
                        )));
                    }
                    if e.tau <= log.tau[i - 1] {
                        return Err(Error::invalid(format!(
                            "activation times must strictly increase (vertex {id})"
                        )));
                    }
                    if e.tau <= log.tau[p as usize] {
                        return Err(Error::invalid(format!(
                            "vertex {id} is reached before its parent"
                        )));
                    }
                    children[p as usize] += 1;
                    if children[p as usize] > entries[p as usize].offspring {
                        return Err(Error::invalid(format!("vertex {p} has too many children")));
                    }
                }
            }
            if e.recovery_duration.is_nan() || e.recovery_duration <= 0.0 {
                return Err(Error::invalid(format!(
                    "recovery duration of vertex {id} must be positive"
                )));
            }
            let depth = e.parent.map_or(0, |p| log.depth[p as usize] + 1);
            log.push(e.parent.unwrap_or(NO_PARENT), depth, e.tau, e.recovery_duration, e.offspring);
        }
        if entries.is_empty() {
            return Err(Error::invalid("a log needs at least the root"));
        }
        if final_time < log.tau[entries.len() - 1] {
            return Err(Error::invalid("final_time precedes the last activation"));
        }
        log.final_time = final_time;
        log.extinct = extinct;
        Ok(log)
    }

    #[inline]
    pub(crate) fn push(&mut self, parent: VertexId, depth: u32, tau: f64, recovery: f64, offspring: u32) {
        self.parent.push(parent);
        self.depth.push(depth);
        self.tau.push(tau);
        self.recovery.push(recovery);
        self.offspring.push(offspring);
    }

    pub fn graph(&self) -> &OffspringSpec {
        &self.graph
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// The queue ran dry: the tree is finite and fully explored.
    pub fn extinct(&self) -> bool {
        self.extinct
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    /// Latest time at which a snapshot is fully determined by the log.
    pub fn horizon(&self) -> f64 {
        if self.extinct {
            f64::INFINITY
        } else {
            self.final_time
        }
    }

    pub fn tau(&self, id: VertexId) -> f64 {
        self.tau[id as usize]
    }

    pub fn taus(&self) -> &[f64] {
        &self.tau
    }

    pub fn recovery_duration(&self, id: VertexId) -> f64 {
        self.recovery[id as usize]
    }

    pub fn parent(&self, id: VertexId) -> Option<VertexId> {
        let p = self.parent[id as usize];
        (p != NO_PARENT).then_some(p)
    }

    pub fn depth(&self, id: VertexId) -> u32 {
        self.depth[id as usize]
    }

    pub fn offspring(&self, id: VertexId) -> u32 {
        self.offspring[id as usize]
    }

    pub fn record(&self, id: VertexId) -> VertexRecord {
        VertexRecord {
            id,
            parent: self.parent(id),
            depth: self.depth(id),
        }
    }

    pub fn vertex(&self, id: VertexId) -> LoggedVertex {
        LoggedVertex {
            record: self.record(id),
            tau: self.tau(id),
            recovery_duration: self.recovery_duration(id),
            offspring: self.offspring(id),
        }
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = LoggedVertex> + '_ {
        (0..self.len() as VertexId).map(|id| self.vertex(id))
    }

    /// `#A_t`: vertices reached by time `t` (they form a prefix of the log).
    pub fn occupied_count(&self, t: f64) -> usize {
        self.tau.partition_point(|&tau| tau <= t)
    }

    /// Largest depth among the first `count` vertices.
    pub fn max_depth(&self, count: usize) -> u32 {
        self.depth[..count.min(self.len())].iter().copied().max().unwrap_or(0)
    }

    pub(crate) fn check_horizon(&self, t: f64) -> Result<()> {
        if t > self.horizon() {
            return Err(Error::OutOfHorizon {
                what: format!("t = {t}"),
                horizon: self.horizon(),
            });
        }
        Ok(())
    }
}
