use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::VertexId;

use super::log::{EventLog, NO_PARENT};

/// State of a run at time `t`.
///
/// The occupied set `A_t` is always a prefix of the activation order, so it is
/// stored as a count; the red set `R_t` is stored as sorted vertex ids together
/// with each red vertex's parent, which is all the red-path and red-cluster
/// computations need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub occupied: usize,
    pub red: Vec<VertexId>,
    red_parent: Vec<VertexId>,
    /// `#∂*A_t`: children of occupied vertices that are not occupied.
    pub boundary_size: u64,
    /// `H_t`, vertices on the longest root-away chain of red vertices.
    pub h: u32,
    /// `M_t`, size of the largest connected red component.
    pub m_cluster: u32,
}

impl Snapshot {
    fn empty(t: f64) -> Self {
        Self {
            t,
            occupied: 0,
            red: Vec::new(),
            red_parent: Vec::new(),
            boundary_size: 0,
            h: 0,
            m_cluster: 0,
        }
    }

    pub fn occupied_ids(&self) -> Range<VertexId> {
        0..self.occupied as VertexId
    }

    pub fn red_count(&self) -> usize {
        self.red.len()
    }

    pub fn is_red(&self, id: VertexId) -> bool {
        self.red.binary_search(&id).is_ok()
    }

    fn red_index(&self, id: VertexId) -> Option<usize> {
        if id == NO_PARENT {
            return None;
        }
        self.red.binary_search(&id).ok()
    }
}

/// Colors the log at time `t`. Negative times give the empty snapshot.
pub fn snapshot(log: &EventLog, t: f64) -> Result<Snapshot> {
    if t < 0.0 {
        return Ok(Snapshot::empty(t));
    }
    log.check_horizon(t)?;
    let occupied = log.occupied_count(t);

    let mut red = Vec::new();
    let mut red_parent = Vec::new();
    let mut child_edges = 0u64;
    for v in 0..occupied {
        child_edges += u64::from(log.offspring[v]);
        if t < log.tau[v] + log.recovery[v] {
            red.push(v as VertexId);
            red_parent.push(log.parent[v]);
        }
    }
    // every occupied vertex except the root is a child of an occupied vertex
    let boundary_size = child_edges + 1 - occupied as u64;

    let mut snap = Snapshot {
        t,
        occupied,
        red,
        red_parent,
        boundary_size,
        h: 0,
        m_cluster: 0,
    };
    snap.h = longest_red_path(&snap);
    snap.m_cluster = largest_red_cluster(&snap);
    Ok(snap)
}

/// Vertices on the longest parent-to-child chain of red vertices.
///
/// Children always carry larger ids than their parents, so one sweep in
/// decreasing id order sees every child before its parent.
pub fn longest_red_path(snap: &Snapshot) -> u32 {
    let mut below = vec![0u32; snap.red.len()];
    let mut best = 0;
    for i in (0..snap.red.len()).rev() {
        let chain = below[i] + 1;
        best = best.max(chain);
        if let Some(p) = snap.red_index(snap.red_parent[i]) {
            below[p] = below[p].max(chain);
        }
    }
    best
}

/// Size of the largest component of the red-induced subgraph.
pub fn largest_red_cluster(snap: &Snapshot) -> u32 {
    let mut size = vec![0u32; snap.red.len()];
    let mut best = 0;
    for i in (0..snap.red.len()).rev() {
        size[i] += 1;
        match snap.red_index(snap.red_parent[i]) {
            Some(p) => size[p] += size[i],
            None => best = best.max(size[i]),
        }
    }
    best
}
