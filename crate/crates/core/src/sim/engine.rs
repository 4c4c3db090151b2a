use rand_distr::{Distribution, Exp, Exp1};

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::rng::stream_rng;

use super::config::{RunConfig, StopRule};
use super::log::{EventLog, NO_PARENT};

/// A not-yet-reached child edge, keyed by its candidate reaching time.
///
/// Ordering is `(time, parent id, child slot)`: equal times (impossible except
/// with injected values) fall back to the parent's activation order and then to
/// left-to-right child order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    // bit pattern of a non-negative f64, which orders like the float itself
    key: u64,
    parent: VertexId,
    slot: u32,
}

impl Candidate {
    fn time(&self) -> f64 {
        f64::from_bits(self.key)
    }
}

/// Monotone radix heap over the bit patterns of candidate times.
///
/// Every key pushed is at least the last key popped (a child is never reached
/// before its parent), which is the only requirement of a radix heap. Bucket
/// `i > 0` holds keys whose highest bit differing from `last` is bit `i - 1`;
/// bucket 0 holds keys equal to `last`.
struct CandidateQueue {
    last: u64,
    len: usize,
    buckets: [Vec<Candidate>; 65],
}

impl CandidateQueue {
    fn new() -> Self {
        Self {
            last: 0,
            len: 0,
            buckets: std::array::from_fn(|_| Vec::new()),
        }
    }

    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn bucket_of(&self, key: u64) -> usize {
        (64 - (key ^ self.last).leading_zeros()) as usize
    }

    #[inline]
    fn push(&mut self, c: Candidate) {
        debug_assert!(c.key >= self.last);
        let b = self.bucket_of(c.key);
        self.buckets[b].push(c);
        self.len += 1;
    }

    fn pop(&mut self) -> Option<Candidate> {
        if self.len == 0 {
            return None;
        }
        if self.buckets[0].is_empty() {
            let i = (1..65).find(|&i| !self.buckets[i].is_empty())?;
            let mut moved = std::mem::take(&mut self.buckets[i]);
            self.last = moved.iter().map(|c| c.key).min().expect("bucket is non-empty");
            for c in moved.drain(..) {
                let b = self.bucket_of(c.key);
                self.buckets[b].push(c);
            }
            // hand the allocation back so the bucket does not regrow from zero
            if self.buckets[i].is_empty() {
                self.buckets[i] = moved;
            }
        }
        let zero = &mut self.buckets[0];
        let pick = if zero.len() == 1 {
            0
        } else {
            // equal times: lowest (parent, slot) first
            (0..zero.len()).min_by_key(|&j| zero[j]).expect("bucket is non-empty")
        };
        self.len -= 1;
        Some(zero.swap_remove(pick))
    }
}

/// Simulates one realization.
///
/// Activations are processed in time order from a priority queue of candidate
/// reaching times. When a vertex is activated the replication stream is read in
/// a fixed order: its offspring draws (see [`crate::graph::OffspringSpec::sample`]),
/// then one `Exp(1)` passage time per child edge from left to right, then one
/// `Exp(gamma)` recovery duration. Under a `t_max` stop, children whose
/// candidate time already exceeds `t_max` consume their draw but are never
/// queued.
pub fn run_replication(config: &RunConfig) -> Result<EventLog> {
    config.validate()?;
    let recovery = Exp::new(config.gamma).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = stream_rng(config.seed, config.stream);

    let (t_limit, n_limit) = match config.stop {
        StopRule::TMax(t) => (t, usize::MAX),
        StopRule::NMax(n) => (f64::INFINITY, n),
    };
    let capacity = match config.stop {
        StopRule::NMax(n) => n,
        StopRule::TMax(_) => 1024,
    };

    let mut log = EventLog::with_capacity(config.graph.clone(), config.gamma, capacity);
    let mut queue = CandidateQueue::new();
    queue.push(Candidate {
        key: 0f64.to_bits(),
        parent: NO_PARENT,
        slot: 0,
    });

    while let Some(next) = queue.pop() {
        let tau = next.time();
        if tau > t_limit {
            // only reachable for the root when t_max < 0, which validation forbids
            break;
        }
        let id = log.len();
        if id >= config.vertex_cap {
            return Err(Error::VertexCap {
                cap: config.vertex_cap,
                time: tau,
                activated: id,
                pending: queue.len() + 1,
            });
        }
        let depth = if next.parent == NO_PARENT {
            0
        } else {
            log.depth[next.parent as usize] + 1
        };

        let children = config.graph.sample(&mut rng);
        for slot in 0..children {
            let passage: f64 = Exp1.sample(&mut rng);
            let key = tau + passage;
            if key <= t_limit {
                queue.push(Candidate {
                    key: key.to_bits(),
                    parent: id as VertexId,
                    slot,
                });
            }
        }
        let duration = recovery.sample(&mut rng);
        log.push(next.parent, depth, tau, duration, children);

        if log.len() >= n_limit {
            break;
        }
    }

    // the tree is finite and fully explored iff every child edge was activated
    let child_edges: u64 = log.offspring.iter().map(|&d| u64::from(d)).sum();
    log.extinct = child_edges + 1 == log.len() as u64;
    log.final_time = match config.stop {
        StopRule::TMax(t) => t,
        StopRule::NMax(_) => *log.tau.last().expect("root is always activated"),
    };
    Ok(log)
}
