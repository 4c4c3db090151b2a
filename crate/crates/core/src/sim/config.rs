use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::OffspringSpec;

pub const DEFAULT_VERTEX_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Simulate every activation up to and including time `t_max`.
    TMax(f64),
    /// Stop right after the `n_max`-th activation.
    NMax(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub graph: OffspringSpec,
    /// Recovery rate (recovery durations are `Exp(gamma)`).
    pub gamma: f64,
    pub stop: StopRule,
    pub vertex_cap: usize,
    pub seed: u64,
    /// Stream index within `seed`; replications of an experiment use their index.
    pub stream: u64,
}

impl RunConfig {
    pub fn new(graph: OffspringSpec, gamma: f64, stop: StopRule) -> Self {
        Self {
            graph,
            gamma,
            stop,
            vertex_cap: DEFAULT_VERTEX_CAP,
            seed: 0,
            stream: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn with_stop(mut self, stop: StopRule) -> Self {
        self.stop = stop;
        self
    }

    pub fn with_vertex_cap(mut self, cap: usize) -> Self {
        self.vertex_cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::invalid(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.vertex_cap == 0 || self.vertex_cap > u32::MAX as usize {
            return Err(Error::invalid("vertex_cap must lie in [1, 2^32 - 1]"));
        }
        match self.stop {
            StopRule::TMax(t) if !(t.is_finite() && t >= 0.0) => Err(Error::invalid(format!(
                "t_max must be finite and non-negative, got {t}"
            ))),
            StopRule::NMax(0) => Err(Error::invalid("n_max must be at least 1")),
            StopRule::NMax(n) if n > self.vertex_cap => Err(Error::invalid(format!(
                "n_max ({n}) exceeds vertex_cap ({})",
                self.vertex_cap
            ))),
            _ => Ok(()),
        }
    }
}
