use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{Error, Result};

/// Fans replications out over a fixed number of workers.
///
/// Results always come back in replication order and the first error in
/// that order wins, so nothing an experiment reports depends on `jobs`.
pub struct Runner {
    pool: Option<ThreadPool>,
    jobs: usize,
}

/// Replications kept under survival conditioning.
#[derive(Debug, Clone)]
pub struct Survivors<T> {
    pub kept: Vec<T>,
    /// Replication indices consumed, kept or not: `0..attempted`.
    pub attempted: u64,
}

impl<T> Survivors<T> {
    pub fn discarded(&self) -> u64 {
        self.attempted - self.kept.len() as u64
    }
}

impl Runner {
    pub fn new(jobs: usize) -> Result<Self> {
        if jobs == 0 {
            return Err(Error::invalid("jobs must be at least 1"));
        }
        let pool = if jobs == 1 {
            None
        } else {
            Some(
                ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build()
                    .map_err(|e| Error::invalid(e.to_string()))?,
            )
        };
        Ok(Self { pool, jobs })
    }

    pub fn sequential() -> Self {
        Self {
            pool: None,
            jobs: 1,
        }
    }

    pub fn default_jobs() -> usize {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    }

    pub fn jobs(&self) -> usize {
        self.jobs
    }

    /// `f(i)` for every `i` in `start..end`, in index order.
    pub fn map<T, F>(&self, start: u64, end: u64, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync + Send,
    {
        let results: Vec<Result<T>> = match &self.pool {
            None => (start..end).map(&f).collect(),
            Some(pool) => pool.install(|| (start..end).into_par_iter().map(&f).collect()),
        };
        results.into_iter().collect()
    }

    /// Keeps the first `wanted` replications, in index order, for which `f`
    /// returns `Some`, trying at most `max_attempts` indices.
    pub fn collect_surviving<T, F>(&self, wanted: usize, max_attempts: u64, f: F) -> Result<Survivors<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<Option<T>> + Sync + Send,
    {
        let mut kept = Vec::with_capacity(wanted);
        let mut next = 0u64;
        while kept.len() < wanted && next < max_attempts {
            let missing = (wanted - kept.len()) as u64;
            // grow the batch with the observed rejection rate
            let batch = if next == 0 || kept.is_empty() {
                missing.max(next)
            } else {
                missing * next / kept.len() as u64 + 1
            };
            let end = (next + batch.max(self.jobs as u64)).min(max_attempts);
            for (offset, outcome) in self.map(next, end, &f)?.into_iter().enumerate() {
                if let Some(value) = outcome {
                    kept.push(value);
                    if kept.len() == wanted {
                        return Ok(Survivors {
                            kept,
                            attempted: next + offset as u64 + 1,
                        });
                    }
                }
            }
            next = end;
        }
        if kept.len() < wanted {
            return Err(Error::InsufficientData(format!(
                "only {} of {wanted} replications survived in {next} attempts",
                kept.len()
            )));
        }
        Ok(Survivors {
            kept,
            attempted: next,
        })
    }
}
