use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::log::EventLog;

/// `Ĥ_n` on the semi-line: the run of red vertices ending at vertex `n`
/// (1-based), observed at its own reaching time `τ_n`.
pub fn tail_cluster_size(log: &EventLog, n: usize) -> Result<usize> {
    if !log.graph().is_semi_line() {
        return Err(Error::invalid("the tail cluster is defined on the semi-line only"));
    }
    if n == 0 {
        return Err(Error::invalid("vertices are numbered from 1"));
    }
    if n > log.len() {
        return Err(Error::OutOfHorizon {
            what: format!("vertex {n} (log has {} vertices)", log.len()),
            horizon: log.final_time(),
        });
    }
    let t = log.tau[n - 1];
    let run = (0..n)
        .rev()
        .take_while(|&v| t < log.tau[v] + log.recovery[v])
        .count();
    Ok(run)
}

/// One state of the embedded chain of `#R_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpPoint {
    pub sigma: f64,
    pub w: u64,
}

/// Jump times `σ_n` of `t ↦ #R_t` and the states `W_n = #R_{σ_n}`.
///
/// Activations add one red vertex; recoveries remove one and are only counted
/// when they happen strictly inside the simulated horizon.
pub fn jump_chain(log: &EventLog) -> Vec<JumpPoint> {
    let horizon = log.horizon();
    let mut recoveries: Vec<f64> = log
        .tau
        .iter()
        .zip(&log.recovery)
        .map(|(tau, c)| tau + c)
        .filter(|&end| end < horizon)
        .collect();
    recoveries.sort_by(f64::total_cmp);

    let mut chain = Vec::with_capacity(log.len() + recoveries.len());
    let mut w = 0u64;
    let mut rec = recoveries.iter().peekable();
    for &tau in &log.tau {
        while let Some(&&end) = rec.peek() {
            if end >= tau {
                break;
            }
            w -= 1;
            chain.push(JumpPoint { sigma: end, w });
            rec.next();
        }
        w += 1;
        chain.push(JumpPoint { sigma: tau, w });
    }
    for &end in rec {
        w -= 1;
        chain.push(JumpPoint { sigma: end, w });
    }
    chain
}

/// `θ_n` for `n = 1..=len`, the activation time of the `n`-th vertex.
pub fn reaching_times(log: &EventLog) -> Vec<(usize, f64)> {
    log.tau.iter().enumerate().map(|(i, &t)| (i + 1, t)).collect()
}
