//! Experiments on the semi-line.

use serde::{Deserialize, Serialize};

use super::report::{Estimate, ExperimentReport};
use super::runner::Runner;
use super::stats::{mean, proportion, quantile};
use crate::error::{Error, Result};
use crate::exact::{nu_limit, nu_n, pi_tail};
use crate::graph::OffspringSpec;
use crate::sim::{jump_chain, run_replication, tail_cluster_size, EventLog, RunConfig, StopRule};

/// Distance from `e^{-1/γ}` within which a complete-recovery estimate is
/// noted as close to the limit.
pub const LIMIT_BAND: f64 = 0.02;

fn semi_line_run(gamma: f64, n: usize, seed: u64, stream: u64) -> Result<EventLog> {
    let config = RunConfig::new(OffspringSpec::semi_line(), gamma, StopRule::NMax(n))
        .with_seed(seed)
        .with_stream(stream)
        .with_vertex_cap(n.max(1));
    run_replication(&config)
}

fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailLawParams {
    pub gamma: f64,
    pub n: usize,
    pub m_max: usize,
    pub reps: u64,
    pub seed: u64,
}

/// Empirical `P(Ĥ_n ≥ m)` for `m = 1..=m_max` against `Π(m)`.
pub fn estimate_tail_law(runner: &Runner, p: &TailLawParams) -> Result<ExperimentReport> {
    check_reps(p.reps)?;
    if p.m_max == 0 || p.n < p.m_max {
        return Err(Error::invalid("need 1 <= m_max <= n"));
    }
    let oracles = (1..=p.m_max)
        .map(|m| pi_tail(m as u64, p.gamma).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let sizes = runner.map(0, p.reps, |i| {
        tail_cluster_size(&semi_line_run(p.gamma, p.n, p.seed, i)?, p.n)
    })?;
    let mut at_least = vec![0u64; p.m_max + 1];
    for &h in &sizes {
        for count in at_least.iter_mut().take(h.min(p.m_max) + 1) {
            *count += 1;
        }
    }

    let mut report = ExperimentReport::new("tail")
        .param("gamma", p.gamma)
        .param("n", p.n)
        .param("m_max", p.m_max)
        .param("reps", p.reps)
        .param("seed", p.seed);
    for (m, oracle) in (1..=p.m_max).zip(oracles) {
        let est = proportion(at_least[m], p.reps);
        report.push(Estimate::new(format!("P(tail>={m})"), est).against(oracle));
    }
    report.replications_used = p.reps;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompleteRecoveryParams {
    pub gamma: f64,
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
}

/// Indices `k` in `2..=len` (1-based) at which the red set is exactly `{k}`,
/// i.e. every earlier vertex has recovered by `τ_k`.
pub fn complete_recovery_indices(log: &EventLog) -> Vec<usize> {
    let mut latest_end = f64::NEG_INFINITY;
    let mut hits = Vec::new();
    for (k, (&tau, &c)) in log.tau.iter().zip(&log.recovery).enumerate() {
        if k > 0 && latest_end <= tau {
            hits.push(k + 1);
        }
        latest_end = latest_end.max(tau + c);
    }
    hits
}

/// Frequency of `R_{τ_{n+1}} = {n+1}` against `ν_n`, and the number of
/// complete-recovery indices `k ≤ n` per run.
pub fn estimate_complete_recovery(
    runner: &Runner,
    p: &CompleteRecoveryParams,
) -> Result<ExperimentReport> {
    check_reps(p.reps)?;
    if p.n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let oracle = nu_n(p.n as u64, p.gamma)?;
    let limit = nu_limit(p.gamma)?;
    let outcomes = runner.map(0, p.reps, |i| {
        let log = semi_line_run(p.gamma, p.n + 1, p.seed, i)?;
        let hits = complete_recovery_indices(&log);
        let complete = hits.last() == Some(&(p.n + 1));
        Ok((complete, hits.iter().filter(|&&k| k <= p.n).count()))
    })?;
    let successes = outcomes.iter().filter(|o| o.0).count() as u64;
    let counts: Vec<f64> = outcomes.iter().map(|o| o.1 as f64).collect();

    let mut report = ExperimentReport::new("nu")
        .param("gamma", p.gamma)
        .param("n", p.n)
        .param("reps", p.reps)
        .param("seed", p.seed);
    let est = proportion(successes, p.reps);
    report.push(Estimate::new("nu", est).against(oracle.value));
    report.push(
        Estimate::new("nu_vs_limit", est)
            .with_oracle(limit)
            .noted((est.point - limit).abs() <= LIMIT_BAND),
    );
    report.push(Estimate::new("recovery_indices_mean", mean(&counts)));
    report.push(Estimate::new("recovery_indices_median", quantile(&counts, 0.5)));
    report.replications_used = p.reps;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WChainParams {
    pub gamma: f64,
    /// Activations per run.
    pub length: usize,
    pub reps: u64,
    pub seed: u64,
    /// Observations needed before a state's frequency is checked.
    pub min_obs: u64,
}

/// Pooled up-move frequencies of the jump chain from each state `w`,
/// against `1/(1 + γw)`.
pub fn wchain_transition_check(runner: &Runner, p: &WChainParams) -> Result<ExperimentReport> {
    check_reps(p.reps)?;
    if p.length < 2 {
        return Err(Error::invalid("length must be at least 2"));
    }
    let per_run = runner.map(0, p.reps, |i| {
        let chain = jump_chain(&semi_line_run(p.gamma, p.length, p.seed, i)?);
        let mut ups: Vec<(u64, u64)> = Vec::new();
        for pair in chain.windows(2) {
            let w = pair[0].w as usize;
            if ups.len() <= w {
                ups.resize(w + 1, (0, 0));
            }
            ups[w].1 += 1;
            if pair[1].w > pair[0].w {
                ups[w].0 += 1;
            }
        }
        Ok(ups)
    })?;
    let mut pooled: Vec<(u64, u64)> = Vec::new();
    for run in per_run {
        if pooled.len() < run.len() {
            pooled.resize(run.len(), (0, 0));
        }
        for (acc, (up, total)) in pooled.iter_mut().zip(run) {
            acc.0 += up;
            acc.1 += total;
        }
    }

    let mut report = ExperimentReport::new("wchain")
        .param("gamma", p.gamma)
        .param("length", p.length)
        .param("reps", p.reps)
        .param("seed", p.seed)
        .param("min_obs", p.min_obs);
    for (w, &(up, total)) in pooled.iter().enumerate() {
        if total == 0 {
            continue;
        }
        let oracle = 1.0 / (1.0 + p.gamma * w as f64);
        let est = Estimate::new(format!("up(w={w})"), proportion(up, total));
        let ok = est.interval().contains(oracle);
        report.push(if total >= p.min_obs {
            est.with_oracle(oracle).judged(ok)
        } else {
            est.with_oracle(oracle).noted(ok)
        });
    }
    report.replications_used = p.reps;
    Ok(report)
}
