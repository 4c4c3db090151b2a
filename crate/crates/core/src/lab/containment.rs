use serde::{Deserialize, Serialize};

use rand_distr::{Distribution, Exp1};

use super::report::{Estimate, ExperimentReport};
use super::runner::Runner;
use super::stats::{proportion, quantile, Interval};
use crate::error::{Error, Result};
use crate::exact::{c_tilde, ctilde_margin, DEFAULT_BISECTION_TOL};
use crate::graph::OffspringSpec;
use crate::rng::stream_rng;
use crate::sim::{RunConfig, StopRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentParams {
    /// Graph, seed, vertex cap and a `t_max` stop; `gamma` plays no role.
    pub config: RunConfig,
    /// Radius constant; `c_tilde(m)` when absent.
    pub c: Option<f64>,
    pub reps: u64,
}

/// `max{depth(v) : τ_v ≤ n}` for `n = 0..=⌊t_max⌋`.
///
/// Containment only involves reaching times and depths, which are path sums
/// of passage times, so the occupied set is explored depth first without an
/// event queue. Each vertex reads its offspring draws and then one `Exp(1)`
/// per child from the stream, in stack order; this is a different (equally
/// distributed) realization from the event engine under the same stream.
pub fn max_depth_profile(spec: &OffspringSpec, t_max: f64, seed: u64, stream: u64, cap: usize) -> Result<Vec<u32>> {
    let mut rng = stream_rng(seed, stream);
    let steps = t_max.floor() as usize;
    let mut deepest = vec![0u32; steps + 1];
    let mut stack = vec![(0.0f64, 0u32)];
    let mut visited = 0usize;
    while let Some((tau, depth)) = stack.pop() {
        visited += 1;
        if visited > cap {
            return Err(Error::VertexCap {
                cap,
                time: tau,
                activated: visited - 1,
                pending: stack.len() + 1,
            });
        }
        let bucket = tau.ceil() as usize;
        if bucket <= steps {
            deepest[bucket] = deepest[bucket].max(depth);
        }
        for _ in 0..spec.sample(&mut rng) {
            let passage: f64 = Exp1.sample(&mut rng);
            if tau + passage <= t_max {
                stack.push((tau + passage, depth + 1));
            }
        }
    }
    for n in 1..=steps {
        deepest[n] = deepest[n].max(deepest[n - 1]);
    }
    Ok(deepest)
}

/// Fraction of runs, per integer time `n ≤ t_max`, in which some vertex of
/// `A_n` lies deeper than `c·n`. The last time is asserted to have no
/// violations.
pub fn containment_check(runner: &Runner, p: &ContainmentParams) -> Result<ExperimentReport> {
    p.config.validate()?;
    let t_max = match p.config.stop {
        StopRule::TMax(t) if t >= 1.0 => t,
        _ => return Err(Error::invalid("containment needs a t_max stop of at least 1")),
    };
    if p.reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    let spec = &p.config.graph;
    if !spec.is_supercritical() {
        return Err(Error::invalid("containment needs a supercritical offspring law"));
    }
    let mean = spec.mean();
    let c = match p.c {
        Some(c) if c > 0.0 && c.is_finite() => c,
        Some(c) => return Err(Error::invalid(format!("radius constant must be positive, got {c}"))),
        None => c_tilde(mean, DEFAULT_BISECTION_TOL)?,
    };
    let profiles = runner.map(0, p.reps, |i| {
        max_depth_profile(spec, t_max, p.config.seed, i, p.config.vertex_cap)
    })?;
    let steps = t_max.floor() as usize;

    let mut report = ExperimentReport::new("containment")
        .param("graph", spec)
        .param("t_max", t_max)
        .param("c", c)
        .param("reps", p.reps)
        .param("seed", p.config.seed);
    report.push(Estimate::new("c", Interval::exact(c)));
    report.push(Estimate::new("g(c)", Interval::exact(ctilde_margin(c, mean))));
    for n in 1..=steps {
        let radius = c * n as f64;
        let violations = profiles.iter().filter(|d| f64::from(d[n]) > radius).count() as u64;
        let row = Estimate::new(format!("violations@n={n}"), proportion(violations, p.reps));
        report.push(if n == steps {
            row.with_oracle(0.0).judged(violations == 0)
        } else {
            row
        });
    }
    let ratios: Vec<f64> = profiles.iter().map(|d| f64::from(d[steps]) / steps as f64).collect();
    let q = quantile(&ratios, 0.99);
    report.push(Estimate::new(format!("q0.99(depth/n)@n={steps}"), q).with_oracle(c).noted(q.point <= c));
    report.replications_used = p.reps;
    Ok(report)
}
