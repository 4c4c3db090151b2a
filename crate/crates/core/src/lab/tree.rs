//! Experiments on Galton–Watson trees.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::report::{Estimate, ExperimentReport};
use super::runner::Runner;
use super::stats::{ks_two_sample, proportion, quantile, Z};
use crate::error::{Error, Result};
use crate::exact::{reference_curve, Curve};
use crate::graph::OffspringSpec;
use crate::rng::aux_rng;
use crate::sim::{run_replication, snapshot, EventLog, RunConfig, Snapshot, StopRule};

/// Significance level of the exploration-chain KS comparison.
pub const KS_LEVEL: f64 = 0.001;

/// Attempts allowed per wanted replication under survival conditioning.
pub const MAX_ATTEMPTS_PER_REP: u64 = 100;

/// Which red-set statistic an experiment looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Observable {
    /// Longest root-away red chain.
    H,
    /// Largest red cluster.
    M,
}

impl Observable {
    pub fn of(self, snap: &Snapshot) -> u32 {
        match self {
            Observable::H => snap.h,
            Observable::M => snap.m_cluster,
        }
    }

    /// The `h(x)` of the η-hypothesis for this observable.
    pub fn eta_curve(self, r: f64) -> Curve {
        match self {
            Observable::H => Curve::EtaH { r },
            Observable::M => Curve::EtaM { r },
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observable::H => "H",
            Observable::M => "M",
        })
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(Observable::H),
            "M" | "m" => Ok(Observable::M),
            _ => Err(Error::invalid(format!("unknown observable {s:?} (expected H or M)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivalMode {
    Unconditioned,
    ConditionOnSurvival,
}

/// How extinct runs are treated.
///
/// Survival of the whole tree is not observable at a finite horizon; a run
/// counts as surviving when it is still alive at the horizon and has reached
/// `requirement` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivalPolicy {
    pub mode: SurvivalMode,
    pub requirement: usize,
}

impl SurvivalPolicy {
    pub fn unconditioned() -> Self {
        Self {
            mode: SurvivalMode::Unconditioned,
            requirement: 1,
        }
    }

    pub fn condition_on_survival(requirement: usize) -> Self {
        Self {
            mode: SurvivalMode::ConditionOnSurvival,
            requirement,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.requirement == 0 {
            return Err(Error::invalid("survival requirement must be at least 1"));
        }
        Ok(())
    }

    pub fn conditions(&self) -> bool {
        self.mode == SurvivalMode::ConditionOnSurvival
    }
}

impl fmt::Display for SurvivalPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            SurvivalMode::Unconditioned => f.write_str("unconditioned"),
            SurvivalMode::ConditionOnSurvival => write!(f, "survival(#A>={})", self.requirement),
        }
    }
}

fn check_reps(reps: u64) -> Result<()> {
    if reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    Ok(())
}

fn base_report(name: &str, config: &RunConfig) -> ExperimentReport {
    ExperimentReport::new(name)
        .param("graph", &config.graph)
        .param("gamma", config.gamma)
        .param("seed", config.seed)
        .param("vertex_cap", config.vertex_cap)
}

/// `Q_t` with `Q_t = 0` for negative `t`.
fn observe(log: &EventLog, t: f64, q: Observable) -> Result<u32> {
    Ok(q.of(&snapshot(log, t)?))
}

/// Runs the process of `config` up to time `t` (nothing to simulate for
/// negative `t`).
fn run_until(config: &RunConfig, t: f64, stream: u64) -> Result<Option<EventLog>> {
    if t < 0.0 {
        return Ok(None);
    }
    let config = config.clone().with_stop(StopRule::TMax(t)).with_stream(stream);
    run_replication(&config).map(Some)
}

/// The independent `Exp(1)` offset `T` of replication `stream`.
fn offset(seed: u64, stream: u64) -> f64 {
    Exp1.sample(&mut aux_rng(seed, stream))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaParams {
    pub config: RunConfig,
    pub observable: Observable,
    pub m: u32,
    pub reps: u64,
    /// Grid of `x` for the hypothesis `η(h(x)) ≤ e^{-1/x}`.
    pub x_grid: Vec<f64>,
    pub r: f64,
}

/// `η(m) = P(Q_{1-T} ≤ m)` with `T ~ Exp(1)` independent of the process.
///
/// The same sample is read at the thresholds `h(x)` of the grid; those rows
/// are recorded, not asserted, since the hypothesis is only claimed for large
/// `x`. The smallest grid point from which it holds on the rest of the grid is
/// reported as `crossover_x`.
pub fn estimate_eta(runner: &Runner, p: &EtaParams) -> Result<ExperimentReport> {
    check_reps(p.reps)?;
    p.config.validate()?;
    let thresholds = p
        .x_grid
        .iter()
        .map(|&x| reference_curve(p.observable.eta_curve(p.r), x))
        .collect::<Result<Vec<_>>>()?;
    let values = runner.map(0, p.reps, |i| {
        let t = 1.0 - offset(p.config.seed, i);
        match run_until(&p.config, t, i)? {
            None => Ok(0),
            Some(log) => observe(&log, t, p.observable),
        }
    })?;
    let at_most = |m: f64| values.iter().filter(|&&q| f64::from(q) <= m).count() as u64;

    let mut report = base_report("eta", &p.config)
        .param("observable", p.observable)
        .param("m", p.m)
        .param("reps", p.reps)
        .param("r", p.r);
    let floor = (-1f64).exp();
    let eta = proportion(at_most(f64::from(p.m)), p.reps);
    report.push(
        Estimate::new(format!("eta(m={})", p.m), eta)
            .with_oracle(floor)
            .judged(eta.hi >= floor),
    );
    let mut holds = Vec::with_capacity(p.x_grid.len());
    for (&x, &h) in p.x_grid.iter().zip(&thresholds) {
        let est = proportion(at_most(h), p.reps);
        let bound = (-1.0 / x).exp();
        let ok = est.point + Z * est.stderr <= bound;
        holds.push((x, ok));
        report.push(
            Estimate::new(format!("eta(h(x={x}))"), est)
                .with_oracle(bound)
                .noted(ok),
        );
    }
    holds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let from = holds.iter().rposition(|&(_, ok)| !ok).map_or(0, |i| i + 1);
    if from < holds.len() {
        report.push(Estimate::new("crossover_x", super::stats::Interval::exact(holds[from].0)));
    }
    report.replications_used = p.reps;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryParams {
    pub config: RunConfig,
    pub observable: Observable,
    pub t: f64,
    pub m: u32,
    pub n: u64,
    pub reps: u64,
}

/// One-sided check of `P(Q_t ≤ m, #∂*A_{t-1} ≥ n) ≤ η(m)^n`.
///
/// Both sides come from the same replications: `Q_t` and the boundary are
/// read from the run up to `t`, and `η(m)` from the same run at `1 − T`.
/// Verdict: `P̂ − Zσ ≤ (η̂ + Zσ_η)^n`.
pub fn check_boundary_inequality(runner: &Runner, p: &BoundaryParams) -> Result<ExperimentReport> {
    check_reps(p.reps)?;
    if !(p.t >= 1.0 && p.t.is_finite()) {
        return Err(Error::invalid("t must be at least 1"));
    }
    p.config.validate()?;
    let outcomes = runner.map(0, p.reps, |i| {
        let log = run_until(&p.config, p.t, i)?.expect("t >= 1");
        let q_t = observe(&log, p.t, p.observable)?;
        let boundary = snapshot(&log, p.t - 1.0)?.boundary_size;
        let s = 1.0 - offset(p.config.seed, i);
        let q_s = observe(&log, s, p.observable)?;
        Ok((q_t <= p.m && boundary >= p.n, q_s <= p.m))
    })?;
    let joint = proportion(outcomes.iter().filter(|o| o.0).count() as u64, p.reps);
    let eta = proportion(outcomes.iter().filter(|o| o.1).count() as u64, p.reps);
    let bound = (eta.point + Z * eta.stderr).min(1.0).powi(p.n.min(i32::MAX as u64) as i32);

    let mut report = base_report("boundary", &p.config)
        .param("observable", p.observable)
        .param("t", p.t)
        .param("m", p.m)
        .param("n", p.n)
        .param("reps", p.reps);
    report.push(
        Estimate::new(format!("P(Q<={},boundary>={})", p.m, p.n), joint)
            .with_oracle(bound)
            .judged(joint.point - Z * joint.stderr <= bound),
    );
    report.push(Estimate::new(format!("eta(m={})", p.m), eta));
    report.replications_used = p.reps;
    Ok(report)
}

/// `#∂*A_{θ_n}`, the external boundary once `n` vertices are occupied.
pub fn boundary_at_count(log: &EventLog, n: usize) -> u64 {
    let children: u64 = log.offspring[..n].iter().map(|&d| u64::from(d)).sum();
    children + 1 - n as u64
}

/// `J_n` of the exploration chain `J_0 = 1`,
/// `J_{k+1} = J_k + (D_{k+1} − 1)·1{J_k > 0}`, with `D_k` i.i.d. offspring
/// counts, together with whether the chain stayed positive before step `n`.
pub fn exploration_chain<R: Rng + ?Sized>(spec: &OffspringSpec, n: usize, rng: &mut R) -> (u64, bool) {
    let mut j = 1u64;
    for _ in 0..n {
        if j == 0 {
            return (0, false);
        }
        j = j + u64::from(spec.sample(rng)) - 1;
    }
    (j, true)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub config: RunConfig,
    pub n_grid: Vec<usize>,
    pub t_grid: Vec<f64>,
    pub reps: usize,
    pub policy: SurvivalPolicy,
    /// Step of the exploration-chain comparison; 0 disables it.
    pub ks_n: usize,
    pub ks_samples: usize,
}

struct GrowthRun {
    theta: Vec<f64>,
    boundary: Vec<u64>,
    occupied: Vec<usize>,
}

/// Growth statistics of surviving trees: `θ_n / log n` (target `1/α`),
/// `#∂*A_{θ_n} / n` (target `α`) and `log #A_t / (αt)` (target 1), plus a
/// two-sample KS comparison of `#∂*A_{θ_n}` with the exploration chain.
///
/// On the semi-line the targets become `θ_n / n → 1`, a boundary of 1 and
/// `#A_t / t → 1`.
pub fn growth_report(runner: &Runner, p: &GrowthParams) -> Result<ExperimentReport> {
    p.config.validate()?;
    p.policy.validate()?;
    let spec = &p.config.graph;
    let semi = spec.is_semi_line();
    if !semi && !spec.is_supercritical() {
        return Err(Error::invalid("growth statistics need a supercritical offspring law"));
    }
    if p.reps == 0 || p.n_grid.is_empty() && p.t_grid.is_empty() {
        return Err(Error::invalid("need reps >= 1 and a non-empty grid"));
    }
    if p.n_grid.contains(&0) || p.t_grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::invalid("grid points must be positive"));
    }
    let alpha = spec.alpha();
    let n_need = p.n_grid.iter().copied().max().unwrap_or(1).max(if p.policy.conditions() {
        p.policy.requirement
    } else {
        1
    });
    let t_need = p.t_grid.iter().copied().fold(0.0, f64::max);
    let max_attempts = p.reps as u64 * MAX_ATTEMPTS_PER_REP;

    let one = |i: u64| -> Result<Option<GrowthRun>> {
        let base = p.config.clone().with_stream(i);
        let nlog = run_replication(&base.clone().with_stop(StopRule::NMax(n_need)))?;
        if p.policy.conditions() && nlog.len() < n_need {
            return Ok(None);
        }
        let tlog = if nlog.horizon() >= t_need {
            None
        } else {
            Some(run_replication(&base.with_stop(StopRule::TMax(t_need)))?)
        };
        let tlog = tlog.as_ref().unwrap_or(&nlog);
        Ok(Some(GrowthRun {
            theta: p
                .n_grid
                .iter()
                .map(|&n| if n <= nlog.len() { nlog.tau[n - 1] } else { f64::INFINITY })
                .collect(),
            boundary: p
                .n_grid
                .iter()
                .map(|&n| if n <= nlog.len() { boundary_at_count(&nlog, n) } else { 0 })
                .collect(),
            occupied: p.t_grid.iter().map(|&t| tlog.occupied_count(t)).collect(),
        }))
    };
    let survivors = if p.policy.conditions() {
        runner.collect_surviving(p.reps, max_attempts, one)?
    } else {
        let kept = runner.map(0, p.reps as u64, |i| Ok(one(i)?.expect("unconditioned")))?;
        super::runner::Survivors {
            kept,
            attempted: p.reps as u64,
        }
    };
    let runs = &survivors.kept;

    let mut report = base_report("growth", &p.config)
        .param("reps", p.reps)
        .param("policy", p.policy)
        .param("n_grid", join(&p.n_grid))
        .param("t_grid", join(&p.t_grid));
    let column = |f: &dyn Fn(&GrowthRun) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
    for (k, &n) in p.n_grid.iter().enumerate() {
        let nf = n as f64;
        let (label, values, target) = if semi {
            (format!("median(theta_n/n)@n={n}"), column(&|r| r.theta[k] / nf), 1.0)
        } else {
            (format!("median(theta_n/log_n)@n={n}"), column(&|r| r.theta[k] / nf.ln()), 1.0 / alpha)
        };
        push_median(&mut report, label, &values, target);
        let (label, values, target) = if semi {
            (format!("median(boundary)@n={n}"), column(&|r| r.boundary[k] as f64), 1.0)
        } else {
            (format!("median(boundary/n)@n={n}"), column(&|r| r.boundary[k] as f64 / nf), alpha)
        };
        push_median(&mut report, label, &values, target);
    }
    for (k, &t) in p.t_grid.iter().enumerate() {
        if semi {
            let values = column(&|r| r.occupied[k] as f64 / t);
            push_median(&mut report, format!("median(A_t/t)@t={t}"), &values, 1.0);
        } else {
            let values = column(&|r| (r.occupied[k] as f64).ln() / (alpha * t));
            push_median(&mut report, format!("median(log_A_t/(alpha*t))@t={t}"), &values, 1.0);
        }
    }

    if p.ks_n > 0 && p.ks_samples > 0 {
        let attempts = p.ks_samples as u64 * MAX_ATTEMPTS_PER_REP;
        let simulated = runner.collect_surviving(p.ks_samples, attempts, |i| {
            let config = p.config.clone().with_stream(i).with_stop(StopRule::NMax(p.ks_n));
            let log = run_replication(&config)?;
            Ok((log.len() == p.ks_n).then(|| boundary_at_count(&log, p.ks_n) as f64))
        })?;
        let chain = runner.collect_surviving(p.ks_samples, attempts, |i| {
            let (j, alive) = exploration_chain(spec, p.ks_n, &mut aux_rng(p.config.seed, i));
            Ok(alive.then_some(j as f64))
        })?;
        let ks = ks_two_sample(&simulated.kept, &chain.kept);
        report = report.param("ks_n", p.ks_n).param("ks_samples", p.ks_samples);
        report.push(Estimate::new("ks_statistic", super::stats::Interval::exact(ks.statistic)));
        report.push(
            Estimate::new("ks_p_value", super::stats::Interval::exact(ks.p_value))
                .with_oracle(KS_LEVEL)
                .judged(ks.p_value >= KS_LEVEL),
        );
    }
    report.replications_used = runs.len() as u64;
    report.replications_discarded = survivors.discarded();
    Ok(report)
}

fn push_median(report: &mut ExperimentReport, label: String, values: &[f64], target: f64) {
    let est = Estimate::new(label, quantile(values, 0.5)).with_oracle(target);
    let ok = est.interval().contains(target);
    report.push(est.noted(ok));
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendParams {
    pub config: RunConfig,
    pub t_grid: Vec<f64>,
    pub reps: usize,
    pub policy: SurvivalPolicy,
    pub slack: f64,
    /// Lower quantile used as the finite-sample liminf proxy.
    pub level: f64,
}

/// Default lower quantile for trend checks.
pub const TREND_LEVEL: f64 = 0.01;

/// Lower quantiles of `H_t log t / t`, `M_t log log t / t` and
/// `H_t log log #A_t / log #A_t` over surviving runs, per grid time.
///
/// On a supercritical tree the last grid point is checked against
/// `α(1 − slack)` for the first two and `1 − slack` for the third. Ratios whose
/// iterated logarithm is not positive are taken as 0. On the semi-line nothing
/// is asserted: it is the contrast case where `H_t` keeps returning to 0.
pub fn liminf_trend(runner: &Runner, p: &TrendParams) -> Result<ExperimentReport> {
    p.config.validate()?;
    p.policy.validate()?;
    let spec = &p.config.graph;
    let semi = spec.is_semi_line();
    if !semi && !spec.is_supercritical() {
        return Err(Error::invalid("trend checks need a supercritical offspring law"));
    }
    if p.reps == 0 || p.t_grid.is_empty() {
        return Err(Error::invalid("need reps >= 1 and a non-empty time grid"));
    }
    if p.t_grid.windows(2).any(|w| w[0] >= w[1]) || p.t_grid[0] <= 0.0 {
        return Err(Error::invalid("time grid must be positive and increasing"));
    }
    if !(0.0..=1.0).contains(&p.slack) || !(0.0..1.0).contains(&p.level) {
        return Err(Error::invalid("slack must lie in [0, 1] and the level in [0, 1)"));
    }
    let t_max = *p.t_grid.last().expect("non-empty");
    let one = |i: u64| -> Result<Option<Vec<(u32, u32, usize)>>> {
        let log = run_until(&p.config, t_max, i)?.expect("positive horizon");
        if p.policy.conditions() && (log.extinct() || log.len() < p.policy.requirement) {
            return Ok(None);
        }
        p.t_grid
            .iter()
            .map(|&t| snapshot(&log, t).map(|s| (s.h, s.m_cluster, s.occupied)))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    };
    let survivors = if p.policy.conditions() {
        runner.collect_surviving(p.reps, p.reps as u64 * MAX_ATTEMPTS_PER_REP, one)?
    } else {
        let kept = runner.map(0, p.reps as u64, |i| Ok(one(i)?.expect("unconditioned")))?;
        super::runner::Survivors {
            kept,
            attempted: p.reps as u64,
        }
    };
    let runs = &survivors.kept;
    let alpha = spec.alpha();
    let level = p.level;

    let mut report = base_report("trend", &p.config)
        .param("reps", p.reps)
        .param("policy", p.policy)
        .param("slack", p.slack)
        .param("level", p.level)
        .param("t_grid", join(&p.t_grid));
    let positive = |x: f64| if x > 0.0 && x.is_finite() { x } else { f64::NAN };
    for (k, &t) in p.t_grid.iter().enumerate() {
        let last = k + 1 == p.t_grid.len();
        let q = |f: &dyn Fn(&(u32, u32, usize)) -> f64| {
            let values: Vec<f64> = runs.iter().map(|r| f(&r[k])).map(|v| if v.is_nan() { 0.0 } else { v }).collect();
            quantile(&values, level)
        };
        let tag = |name: &str| format!("q{level}({name})@t={t}");
        report.push(Estimate::new(tag("H"), q(&|r| f64::from(r.0))));
        report.push(Estimate::new(tag("M"), q(&|r| f64::from(r.1))));
        let log_t = positive(t.ln());
        let loglog_t = positive(t.ln().ln());
        let rows = [
            ("H*log(t)/t", q(&|r| f64::from(r.0) * log_t / t), alpha),
            ("M*loglog(t)/t", q(&|r| f64::from(r.1) * loglog_t / t), alpha),
            (
                "H*loglog(A)/log(A)",
                q(&|r| {
                    let a = r.2 as f64;
                    f64::from(r.0) * positive(a.ln().ln()) / positive(a.ln())
                }),
                1.0,
            ),
        ];
        for (name, est, target) in rows {
            let bound = target * (1.0 - p.slack);
            let row = Estimate::new(tag(name), est);
            report.push(if semi || !last {
                row
            } else {
                row.with_oracle(bound).judged(est.point > bound)
            });
        }
    }
    report.replications_used = runs.len() as u64;
    report.replications_discarded = survivors.discarded();
    Ok(report)
}
