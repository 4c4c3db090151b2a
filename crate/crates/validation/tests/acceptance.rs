//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured runtime against its limit. Exits non-zero if any criterion fails.
//!
//! Oracles are computed here, independently of the code under test, except
//! where a criterion is stated in terms of a library verdict.

use std::time::{Duration, Instant};

use fpp_core::exact::{
    c_tilde, composition_sums, ctilde_margin, kappa_from_p, nu_n, pi_tail, pi_tail_gamma_form,
    DEFAULT_BISECTION_TOL,
};
use fpp_core::lab::{
    check_boundary_inequality, containment_check, estimate_complete_recovery, estimate_tail_law, growth_report,
    liminf_trend, percolation_cluster, wchain_transition_check, BoundaryParams, CompleteRecoveryParams,
    ContainmentParams, ExperimentReport, GrowthParams, Observable, PercolationParams, Runner, SurvivalPolicy,
    TailLawParams, TrendParams, Verdict, WChainParams,
};
use fpp_core::rng::stream_rng;
use fpp_core::sim::write_event_log_csv;
use fpp_core::{run_replication, snapshot, EventLog, OffspringSpec, RunConfig, StopRule};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

const SEED: u64 = 1;
/// Stderr multiplier of every "within k stderr" check.
const K_SIGMA: f64 = 3.0;

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, u64, fn(&Runner) -> Check);

fn fail_if<E: std::fmt::Display>(r: Result<ExperimentReport, E>) -> Result<ExperimentReport, String> {
    r.map_err(|e| e.to_string())
}

fn row<'a>(report: &'a ExperimentReport, label: &str) -> Result<&'a fpp_core::lab::Estimate, String> {
    report.estimate(label).ok_or_else(|| format!("report has no row {label:?}"))
}

fn factorial(m: u64) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Criterion 1: Tail-cluster law on the semi-line against `1/m!`.
fn tail_cluster_law(runner: &Runner) -> Check {
    let reps = 100_000;
    let report = fail_if(estimate_tail_law(runner, &TailLawParams { gamma: 1.0, n: 50, m_max: 5, reps, seed: SEED }))?;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for m in 1..=5u64 {
        let est = row(&report, &format!("P(tail>={m})"))?;
        let oracle = 1.0 / factorial(m);
        let se = (oracle * (1.0 - oracle) / reps as f64).sqrt();
        let dev = (est.point - oracle).abs();
        ok &= dev <= K_SIGMA * se;
        if se > 0.0 {
            worst = worst.max(dev / se);
        } else {
            ok &= dev == 0.0;
        }
    }
    Ok((ok, format!("max |P - 1/m!| = {worst:.2} stderr over m = 1..5")))
}

/// `S_ℓ(n)` by enumerating compositions, exactly.
fn s_ell_enumerated(l: usize, n: usize, gamma: &BigRational) -> BigRational {
    fn go(k: usize, l: usize, budget: usize, weight: &dyn Fn(usize) -> BigRational, acc: BigRational) -> BigRational {
        if k > l {
            return acc;
        }
        let mut total = BigRational::zero();
        let w = weight(k);
        let mut power = w.clone();
        // leave at least one unit for each remaining coordinate
        for xk in 1..=budget.saturating_sub(l - k) {
            total += go(k + 1, l, budget - xk, weight, acc.clone() * power.clone());
            power *= w.clone();
        }
        total
    }
    let weight = |k: usize| (BigRational::one() + gamma.clone() * ratio(k as i64, 1)).recip();
    go(1, l, n, &weight, BigRational::one())
}

/// Criterion 2: Product form vs Gamma form of `Π(m)`, and the composition-sum DP vs
/// enumeration in exact arithmetic.
fn exact_consistency(_: &Runner) -> Check {
    let tol = 1e-10;
    let mut worst: f64 = 0.0;
    for gamma in [0.1, 0.5, 1.0, 2.0, 10.0] {
        for m in 1..=1000 {
            let a = pi_tail(m, gamma).map_err(|e| e.to_string())?;
            let b = pi_tail_gamma_form(m, gamma).map_err(|e| e.to_string())?;
            // relative error of the values, read off the logs so that
            // underflowed values still compare
            worst = worst.max((a.log_value - b.log_value).exp_m1().abs());
        }
    }
    let mut mismatches = 0;
    for (num, den) in [(1, 1), (1, 2), (3, 1), (2, 7)] {
        let gamma = ratio(num, den);
        for n in 1..=8 {
            let dp: Vec<BigRational> = composition_sums(n, n, |k| {
                (BigRational::one() + gamma.clone() * ratio(k as i64, 1)).recip()
            });
            mismatches += (1..=n).filter(|&l| dp[l] != s_ell_enumerated(l, n, &gamma)).count();
        }
    }
    Ok((
        worst <= tol && mismatches == 0,
        format!("max relative gap {worst:.1e} (tol {tol:.0e}); {mismatches} DP/enumeration mismatches for n <= 8"),
    ))
}

/// Criterion 3: Complete-recovery probabilities.
fn complete_recovery(runner: &Runner) -> Check {
    let exact2 = nu_n(2, 1.0).map_err(|e| e.to_string())?.value;
    let mc2 = fail_if(estimate_complete_recovery(
        runner,
        &CompleteRecoveryParams { gamma: 1.0, n: 2, reps: 100_000, seed: SEED },
    ))?;
    let est2 = row(&mc2, "nu")?;
    let se2 = (5.0 / 12.0 * (7.0 / 12.0) / 100_000f64).sqrt();
    let ok2 = (exact2 - 5.0 / 12.0).abs() < 1e-14 && (est2.point - 5.0 / 12.0).abs() <= K_SIGMA * se2;

    let exact50 = nu_n(50, 1.0).map_err(|e| e.to_string())?.value;
    let mc50 = fail_if(estimate_complete_recovery(
        runner,
        &CompleteRecoveryParams { gamma: 1.0, n: 50, reps: 100_000, seed: SEED },
    ))?;
    let gap50 = (row(&mc50, "nu")?.point - exact50).abs();
    let gap200 = (nu_n(200, 1.0).map_err(|e| e.to_string())?.value - (-1f64).exp()).abs();
    Ok((
        ok2 && gap50 <= 0.02 && gap200 <= 1e-3,
        format!(
            "nu_2 MC {:.5} vs 5/12; |nu_50 - MC| = {gap50:.4} (tol 0.02); |nu_200 - 1/e| = {gap200:.1e} (tol 1e-3)",
            est2.point
        ),
    ))
}

/// Criterion 4: `θ_n / n` on the semi-line at `n = 10^4`.
fn semi_line_lln(_: &Runner) -> Check {
    let n = 10_000;
    let mut inside = 0;
    for stream in 0..100 {
        let cfg = RunConfig::new(OffspringSpec::semi_line(), 1.0, StopRule::NMax(n))
            .with_seed(SEED)
            .with_stream(stream);
        let log = run_replication(&cfg).map_err(|e| e.to_string())?;
        let theta = log.tau(n as u32 - 1);
        inside += u32::from((0.95..=1.05).contains(&(theta / n as f64)));
    }
    Ok((inside >= 99, format!("{inside}/100 runs with theta_n/n in [0.95, 1.05]")))
}

/// Criterion 5: Up-move frequencies of the jump chain against `1/(1 + γw)`.
fn jump_chain_law(runner: &Runner) -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for gamma in [0.5, 1.0] {
        let report = fail_if(wchain_transition_check(
            runner,
            &WChainParams { gamma, length: 10_000, reps: 200, seed: SEED, min_obs: 1000 },
        ))?;
        let checked: Vec<_> = report.estimates.iter().filter(|e| e.binding).collect();
        let mut worst: f64 = 0.0;
        for est in &checked {
            let w: f64 = est.label.trim_start_matches("up(w=").trim_end_matches(')').parse().map_err(|_| est.label.clone())?;
            let oracle = 1.0 / (1.0 + gamma * w);
            // from w = 0 the next jump is surely up: no spread at all
            let dev = if est.stderr > 0.0 {
                (est.point - oracle).abs() / est.stderr
            } else if est.point == oracle {
                0.0
            } else {
                f64::INFINITY
            };
            ok &= dev <= K_SIGMA;
            worst = worst.max(dev);
        }
        ok &= !checked.is_empty();
        notes.push(format!("gamma {gamma}: {} states, max dev {worst:.2} stderr", checked.len()));
    }
    Ok((ok, notes.join("; ")))
}

/// Criterion 6: Boundary and volume growth of `bin:2:0.8` trees.
fn gw_growth(runner: &Runner) -> Check {
    let config = RunConfig::new("bin:2:0.8".parse().unwrap(), 1.0, StopRule::NMax(1)).with_seed(SEED);
    let report = fail_if(growth_report(
        runner,
        &GrowthParams {
            config,
            n_grid: vec![10_000],
            t_grid: vec![15.0],
            reps: 200,
            policy: SurvivalPolicy::condition_on_survival(10_000),
            ks_n: 30,
            ks_samples: 10_000,
        },
    ))?;
    let p_value = row(&report, "ks_p_value")?.point;
    let boundary = row(&report, "median(boundary/n)@n=10000")?.point;
    let volume = row(&report, "median(log_A_t/(alpha*t))@t=15")?.point;
    let ok = p_value >= 0.001 && (0.55..=0.65).contains(&boundary) && (0.9..=1.1).contains(&volume);
    Ok((
        ok,
        format!(
            "KS p = {p_value:.3} (>= 0.001); median boundary/n = {boundary:.4} in [0.55, 0.65]; \
             median log#A_15/(0.6*15) = {volume:.4} in [0.9, 1.1]; {} surviving of {} runs",
            report.replications_used,
            report.replications_used + report.replications_discarded
        ),
    ))
}

/// Criterion 7: One-sided boundary inequality.
fn boundary_inequality(runner: &Runner) -> Check {
    let config = RunConfig::new(OffspringSpec::deterministic(2), 1.0, StopRule::TMax(3.0)).with_seed(SEED);
    let report = fail_if(check_boundary_inequality(
        runner,
        &BoundaryParams { config, observable: Observable::H, t: 3.0, m: 2, n: 4, reps: 100_000 },
    ))?;
    let joint = row(&report, "P(Q<=2,boundary>=4)")?;
    let eta = row(&report, "eta(m=2)")?;
    let bound = (eta.point + K_SIGMA * eta.stderr).min(1.0).powi(4);
    let ok = joint.point - K_SIGMA * joint.stderr <= bound;
    Ok((ok, format!("P = {:.4} +- {:.4}, bound (eta + 3 se)^4 = {bound:.4}", joint.point, joint.stderr)))
}

/// Criterion 8: Containment of `A_n` in the ball of radius `c̃ n`.
fn containment(runner: &Runner) -> Check {
    let c = c_tilde(2.0, DEFAULT_BISECTION_TOL).map_err(|e| e.to_string())?;
    let bracket = ctilde_margin(c, 2.0) >= 0.0 && ctilde_margin(c - 1e-6, 2.0) < 0.0;
    let config = RunConfig::new(OffspringSpec::deterministic(2), 1.0, StopRule::TMax(12.0)).with_seed(SEED);
    let report = fail_if(containment_check(runner, &ContainmentParams { config, c: Some(c), reps: 10_000 }))?;
    let violations = row(&report, "violations@n=12")?.point;
    Ok((
        bracket && violations == 0.0,
        format!(
            "c~ = {c:.6} (g(c~) >= 0: {bracket}); violation rate at n = 12: {violations} \
             ({} of 10000 runs; 0 required)",
            (violations * 10_000.0).round()
        ),
    ))
}

/// Criterion 9: Largest subcritical percolation cluster on the binary tree.
fn percolation(_: &Runner) -> Check {
    let kappa = kappa_from_p(0.1, 2);
    let target = 1.0 / (1.0 / kappa).log2();
    let report = fail_if(percolation_cluster(&PercolationParams {
        delta: 2,
        p: 0.1,
        depth: 200,
        reps: 1000,
        seed: SEED,
        band: 0.15,
    }))?;
    let median = row(&report, "median(K/depth)")?.point;
    let ok = (kappa - 0.36).abs() < 1e-12 && (target - 0.678).abs() < 1e-3 && (median - target).abs() <= 0.15;
    Ok((ok, format!("kappa = {kappa:.4}; median K/depth = {median:.4} vs {target:.4} (band 0.15)")))
}

fn brute_red(log: &EventLog, t: f64) -> Vec<bool> {
    (0..log.len() as u32)
        .map(|v| log.tau(v) <= t && t < log.tau(v) + log.recovery_duration(v))
        .collect()
}

/// `(H, M)` by following red parent links from every red vertex.
fn brute_h_m(log: &EventLog, red: &[bool]) -> (u32, u32) {
    let mut h = 0;
    let mut top_counts = vec![0u32; red.len()];
    for v in (0..red.len()).filter(|&v| red[v]) {
        let mut len = 1;
        let mut top = v as u32;
        while let Some(p) = log.parent(top).filter(|&p| red[p as usize]) {
            len += 1;
            top = p;
        }
        h = h.max(len);
        top_counts[top as usize] += 1;
    }
    (h, top_counts.into_iter().max().unwrap_or(0))
}

fn report_bytes(r: &ExperimentReport) -> Vec<u8> {
    let mut out = Vec::new();
    r.write_csv(&mut out).expect("in-memory write");
    out.extend_from_slice(r.to_json().as_bytes());
    out
}

/// Criterion 10: Snapshot invariants, brute-force red observables, reproducibility.
fn property_suite(_: &Runner) -> Check {
    let specs = ["semiline", "det:2", "det:3", "bin:2:0.8", "bin:3:0.5", "pois:1.5", "geom:0.4", "pmf:0.3,0.2,0.5"];
    let mut rng = stream_rng(SEED, 10);
    let (mut snapshots, mut small_logs, mut violations) = (0u32, 0u32, Vec::new());
    while snapshots < 10_000 {
        let spec: OffspringSpec = specs[rng.random_range(0..specs.len())].parse().unwrap();
        let gamma = rng.random_range(0.05..5.0);
        let small = rng.random_bool(0.5);
        let n_max = if small { rng.random_range(1..=12) } else { rng.random_range(13..400) };
        let seed = rng.random::<u64>();
        let cfg = RunConfig::new(spec.clone(), gamma, StopRule::NMax(n_max)).with_seed(seed);
        let log = run_replication(&cfg).map_err(|e| e.to_string())?;
        small_logs += u32::from(log.len() <= 12);
        for _ in 0..10 {
            let t = rng.random_range(0.0..=1.0) * log.horizon();
            let s = snapshot(&log, t).map_err(|e| e.to_string())?;
            snapshots += 1;
            let mut ok = s.h <= s.m_cluster && s.m_cluster as usize <= s.red_count() && s.red_count() <= s.occupied;
            if spec.is_semi_line() {
                ok &= s.h == s.m_cluster && s.boundary_size == 1;
            }
            if log.len() <= 12 {
                ok &= (s.h, s.m_cluster) == brute_h_m(&log, &brute_red(&log, t));
            }
            if !ok {
                violations.push(format!("{spec} gamma {gamma} seed {seed} t {t}"));
            }
        }
    }

    let serial = Runner::new(1).map_err(|e| e.to_string())?;
    let pool = Runner::new(4).map_err(|e| e.to_string())?;
    let mut identical = 0;
    for k in 0..20u64 {
        let spec: OffspringSpec = specs[k as usize % specs.len()].parse().unwrap();
        let seed = 1000 + k;
        let mut log_bytes = Vec::new();
        for _ in 0..2 {
            let cfg = RunConfig::new(spec.clone(), 0.7, StopRule::NMax(300)).with_seed(seed);
            let mut buf = Vec::new();
            write_event_log_csv(&run_replication(&cfg).map_err(|e| e.to_string())?, &mut buf).unwrap();
            log_bytes.push(buf);
        }
        let reports = [&serial, &pool].map(|runner| -> Result<Vec<u8>, String> {
            let r = if spec.is_semi_line() {
                estimate_tail_law(runner, &TailLawParams { gamma: 0.7, n: 20, m_max: 4, reps: 400, seed })
            } else {
                let config = RunConfig::new(spec.clone(), 0.7, StopRule::TMax(2.0)).with_seed(seed);
                check_boundary_inequality(
                    runner,
                    &BoundaryParams { config, observable: Observable::M, t: 2.0, m: 2, n: 2, reps: 400 },
                )
            };
            Ok(report_bytes(&r.map_err(|e| e.to_string())?))
        });
        let [a, b] = reports;
        identical += u32::from(log_bytes[0] == log_bytes[1] && a? == b?);
    }
    let ok = violations.is_empty() && identical == 20 && small_logs > 0;
    let mut detail = format!(
        "{snapshots} snapshots, {small_logs} logs with <= 12 vertices checked by brute force, \
         {} violations; {identical}/20 byte-identical reruns (jobs 1 vs 4)",
        violations.len()
    );
    if let Some(first) = violations.first() {
        detail.push_str(&format!("; first violation: {first}"));
    }
    Ok((ok, detail))
}

/// Criterion 11: Semi-line `H_t` returns to 0; on `det:2` it grows like `α t / log t`.
fn trend_contrast(runner: &Runner) -> Check {
    let policy = SurvivalPolicy::condition_on_survival(1);
    let semi = fail_if(liminf_trend(
        runner,
        &TrendParams {
            config: RunConfig::new(OffspringSpec::semi_line(), 1.0, StopRule::NMax(1)).with_seed(SEED),
            t_grid: vec![200.0],
            reps: 500,
            policy: SurvivalPolicy::unconditioned(),
            slack: 0.5,
            level: 0.01,
        },
    ))?;
    let tree = fail_if(liminf_trend(
        runner,
        &TrendParams {
            config: RunConfig::new(OffspringSpec::deterministic(2), 1.0, StopRule::NMax(1)).with_seed(SEED),
            t_grid: vec![12.0],
            reps: 500,
            policy,
            slack: 0.5,
            level: 0.01,
        },
    ))?;
    let semi_q = row(&semi, "q0.01(H)@t=200")?.point;
    let tree_q = row(&tree, "q0.01(H*log(t)/t)@t=12")?;
    let threshold = 0.5 * (2.0 - 1.0);
    let ok = semi_q == 0.0 && tree_q.point > threshold && tree_q.verdict == Some(Verdict::Pass);
    Ok((
        ok,
        format!(
            "semi-line q01(H_200) = {semi_q}; det:2 q01(H_12 log 12/12) = {:.4} > {threshold} over {} runs",
            tree_q.point, tree.replications_used
        ),
    ))
}

fn main() {
    let runner = Runner::new(Runner::default_jobs()).expect("at least one worker");
    let criteria: [Criterion; 11] = [
        ("tail-cluster law", 120, tail_cluster_law),
        ("exact/oracle consistency", 30, exact_consistency),
        ("complete recovery", 120, complete_recovery),
        ("semi-line LLN", 60, semi_line_lln),
        ("jump-chain law", 120, jump_chain_law),
        ("GW growth", 300, gw_growth),
        ("boundary inequality", 180, boundary_inequality),
        ("containment", 180, containment),
        ("subcritical percolation", 120, percolation),
        ("property suite", 120, property_suite),
        ("trend contrast", 300, trend_contrast),
    ];
    // optional criterion numbers: `cargo test -p fpp-validation --test acceptance -- 5 8`
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    println!("acceptance suite ({} worker threads, seed {SEED})", runner.jobs());
    let (mut ran, mut failed) = (0, 0);
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = check(&runner);
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*limit);
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += u32::from(!ok);
        println!(
            "criterion {:>2} {} {name}: {detail} [{:.1} s, limit {limit} s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
