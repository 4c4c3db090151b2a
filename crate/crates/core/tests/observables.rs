use std::collections::HashMap;

use fpp_core::sim::{jump_chain, tail_cluster_size};
use fpp_core::{run_replication, snapshot, EventLog, OffspringSpec, RunConfig, StopRule};
use proptest::prelude::*;

fn red_at(log: &EventLog, t: f64) -> Vec<bool> {
    (0..log.len() as u32)
        .map(|v| log.tau(v) <= t && t < log.tau(v) + log.recovery_duration(v))
        .collect()
}

/// Longest chain by walking from every red vertex up through red ancestors.
fn brute_h(log: &EventLog, red: &[bool]) -> u32 {
    let mut best = 0;
    for v in 0..red.len() {
        if !red[v] {
            continue;
        }
        let mut len = 1;
        let mut cur = v as u32;
        while let Some(p) = log.parent(cur) {
            if !red[p as usize] {
                break;
            }
            len += 1;
            cur = p;
        }
        best = best.max(len);
    }
    best
}

/// Largest component by grouping red vertices under their topmost red ancestor.
fn brute_m(log: &EventLog, red: &[bool]) -> u32 {
    let mut sizes: HashMap<u32, u32> = HashMap::new();
    for v in 0..red.len() {
        if !red[v] {
            continue;
        }
        let mut top = v as u32;
        while let Some(p) = log.parent(top) {
            if !red[p as usize] {
                break;
            }
            top = p;
        }
        *sizes.entry(top).or_default() += 1;
    }
    sizes.values().copied().max().unwrap_or(0)
}

#[test]
fn red_observables_match_brute_force_on_small_trees() {
    let mut checked = 0;
    for (g, graph) in ["det:3", "bin:3:0.6", "pois:2", "semiline"].iter().enumerate() {
        for seed in 0..200u64 {
            let spec: OffspringSpec = graph.parse().unwrap();
            let gamma = [0.3, 1.0, 3.0][seed as usize % 3];
            let cfg = RunConfig::new(spec, gamma, StopRule::NMax(12)).with_seed(seed).with_stream(g as u64);
            let log = run_replication(&cfg).unwrap();
            assert!(log.len() <= 12);
            let horizon = log.horizon();
            for k in 0..=8 {
                let t = horizon * f64::from(k) / 8.0;
                let snap = snapshot(&log, t).unwrap();
                let red = red_at(&log, t);
                assert_eq!(snap.red_count(), red.iter().filter(|&&r| r).count());
                assert_eq!(snap.h, brute_h(&log, &red), "{graph} seed {seed} t {t}");
                assert_eq!(snap.m_cluster, brute_m(&log, &red), "{graph} seed {seed} t {t}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 4 * 200 * 9);
}

#[test]
fn tail_cluster_is_the_red_run_behind_the_front() {
    for seed in 0..300u64 {
        let cfg = RunConfig::new(OffspringSpec::semi_line(), 0.5, StopRule::NMax(15)).with_seed(seed);
        let log = run_replication(&cfg).unwrap();
        for n in 1..=15usize {
            let t = log.tau(n as u32 - 1);
            let red = red_at(&log, t);
            let brute = (0..n).rev().take_while(|&v| red[v]).count();
            assert_eq!(tail_cluster_size(&log, n).unwrap(), brute, "seed {seed} n {n}");
        }
    }
}

#[test]
fn jump_chain_states_are_red_counts() {
    for seed in 0..20 {
        let cfg = RunConfig::new(OffspringSpec::semi_line(), 1.0, StopRule::NMax(60)).with_seed(seed);
        let log = run_replication(&cfg).unwrap();
        let chain = jump_chain(&log);
        assert_eq!(chain[0].w, 1);
        assert!(chain.windows(2).all(|w| w[0].sigma < w[1].sigma));
        assert!(chain.windows(2).all(|w| w[0].w.abs_diff(w[1].w) == 1));
        for p in &chain {
            assert_eq!(snapshot(&log, p.sigma).unwrap().red_count() as u64, p.w);
        }
    }
}

fn graphs() -> impl Strategy<Value = OffspringSpec> {
    prop_oneof![
        Just(OffspringSpec::semi_line()),
        (1u32..4).prop_map(OffspringSpec::deterministic),
        (1u32..5, 0.1f64..0.9).prop_map(|(n, p)| OffspringSpec::binomial(n, p).unwrap()),
        (0.2f64..3.0).prop_map(|l| OffspringSpec::poisson(l).unwrap()),
        (0.2f64..0.9).prop_map(|p| OffspringSpec::geometric(p).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_and_snapshot_invariants(
        spec in graphs(),
        gamma in 0.05f64..5.0,
        n_max in 1usize..150,
        seed in any::<u64>(),
        fractions in prop::collection::vec(0.0f64..=1.0, 1..6),
    ) {
        let cfg = RunConfig::new(spec, gamma, StopRule::NMax(n_max)).with_seed(seed);
        let log = run_replication(&cfg).unwrap();
        prop_assert!(log.len() <= n_max);
        prop_assert!(log.len() == n_max || log.extinct());
        prop_assert_eq!(log.tau(0), 0.0);
        for v in 1..log.len() as u32 {
            prop_assert!(log.tau(v - 1) < log.tau(v));
            let p = log.parent(v).unwrap();
            prop_assert!(p < v);
            prop_assert!(log.tau(p) < log.tau(v));
            prop_assert_eq!(log.depth(v), log.depth(p) + 1);
        }
        prop_assert!((0..log.len() as u32).all(|v| log.recovery_duration(v) > 0.0));

        let mut times: Vec<f64> = fractions.iter().map(|f| f * log.horizon()).collect();
        times.sort_by(f64::total_cmp);
        let mut last_occupied = 0;
        for t in times {
            let s = snapshot(&log, t).unwrap();
            prop_assert!(s.occupied >= last_occupied);
            last_occupied = s.occupied;
            prop_assert!(s.h <= s.m_cluster);
            prop_assert!(s.m_cluster as usize <= s.red_count());
            prop_assert!(s.red_count() <= s.occupied);
            let children: u64 = (0..s.occupied as u32).map(|v| u64::from(log.offspring(v))).sum();
            prop_assert_eq!(s.boundary_size, children + 1 - s.occupied as u64);
            if spec_is_semi_line(&log) && s.occupied > 0 {
                prop_assert_eq!(s.boundary_size, 1);
            }
        }
    }
}

fn spec_is_semi_line(log: &EventLog) -> bool {
    log.graph().is_semi_line()
}
