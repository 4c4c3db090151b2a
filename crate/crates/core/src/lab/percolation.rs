//! Largest open cluster of Bernoulli site percolation on a truncated tree.
//!
//! The tree is Δ-ary: every vertex has Δ children, so the first `d` levels
//! hold about Δ^d vertices and the cluster constant is `1/log_Δ(1/κ)`. A
//! cluster touches the truncated tree if it meets one of the levels
//! `0..=depth`; open vertices on the last level keep growing below it as a
//! subcritical Galton–Watson tree with `Bin(Δ, p)` offspring.
//!
//! At depth 200 the tree has 2^200 vertices, so `K` is not simulated
//! vertex by vertex. Its distribution function is computed exactly by a
//! recursion over levels and each replication draws `K` by inversion from
//! its own stream. [`sample_cluster_direct`] simulates the tree itself and
//! is used to validate the recursion at small depths.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use super::report::{Estimate, ExperimentReport};
use super::stats::{mean, proportion, quantile};
use crate::error::{Error, Result};
use crate::exact::kappa_from_p;
use crate::rng::stream_rng;

fn check_subcritical(delta: u32, p: f64) -> Result<()> {
    if delta < 2 {
        return Err(Error::invalid(format!("delta must be at least 2, got {delta}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p must lie in [0, 1], got {p}")));
    }
    let mean = p * f64::from(delta);
    if mean >= 1.0 {
        return Err(Error::Supercritical {
            kappa: kappa_from_p(p, delta),
            mean,
        });
    }
    Ok(())
}

/// Exact law of the largest cluster size `K`.
#[derive(Debug, Clone)]
pub struct ClusterLaw {
    delta: u32,
    p: f64,
    depth: u32,
    /// `P(R = k)` at the last level, `R` being the size of the cluster of a
    /// last-level vertex (0 when it is closed).
    leaf: Vec<f64>,
    tails: BTreeMap<u64, f64>,
}

impl ClusterLaw {
    pub fn new(delta: u32, p: f64, depth: u32) -> Result<Self> {
        check_subcritical(delta, p)?;
        Ok(Self {
            delta,
            p,
            depth,
            leaf: vec![1.0 - p],
            tails: BTreeMap::new(),
        })
    }

    /// `P(R = k)` at the last level: closed with probability `1 − p`, else the
    /// total progeny `T` of a `Bin(Δ, p)` tree, with
    /// `P(T = k) = C(kΔ, k−1) p^{k−1} (1−p)^{kΔ−k+1} / k`.
    fn leaf_mass(&mut self, k: usize) -> f64 {
        let d = f64::from(self.delta);
        while self.leaf.len() <= k {
            let k = self.leaf.len() as f64;
            let value = if self.p == 0.0 {
                0.0
            } else {
                let log = ln_binomial((k * d) as u64, (k - 1.0) as u64)
                    + (k - 1.0) * self.p.ln()
                    + (k * d - k + 1.0) * (-self.p).ln_1p()
                    - k.ln();
                self.p * log.exp()
            };
            self.leaf.push(value);
        }
        self.leaf[k]
    }

    /// `P(K > x)`, memoized.
    ///
    /// For a vertex `h` levels above the last one let `R` be its cluster size
    /// inside its subtree and `L` the largest cluster of its subtree not
    /// containing it. The recursion carries `G_h(k) = P(R = k, L ≤ x)` for
    /// `k ≤ x` and the tail `S_h = P(max(R, L) > x)`:
    ///
    /// - `G_h(0) = (1−p) F^Δ` with `F = 1 − S_{h−1}`,
    /// - `G_h(k) = p C(k−1)` for `1 ≤ k ≤ x`, `C` the Δ-fold convolution of
    ///   `G_{h−1}`,
    /// - `S_h = (1 − F^Δ) + p Σ_{k ≥ x} C(k)`.
    ///
    /// Only sums of positive terms appear, so tails far below machine epsilon
    /// keep their relative accuracy; the convolution lumps every total
    /// `≥ x` into one overflow cell.
    pub fn tail(&mut self, x: u64) -> f64 {
        if let Some(&v) = self.tails.get(&x) {
            return v;
        }
        let xs = x as usize;
        let (p, delta) = (self.p, self.delta);
        let mut g: Vec<f64> = (0..=xs).map(|k| self.leaf_mass(k)).collect();
        let mut s = leaf_tail(self, xs);
        let mut conv = vec![0.0; xs + 1];
        let mut next = vec![0.0; xs + 1];
        for _ in 0..self.depth {
            // conv[k] for k < x is exact; conv[x] collects every total >= x
            conv.copy_from_slice(&g);
            for _ in 1..delta {
                next.iter_mut().for_each(|c| *c = 0.0);
                for (i, &a) in conv.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    if i == xs {
                        next[xs] += a * g.iter().sum::<f64>();
                        continue;
                    }
                    for (j, &b) in g.iter().enumerate() {
                        next[(i + j).min(xs)] += a * b;
                    }
                }
                conv.copy_from_slice(&next);
            }
            let none_bad = f64::from(delta) * (-s).ln_1p();
            let some_bad = -none_bad.exp_m1();
            s = some_bad + p * conv[xs];
            next[0] = (1.0 - p) * none_bad.exp();
            for k in 1..=xs {
                next[k] = p * conv[k - 1];
            }
            std::mem::swap(&mut g, &mut next);
        }
        let s = s.clamp(0.0, 1.0);
        self.tails.insert(x, s);
        s
    }

    /// `P(K ≤ x)`.
    pub fn cdf(&mut self, x: u64) -> f64 {
        1.0 - self.tail(x)
    }

    /// Smallest `x` with `P(K > x) ≤ v`, i.e. the draw of `K` by inversion
    /// from `v ∈ (0, 1]` uniform.
    pub fn draw(&mut self, v: f64) -> u64 {
        if self.tail(0) <= v {
            return 0;
        }
        let mut hi = 1u64;
        while self.tail(hi) > v {
            hi *= 2;
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail(mid) <= v {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// `P(R > x)` at the last level, summed upwards from `x + 1` until the terms
/// stop mattering.
fn leaf_tail(law: &mut ClusterLaw, x: usize) -> f64 {
    let mut sum = 0.0;
    let mut k = x + 1;
    loop {
        let term = law.leaf_mass(k);
        sum += term;
        if term <= sum * 1e-18 || term == 0.0 {
            return sum;
        }
        k += 1;
    }
}

/// Simulates the percolation configuration and returns `K`.
///
/// Cost is `Δ^{depth+1}`; meant for validation at small depths.
pub fn sample_cluster_direct<R: Rng + ?Sized>(delta: u32, p: f64, depth: u32, rng: &mut R) -> Result<u64> {
    check_subcritical(delta, p)?;
    Ok(subtree(delta, p, depth, rng).1)
}

/// `(R, largest cluster)` for a subtree whose root is `h` levels above the
/// last one.
fn subtree<R: Rng + ?Sized>(delta: u32, p: f64, h: u32, rng: &mut R) -> (u64, u64) {
    let open = rng.random::<f64>() < p;
    if h == 0 {
        let r = if open { progeny_below(delta, p, rng) } else { 0 };
        return (r, r);
    }
    let mut r = u64::from(open);
    let mut largest = 0;
    for _ in 0..delta {
        let (child_r, child_max) = subtree(delta, p, h - 1, rng);
        largest = largest.max(child_max);
        if open {
            r += child_r;
        }
    }
    (r, largest.max(r))
}

/// Size of the open cluster of an open last-level vertex, counting the part
/// below the truncation.
fn progeny_below<R: Rng + ?Sized>(delta: u32, p: f64, rng: &mut R) -> u64 {
    let mut size = 1u64;
    let mut pending = 1u64;
    while pending > 0 {
        pending -= 1;
        for _ in 0..delta {
            if rng.random::<f64>() < p {
                size += 1;
                pending += 1;
            }
        }
    }
    size
}

/// Tolerance on `|median(K/depth) − 1/log_Δ(1/κ)|`.
pub const PERCOLATION_BAND: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationParams {
    pub delta: u32,
    pub p: f64,
    pub depth: u32,
    pub reps: u64,
    pub seed: u64,
    pub band: f64,
}

/// `K / depth` against `1 / log_Δ(1/κ)`.
pub fn percolation_cluster(p: &PercolationParams) -> Result<ExperimentReport> {
    if p.reps == 0 || p.depth == 0 {
        return Err(Error::invalid("reps and depth must be at least 1"));
    }
    let mut law = ClusterLaw::new(p.delta, p.p, p.depth)?;
    let kappa = kappa_from_p(p.p, p.delta);
    let target = if kappa == 0.0 {
        0.0
    } else {
        f64::from(p.delta).ln() / -kappa.ln()
    };
    let sizes: Vec<u64> = (0..p.reps)
        .map(|i| law.draw(1.0 - stream_rng(p.seed, i).random::<f64>()))
        .collect();
    let ratios: Vec<f64> = sizes.iter().map(|&k| k as f64 / f64::from(p.depth)).collect();

    let mut report = ExperimentReport::new("percolation")
        .param("delta", p.delta)
        .param("p", p.p)
        .param("kappa", kappa)
        .param("depth", p.depth)
        .param("reps", p.reps)
        .param("seed", p.seed)
        .param("band", p.band);
    let median = quantile(&ratios, 0.5);
    report.push(
        Estimate::new("median(K/depth)", median)
            .with_oracle(target)
            .judged((median.point - target).abs() <= p.band),
    );
    report.push(Estimate::new("mean(K)", mean(&sizes.iter().map(|&k| k as f64).collect::<Vec<_>>())));
    report.push(Estimate::new("P(K=0)", proportion(sizes.iter().filter(|&&k| k == 0).count() as u64, p.reps)));
    report.replications_used = p.reps;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_tree_has_no_cluster() {
        let mut law = ClusterLaw::new(2, 0.0, 50).unwrap();
        assert_eq!(law.cdf(0), 1.0);
        assert_eq!(law.draw(1e-9), 0);
    }

    #[test]
    fn single_level_by_hand() {
        // depth 0: K = R of the root, which is 0 or a Bin(2,p) progeny
        let p = 0.2;
        let mut law = ClusterLaw::new(2, p, 0).unwrap();
        assert!((law.cdf(0) - 0.8).abs() < 1e-15);
        // T = 1 needs both children closed
        assert!((law.cdf(1) - (0.8 + p * 0.64)).abs() < 1e-15);
        // depth 1, x = 0: everything closed
        let mut law = ClusterLaw::new(2, p, 1).unwrap();
        assert!((law.cdf(0) - 0.8f64.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn tails_keep_relative_accuracy() {
        let mut shallow = ClusterLaw::new(2, 0.1, 0).unwrap();
        let t = shallow.tail(40);
        assert!(t > 0.0 && t < 1e-16);
        // a closed root over two last-level vertices already gives 2(1-p)t
        let mut law = ClusterLaw::new(2, 0.1, 1).unwrap();
        let ratio = law.tail(40) / t;
        assert!(ratio > 1.8 && ratio < 10.0, "{ratio}");
    }

    #[test]
    fn leaf_law_sums_to_one() {
        let mut law = ClusterLaw::new(3, 0.2, 1).unwrap();
        let total: f64 = (0..400).map(|k| law.leaf_mass(k)).sum();
        assert!((total - 1.0).abs() < 1e-12, "{total}");
    }

    #[test]
    fn supercritical_parameters_are_refused() {
        assert!(matches!(ClusterLaw::new(2, 0.5, 3), Err(Error::Supercritical { .. })));
        assert!(matches!(ClusterLaw::new(3, 0.4, 3), Err(Error::Supercritical { .. })));
        assert!(ClusterLaw::new(1, 0.1, 3).is_err());
    }
}
