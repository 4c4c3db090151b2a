//! Interval estimates and the two-sample Kolmogorov–Smirnov test.

use serde::{Deserialize, Serialize};

/// Half-width of every confidence band, in standard errors.
pub const Z: f64 = 3.0;

/// Successes and failures both needed before the normal band is trusted.
pub const NORMAL_MIN_COUNT: u64 = 30;

/// A point estimate with a standard error and a `[lo, hi]` band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub point: f64,
    pub stderr: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn exact(value: f64) -> Self {
        Self {
            point: value,
            stderr: 0.0,
            lo: value,
            hi: value,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Binomial proportion with a `Z`-sigma band: normal when there are at least
/// [`NORMAL_MIN_COUNT`] successes and failures, Wilson score otherwise.
pub fn proportion(successes: u64, trials: u64) -> Interval {
    assert!(trials > 0 && successes <= trials, "bad proportion {successes}/{trials}");
    let n = trials as f64;
    let p = successes as f64 / n;
    let stderr = (p * (1.0 - p) / n).sqrt();
    let failures = trials - successes;
    let (lo, hi) = if successes >= NORMAL_MIN_COUNT && failures >= NORMAL_MIN_COUNT {
        (p - Z * stderr, p + Z * stderr)
    } else {
        let z2 = Z * Z;
        let denom = 1.0 + z2 / n;
        let center = (p + z2 / (2.0 * n)) / denom;
        let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        (center - half, center + half)
    };
    Interval {
        point: p,
        stderr,
        lo: lo.max(0.0).min(p),
        hi: hi.min(1.0).max(p),
    }
}

/// Sample mean with a `Z`-sigma normal band.
pub fn mean(values: &[f64]) -> Interval {
    assert!(!values.is_empty(), "mean of an empty sample");
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let stderr = (var / n).sqrt();
    Interval {
        point: m,
        stderr,
        lo: m - Z * stderr,
        hi: m + Z * stderr,
    }
}

/// Empirical `q`-quantile (the `⌈qN⌉`-th order statistic) with a
/// distribution-free band from binomial order statistics. `stderr` is the
/// band width over `2Z`.
pub fn quantile(values: &[f64], q: f64) -> Interval {
    assert!(!values.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&q), "quantile level {q}");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, q)
}

pub fn quantile_sorted(sorted: &[f64], q: f64) -> Interval {
    let n = sorted.len();
    let nf = n as f64;
    let rank = |x: f64| (x.ceil() as usize).clamp(1, n) - 1;
    let spread = Z * (nf * q * (1.0 - q)).sqrt();
    let point = sorted[rank(nf * q)];
    let lo = sorted[rank((nf * q - spread).floor())];
    let hi = sorted[rank((nf * q + spread).ceil())];
    let stderr = if hi.is_finite() && lo.is_finite() {
        (hi - lo) / (2.0 * Z)
    } else {
        f64::INFINITY
    };
    Interval {
        point,
        stderr,
        lo,
        hi,
    }
}

/// Outcome of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    /// Asymptotic p-value; conservative for discrete samples.
    pub p_value: f64,
}

/// Two-sample KS test. Ties are handled by stepping both empirical CDFs past
/// each distinct value before comparing.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsOutcome {
    assert!(!a.is_empty() && !b.is_empty(), "KS test needs two non-empty samples");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    KsOutcome {
        statistic: d,
        p_value: kolmogorov_survival(lambda),
    }
}

/// `P(K > λ)` for the Kolmogorov distribution.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u32 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
