use serde::{Deserialize, Serialize};

use super::check_gamma;
use crate::error::{Error, Result};

/// Absolute bisection tolerance used by the CLI for [`c_tilde`] and [`gamma_c`].
pub const DEFAULT_BISECTION_TOL: f64 = 1e-9;

/// `g(c) = 1 + c log c − c(1 + log m)`; the containment constant needs `g > 0`.
pub fn ctilde_margin(c: f64, mean: f64) -> f64 {
    1.0 + c * c.ln() - c * (1.0 + mean.ln())
}

/// Root of [`ctilde_margin`] on `(mean, ∞)`, bracketed from above.
///
/// `g(mean) = 1 − mean < 0` and `g′(c) = log(c/mean) > 0` beyond `mean`, so the
/// root is unique. The upper end of the final bracket is returned, hence
/// `g(c̃) ≥ 0` and `g(c̃ − tol) < 0`.
pub fn c_tilde(mean: f64, tol: f64) -> Result<f64> {
    if !(mean > 1.0 && mean.is_finite()) {
        return Err(Error::invalid(format!("c_tilde needs a mean above 1, got {mean}")));
    }
    check_tol(tol)?;
    let g = |c: f64| ctilde_margin(c, mean);
    let mut lo = mean;
    let mut hi = 2.0 * mean;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    Ok(bisect(lo, hi, tol, |c| g(c) >= 0.0))
}

/// Smallest `x` in `(lo, hi]`, to within `tol`, at which the monotone predicate
/// holds, given that it fails at `lo` and holds at `hi`.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, holds: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("tolerance must be positive, got {tol}")))
    }
}

fn check_delta(delta: u32) -> Result<()> {
    if delta >= 2 {
        Ok(())
    } else {
        Err(Error::invalid(format!("delta must be at least 2, got {delta}")))
    }
}

/// Site-percolation constants of the coupling with a recovery rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationConstants {
    pub p: f64,
    pub kappa: f64,
}

impl PercolationConstants {
    /// `1 / log_Δ(1/κ)`, the growth constant of the largest open cluster.
    pub fn cluster_constant(&self, delta: u32) -> f64 {
        (delta as f64).ln() / -self.kappa.ln()
    }
}

/// `κ = p (1−p)^{Δ−1} Δ^Δ / (Δ−1)^{Δ−1}`, evaluated in log space.
///
/// `κ` peaks at 1 when `p = 1/Δ`.
pub fn kappa_from_p(p: f64, delta: u32) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    let d = delta as f64;
    let log = p.ln() + (d - 1.0) * (-p).ln_1p() + d * d.ln() - (d - 1.0) * (d - 1.0).ln();
    log.exp()
}

/// `p = Δ/(γ+Δ)` and the matching `κ`.
pub fn percolation_constants(gamma: f64, delta: u32) -> Result<PercolationConstants> {
    check_gamma(gamma)?;
    check_delta(delta)?;
    let d = delta as f64;
    let p = d / (gamma + d);
    Ok(PercolationConstants {
        p,
        kappa: kappa_from_p(p, delta),
    })
}

/// Left side of the rate condition, `Δ c̄ / log_Δ(1/κ(γ))`; infinite when
/// `κ(γ) ≥ 1`.
pub fn gamma_c_condition(gamma: f64, delta: u32, c_bar: f64) -> Result<f64> {
    let kappa = percolation_constants(gamma, delta)?.kappa;
    if kappa >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let d = delta as f64;
    Ok(d * c_bar * d.ln() / -kappa.ln())
}

/// Smallest `γ` (within `tol`) with `κ(γ) < 1` and
/// `Δ c̄ / log_Δ(1/κ(γ)) ≤ ε`.
///
/// Below `Δ(Δ−1)` the percolation parameter exceeds `1/Δ`; beyond it `κ`
/// decreases to 0, so the left side decreases and the search is a bisection
/// on `[Δ(Δ−1), hi]` with `hi` found by doubling.
pub fn gamma_c(delta: u32, epsilon: f64, c_bar: f64, tol: f64) -> Result<f64> {
    check_delta(delta)?;
    check_tol(tol)?;
    if !(epsilon > 0.0 && epsilon.is_finite() && c_bar > 0.0 && c_bar.is_finite()) {
        return Err(Error::invalid("epsilon and c_bar must be positive and finite"));
    }
    let holds = |gamma: f64| gamma_c_condition(gamma, delta, c_bar).is_ok_and(|lhs| lhs <= epsilon);
    let lo = delta as f64 * (delta as f64 - 1.0);
    let mut hi = 2.0 * lo;
    let mut lo = lo;
    while !holds(hi) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::invalid("rate condition unreachable in double precision"));
        }
    }
    Ok(bisect(lo, hi, tol, holds))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_tilde_roots() {
        let e = std::f64::consts::E;
        let c = c_tilde(e, 1e-12).unwrap();
        assert!((c - 6.31).abs() < 0.01, "{c}");
        let c2 = c_tilde(2.0, 1e-9).unwrap();
        assert!(c2 > 2.0);
        assert!(ctilde_margin(c2, 2.0) >= 0.0);
        assert!(ctilde_margin(c2 - 1e-6, 2.0) < 0.0);
        for mean in [1.01, 1.6, 3.0, 50.0] {
            assert!(ctilde_margin(mean, mean) < 0.0);
            let c = c_tilde(mean, 1e-9).unwrap();
            assert!(c > mean && ctilde_margin(c, mean) >= 0.0);
        }
        assert!(c_tilde(1.0, 1e-9).is_err());
        assert!(c_tilde(2.0, 0.0).is_err());
    }

    #[test]
    fn percolation_examples() {
        let k = percolation_constants(18.0, 2).unwrap();
        assert!((k.p - 0.1).abs() < 1e-15);
        assert!((k.kappa - 0.36).abs() < 1e-14);
        let k = percolation_constants(27.0, 3).unwrap();
        assert!((k.p - 0.1).abs() < 1e-15);
        assert!((k.kappa - 0.1 * 0.81 * 27.0 / 4.0).abs() < 1e-14);
        assert!((kappa_from_p(0.5, 2) - 1.0).abs() < 1e-15);
        assert!((kappa_from_p(0.25, 4) - 1.0).abs() < 1e-14);
        assert!(percolation_constants(1e12, 2).unwrap().p < 1e-11);
        let target = percolation_constants(18.0, 2).unwrap().cluster_constant(2);
        assert!((target - 0.678).abs() < 1e-3, "{target}");
    }

    #[test]
    fn gamma_c_contract() {
        let c_bar = c_tilde(2.0, DEFAULT_BISECTION_TOL).unwrap();
        let tol = 1e-9;
        let g = gamma_c(2, 1.0, c_bar, tol).unwrap();
        assert!(gamma_c_condition(g, 2, c_bar).unwrap() <= 1.0);
        assert!(gamma_c_condition(g - tol, 2, c_bar).unwrap() > 1.0);
        assert!(gamma_c_condition(g * (1.0 - tol), 2, c_bar).unwrap() > 1.0);
        let g_half = gamma_c(2, 0.5, c_bar, tol).unwrap();
        assert!(g_half > g);
        assert!(percolation_constants(g, 2).unwrap().kappa < 1.0);
    }
}
