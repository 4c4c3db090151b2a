use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference curves for the limit laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "curve", rename_all = "snake_case")]
pub enum Curve {
    /// `log t / log log t`, the semi-line limsup line for `H_t`.
    LimsupLine,
    /// `α t / log t`, the liminf rate for `H_t`.
    HLiminf { alpha: f64 },
    /// `α t / log log t`, the liminf rate for `M_t`.
    MLiminf { alpha: f64 },
    /// `α t`, the volume growth `log #A_t`.
    LogVolume { alpha: f64 },
    /// `r log x / log log x`.
    EtaH { r: f64 },
    /// `r log x / log log log x`.
    EtaM { r: f64 },
    /// `⌊c̄ t⌋ / log_Δ(1/κ)`.
    Percolation { c_bar: f64, delta: u32, kappa: f64 },
}

impl Curve {
    pub fn name(&self) -> &'static str {
        match self {
            Curve::LimsupLine => "limsup_line",
            Curve::HLiminf { .. } => "h_liminf",
            Curve::MLiminf { .. } => "m_liminf",
            Curve::LogVolume { .. } => "log_volume",
            Curve::EtaH { .. } => "eta_h",
            Curve::EtaM { .. } => "eta_m",
            Curve::Percolation { .. } => "percolation",
        }
    }
}

/// Evaluates `curve` at `x`. Fails with a domain error wherever one of the
/// iterated logarithms in a denominator is not positive.
pub fn reference_curve(curve: Curve, x: f64) -> Result<f64> {
    let domain = || Error::Domain {
        curve: curve.name(),
        arg: x,
    };
    let positive = |v: f64| if v > 0.0 && v.is_finite() { Ok(v) } else { Err(domain()) };
    if x.is_nan() {
        return Err(domain());
    }
    let log = || positive(x.ln());
    let loglog = || positive(x.ln().ln());
    let logloglog = || positive(x.ln().ln().ln());
    match curve {
        Curve::LimsupLine => Ok(x.ln() / loglog()?),
        Curve::HLiminf { alpha } => Ok(alpha * x / log()?),
        Curve::MLiminf { alpha } => Ok(alpha * x / loglog()?),
        Curve::LogVolume { alpha } => Ok(alpha * x),
        Curve::EtaH { r } => Ok(r * x.ln() / loglog()?),
        Curve::EtaM { r } => Ok(r * x.ln() / logloglog()?),
        Curve::Percolation {
            c_bar,
            delta,
            kappa,
        } => {
            if !(kappa > 0.0 && kappa < 1.0) || delta < 2 || x < 0.0 {
                return Err(domain());
            }
            Ok((c_bar * x).floor() * (delta as f64).ln() / -kappa.ln())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn examples() {
        let v = reference_curve(Curve::LimsupLine, E.powf(E)).unwrap();
        assert!((v - E).abs() < 1e-12);
        assert_eq!(reference_curve(Curve::LogVolume { alpha: 0.6 }, 10.0).unwrap(), 6.0);
        let v = reference_curve(Curve::HLiminf { alpha: 0.6 }, 100.0).unwrap();
        assert!((v - 13.03).abs() < 0.01);
    }

    #[test]
    fn domain_errors() {
        assert!(reference_curve(Curve::LimsupLine, E).is_err());
        assert!(reference_curve(Curve::LimsupLine, 2.0).is_err());
        assert!(reference_curve(Curve::HLiminf { alpha: 1.0 }, 1.0).is_err());
        assert!(reference_curve(Curve::EtaM { r: 1.0 }, 10.0).is_err());
        assert!(reference_curve(Curve::EtaM { r: 1.0 }, 1e3).is_ok());
        assert!(reference_curve(Curve::MLiminf { alpha: 1.0 }, f64::NAN).is_err());
        let bad = Curve::Percolation { c_bar: 1.0, delta: 2, kappa: 1.0 };
        assert!(reference_curve(bad, 10.0).is_err());
    }

    #[test]
    fn percolation_curve() {
        let c = Curve::Percolation { c_bar: 1.0, delta: 2, kappa: 0.36 };
        let v = reference_curve(c, 200.9).unwrap();
        assert!((v - 200.0 * 2f64.ln() / -0.36f64.ln()).abs() < 1e-9);
    }
}
