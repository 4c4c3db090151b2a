//! Offspring distributions and the vertex records of a lazily explored tree.
//!
//! The engine never materializes the tree: a vertex's offspring count is drawn
//! at the moment the vertex is activated. Each kind consumes a fixed, documented
//! number of draws from the replication stream so that `(seed, config)` pins
//! down the whole realization.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of categories accepted by [`OffspringKind::Pmf`].
pub const MAX_PMF_CATEGORIES: usize = 64;
/// Largest trial count accepted by [`OffspringKind::Binomial`].
pub const MAX_BINOMIAL_TRIALS: u32 = 1024;
/// Largest rate accepted by [`OffspringKind::Poisson`] (keeps `e^-lambda` normal).
pub const MAX_POISSON_RATE: f64 = 500.0;

const PMF_SUM_TOL: f64 = 1e-12;

pub type VertexId = u32;

/// Arena record of an activated vertex; `id` is its rank in activation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: VertexId,
    pub parent: Option<VertexId>,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OffspringKind {
    /// The semi-line `N`: every vertex has exactly one child.
    SemiLine,
    /// Complete `d`-ary tree.
    Deterministic(u32),
    Binomial { trials: u32, p: f64 },
    Poisson { rate: f64 },
    /// Failures before the first success: `P(k) = p (1-p)^k`, `k >= 0`.
    Geometric { p: f64 },
    /// Explicit `p_0, ..., p_K` with `K < 64`.
    Pmf(Vec<f64>),
}

/// Offspring law of a Galton–Watson tree (or the semi-line marker).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct OffspringSpec {
    kind: OffspringKind,
    mean: f64,
}

impl OffspringSpec {
    pub fn new(kind: OffspringKind) -> Result<Self> {
        validate(&kind)?;
        let mean = analytic_mean(&kind);
        Ok(Self { kind, mean })
    }

    pub fn semi_line() -> Self {
        Self {
            kind: OffspringKind::SemiLine,
            mean: 1.0,
        }
    }

    pub fn deterministic(d: u32) -> Self {
        Self {
            kind: OffspringKind::Deterministic(d),
            mean: f64::from(d),
        }
    }

    pub fn binomial(trials: u32, p: f64) -> Result<Self> {
        Self::new(OffspringKind::Binomial { trials, p })
    }

    pub fn poisson(rate: f64) -> Result<Self> {
        Self::new(OffspringKind::Poisson { rate })
    }

    pub fn geometric(p: f64) -> Result<Self> {
        Self::new(OffspringKind::Geometric { p })
    }

    pub fn pmf(probs: Vec<f64>) -> Result<Self> {
        Self::new(OffspringKind::Pmf(probs))
    }

    pub fn kind(&self) -> &OffspringKind {
        &self.kind
    }

    /// `E B`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Exponential growth rate of the occupied set on survival, `E B - 1`.
    pub fn alpha(&self) -> f64 {
        self.mean - 1.0
    }

    pub fn is_semi_line(&self) -> bool {
        matches!(self.kind, OffspringKind::SemiLine)
    }

    pub fn is_supercritical(&self) -> bool {
        self.mean > 1.0
    }

    /// `P(B = k)`.
    pub fn pmf_at(&self, k: u32) -> f64 {
        match &self.kind {
            OffspringKind::SemiLine => f64::from(u8::from(k == 1)),
            OffspringKind::Deterministic(d) => f64::from(u8::from(k == *d)),
            OffspringKind::Binomial { trials, p } => {
                if k > *trials {
                    return 0.0;
                }
                let n = f64::from(*trials);
                let k = f64::from(k);
                let log_choose = statrs::function::factorial::ln_binomial(n as u64, k as u64);
                if *p == 0.0 {
                    return f64::from(u8::from(k == 0.0));
                }
                if *p == 1.0 {
                    return f64::from(u8::from(k == n));
                }
                (log_choose + k * p.ln() + (n - k) * (-p).ln_1p()).exp()
            }
            OffspringKind::Poisson { rate } => {
                if *rate == 0.0 {
                    return f64::from(u8::from(k == 0));
                }
                let k = f64::from(k);
                (k * rate.ln() - rate - statrs::function::gamma::ln_gamma(k + 1.0)).exp()
            }
            OffspringKind::Geometric { p } => p * (1.0 - p).powi(k as i32),
            OffspringKind::Pmf(probs) => probs.get(k as usize).copied().unwrap_or(0.0),
        }
    }

    /// Draws one offspring count.
    ///
    /// Draw budget per kind: semi-line and `det` consume nothing; `bin:n:p`
    /// consumes `n` uniforms (one Bernoulli trial each, left to right); `pois`,
    /// `geom` and `pmf` consume exactly one uniform (inverse CDF).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match &self.kind {
            OffspringKind::SemiLine => 1,
            OffspringKind::Deterministic(d) => *d,
            OffspringKind::Binomial { trials, p } => {
                let mut count = 0;
                for _ in 0..*trials {
                    let u: f64 = rng.random();
                    count += u32::from(u < *p);
                }
                count
            }
            OffspringKind::Poisson { rate } => {
                let u: f64 = rng.random();
                let mut mass = (-rate).exp();
                let mut cdf = mass;
                let mut k = 0u32;
                // the cdf saturates below 1 in floating point; stop once the
                // remaining mass cannot move it
                while u >= cdf && mass > 0.0 {
                    k += 1;
                    mass *= rate / f64::from(k);
                    cdf += mass;
                }
                k
            }
            OffspringKind::Geometric { p } => {
                let u: f64 = rng.random();
                if *p >= 1.0 {
                    return 0;
                }
                // 1 - u lies in (0, 1]
                let k = ((1.0 - u).ln() / (-p).ln_1p()).floor();
                if k >= f64::from(u32::MAX) {
                    u32::MAX
                } else {
                    k as u32
                }
            }
            OffspringKind::Pmf(probs) => {
                let u: f64 = rng.random();
                let mut cdf = 0.0;
                let mut last_positive = 0;
                for (k, &q) in probs.iter().enumerate() {
                    if q > 0.0 {
                        last_positive = k;
                    }
                    cdf += q;
                    if u < cdf {
                        return k as u32;
                    }
                }
                last_positive as u32
            }
        }
    }
}

impl Default for OffspringSpec {
    fn default() -> Self {
        Self::semi_line()
    }
}

fn validate(kind: &OffspringKind) -> Result<()> {
    let prob = |name: &str, p: f64| {
        if p.is_finite() && (0.0..=1.0).contains(&p) {
            Ok(())
        } else {
            Err(Error::invalid(format!("{name} must be a probability, got {p}")))
        }
    };
    match kind {
        OffspringKind::SemiLine | OffspringKind::Deterministic(_) => Ok(()),
        OffspringKind::Binomial { trials, p } => {
            if *trials > MAX_BINOMIAL_TRIALS {
                return Err(Error::invalid(format!(
                    "binomial trials must be at most {MAX_BINOMIAL_TRIALS}, got {trials}"
                )));
            }
            prob("binomial p", *p)
        }
        OffspringKind::Poisson { rate } => {
            if rate.is_finite() && (0.0..=MAX_POISSON_RATE).contains(rate) {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "poisson rate must lie in [0, {MAX_POISSON_RATE}], got {rate}"
                )))
            }
        }
        OffspringKind::Geometric { p } => {
            prob("geometric p", *p)?;
            if *p == 0.0 {
                return Err(Error::invalid("geometric p must be positive"));
            }
            Ok(())
        }
        OffspringKind::Pmf(probs) => {
            if probs.is_empty() || probs.len() > MAX_PMF_CATEGORIES {
                return Err(Error::invalid(format!(
                    "pmf must have between 1 and {MAX_PMF_CATEGORIES} entries, got {}",
                    probs.len()
                )));
            }
            if let Some(bad) = probs.iter().find(|q| !q.is_finite() || **q < 0.0) {
                return Err(Error::invalid(format!("pmf entry {bad} is negative or not finite")));
            }
            let total: f64 = probs.iter().sum();
            if (total - 1.0).abs() > PMF_SUM_TOL {
                return Err(Error::invalid(format!("pmf entries sum to {total}, not 1")));
            }
            Ok(())
        }
    }
}

fn analytic_mean(kind: &OffspringKind) -> f64 {
    match kind {
        OffspringKind::SemiLine => 1.0,
        OffspringKind::Deterministic(d) => f64::from(*d),
        OffspringKind::Binomial { trials, p } => f64::from(*trials) * p,
        OffspringKind::Poisson { rate } => *rate,
        OffspringKind::Geometric { p } => (1.0 - p) / p,
        OffspringKind::Pmf(probs) => probs
            .iter()
            .enumerate()
            .map(|(k, q)| k as f64 * q)
            .sum(),
    }
}

/// `E B` for a validated spec.
pub fn offspring_mean(spec: &OffspringSpec) -> f64 {
    spec.mean()
}

impl fmt::Display for OffspringSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            OffspringKind::SemiLine => write!(f, "semiline"),
            OffspringKind::Deterministic(d) => write!(f, "det:{d}"),
            OffspringKind::Binomial { trials, p } => write!(f, "bin:{trials}:{p}"),
            OffspringKind::Poisson { rate } => write!(f, "pois:{rate}"),
            OffspringKind::Geometric { p } => write!(f, "geom:{p}"),
            OffspringKind::Pmf(probs) => {
                write!(f, "pmf:")?;
                for (i, q) in probs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{q}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for OffspringSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("unrecognized offspring spec `{s}`"));
        let real = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let count = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());

        if s == "semiline" {
            return Ok(Self::semi_line());
        }
        let (head, rest) = s.split_once(':').ok_or_else(bad)?;
        let kind = match head {
            "det" => OffspringKind::Deterministic(count(rest)?),
            "bin" => {
                let (n, p) = rest.split_once(':').ok_or_else(bad)?;
                OffspringKind::Binomial {
                    trials: count(n)?,
                    p: real(p)?,
                }
            }
            "pois" => OffspringKind::Poisson { rate: real(rest)? },
            "geom" => OffspringKind::Geometric { p: real(rest)? },
            "pmf" => OffspringKind::Pmf(rest.split(',').map(real).collect::<Result<_>>()?),
            _ => return Err(bad()),
        };
        Self::new(kind)
    }
}

impl TryFrom<String> for OffspringSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<OffspringSpec> for String {
    fn from(spec: OffspringSpec) -> String {
        spec.to_string()
    }
}
