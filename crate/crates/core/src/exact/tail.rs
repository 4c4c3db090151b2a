use statrs::function::gamma::ln_gamma;

use super::{check_gamma, ExactValue, NeumaierSum};
use crate::error::{Error, Result};

/// `Π(m) = P(Ĥ_n ≥ m) = 1 / ∏_{k=1}^{m-1} (1 + kγ)`, for any `n ≥ m`.
pub fn pi_tail(m: u64, gamma: f64) -> Result<ExactValue> {
    check_gamma(gamma)?;
    let log_product: NeumaierSum = (1..m).map(|k| (k as f64 * gamma).ln_1p()).collect();
    Ok(ExactValue::from_log(-log_product.total()))
}

/// The same quantity through `Π(m) = γ^{-(m-1)} Γ(1 + 1/γ) / Γ(m + 1/γ)`.
///
/// A cross-check only: it relies on log-Gamma, whose absolute error grows with
/// the argument, so for very small `γ` it is less accurate than [`pi_tail`].
pub fn pi_tail_gamma_form(m: u64, gamma: f64) -> Result<ExactValue> {
    check_gamma(gamma)?;
    if m == 0 {
        return Err(Error::invalid("the Gamma form needs m >= 1"));
    }
    let inv = gamma.recip();
    let log_value = -((m - 1) as f64) * gamma.ln() + ln_gamma(1.0 + inv) - ln_gamma(m as f64 + inv);
    Ok(ExactValue::from_log(log_value))
}

/// Reference curve `-m log m` for `log Π(m)`.
pub fn pi_asymptote(m: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain {
            curve: "pi_asymptote",
            arg: m as f64,
        });
    }
    let m = m as f64;
    Ok(-m * m.ln())
}
