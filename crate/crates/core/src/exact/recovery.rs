use std::ops::{Add, Mul};

use num_bigint::{BigInt, Sign};
use num_traits::{One, ToPrimitive, Zero};

use super::{check_gamma, ExactValue, NeumaierSum};
use crate::error::{Error, Result};

/// Largest condition number for which [`nu_n`] answers in double precision.
pub const MAX_CONDITION_NUMBER: f64 = 1e12;

/// Weighted composition sums `S_ℓ(n) = Σ_{x ∈ N_ℓ^n} ∏_k w_k^{x_k}` for
/// `ℓ = 0..=max_len`, where `N_ℓ^n` holds the vectors of `ℓ` positive integers
/// summing to at most `n` and `w_k = weight(k)`.
///
/// `f_ℓ(s)`, the sum over vectors with total at most `s`, is built by peeling
/// the last coordinate: `f_ℓ(s) = Σ_{j ≥ 1} w_ℓ^j f_{ℓ-1}(s - j)`, which
/// telescopes to `f_ℓ(s) = w_ℓ (f_{ℓ-1}(s-1) + f_ℓ(s-1))`. Total cost is
/// `O(max_len · n)` multiplications. Generic so that it can be run in exact
/// rational arithmetic.
pub fn composition_sums<T, W>(n: usize, max_len: usize, weight: W) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Mul<Output = T>,
    W: Fn(usize) -> T,
{
    let mut sums = Vec::with_capacity(max_len + 1);
    sums.push(T::one());
    let mut prev = vec![T::one(); n + 1];
    let mut cur = vec![T::zero(); n + 1];
    for len in 1..=max_len {
        let w = weight(len);
        cur[0] = T::zero();
        for s in 1..=n {
            cur[s] = w.clone() * (prev[s - 1].clone() + cur[s - 1].clone());
        }
        sums.push(cur[n].clone());
        std::mem::swap(&mut prev, &mut cur);
    }
    sums
}

fn check_counts(l: u64, n: u64) -> Result<()> {
    if l == 0 || n == 0 {
        return Err(Error::invalid("l and n must be at least 1"));
    }
    Ok(())
}

/// `S_ℓ(n)` with weights `(1 + kγ)^{-1}`; zero when `ℓ > n`.
pub fn s_ell(l: u64, n: u64, gamma: f64) -> Result<ExactValue> {
    check_gamma(gamma)?;
    check_counts(l, n)?;
    if l > n {
        return Ok(ExactValue::from_value(0.0));
    }
    let sums = composition_sums(n as usize, l as usize, |k| (1.0 + k as f64 * gamma).recip());
    Ok(ExactValue::from_value(sums[l as usize]))
}

/// `S_ℓ^∞ = 1 / (ℓ! γ^ℓ) = ∏_{k ≤ ℓ} 1/(kγ)`, the `n → ∞` limit of [`s_ell`].
pub fn s_ell_infinity(l: u64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let log_product: NeumaierSum = (1..=l).map(|k| (k as f64 * gamma).ln()).collect();
    Ok((-log_product.total()).exp())
}

/// Complete-recovery probability `ν_n = 1 + Σ_{ℓ=1}^n (-1)^ℓ S_ℓ(n)`.
///
/// Refuses with [`Error::Precision`] when the condition number
/// `(1 + Σ S_ℓ(n)) / ν_n` exceeds [`MAX_CONDITION_NUMBER`]; small `γ` makes the
/// terms reach `1/(ℓ! γ^ℓ) ≫ 1`.
pub fn nu_n(n: u64, gamma: f64) -> Result<ExactValue> {
    check_gamma(gamma)?;
    check_counts(1, n)?;
    let sums = composition_sums(n as usize, n as usize, |k| (1.0 + k as f64 * gamma).recip());
    let mut alternating = NeumaierSum::new();
    let mut absolute = NeumaierSum::new();
    for (l, s) in sums.iter().enumerate() {
        alternating.add(if l % 2 == 0 { *s } else { -s });
        absolute.add(*s);
    }
    let value = alternating.total();
    let condition = if value > 0.0 {
        absolute.total() / value
    } else {
        f64::INFINITY
    };
    if condition.is_nan() || condition > MAX_CONDITION_NUMBER || value >= 1.0 {
        return Err(Error::Precision { condition });
    }
    Ok(ExactValue {
        value,
        log_value: value.ln(),
        condition_number: condition,
    })
}

/// [`nu_n`] in binary fixed point on big integers.
///
/// The working precision is chosen from an a priori bound on the condition
/// number, using `ν_n ≥ (γ/(1+γ))^n` (every clock losing its race against the
/// next passage time) plus 20 decimal guard digits, so the result is accurate
/// to double precision whatever the cancellation. Cost is `O(n²)` big-integer
/// multiplications.
pub fn nu_n_high_precision(n: u64, gamma: f64) -> Result<ExactValue> {
    check_gamma(gamma)?;
    check_counts(1, n)?;
    let log2_terms = n as f64 * (1.0 + gamma.recip()).log2();
    let log2_magnitude = (1.0 + (gamma.recip()).min(n as f64) * std::f64::consts::LOG2_E)
        .max(0.0);
    let guard_bits = 20.0 * std::f64::consts::LOG2_10 + 64.0;
    let bits = (log2_terms + log2_magnitude + guard_bits).ceil() as u64;

    let one = BigInt::one() << bits;
    // γ = mantissa · 2^exponent exactly
    let (mantissa, exponent, _) = num_traits::Float::integer_decode(gamma);
    let weight = |k: usize| -> BigInt {
        let k = BigInt::from(k as u64) * BigInt::from(mantissa);
        let (num, den) = if exponent >= 0 {
            (BigInt::one(), BigInt::one() + (k << exponent as usize))
        } else {
            let scale = BigInt::one() << (-exponent) as usize;
            (scale.clone(), scale + k)
        };
        (num << bits) / den
    };

    let n = n as usize;
    let mut prev = vec![one.clone(); n + 1];
    let mut cur = vec![BigInt::zero(); n + 1];
    let mut alternating = one.clone();
    let mut absolute = one.clone();
    for len in 1..=n {
        let w = weight(len);
        cur[0] = BigInt::zero();
        for s in 1..=n {
            cur[s] = (&w * (&prev[s - 1] + &cur[s - 1])) >> bits;
        }
        if len % 2 == 0 {
            alternating += &cur[n];
        } else {
            alternating -= &cur[n];
        }
        absolute += &cur[n];
        std::mem::swap(&mut prev, &mut cur);
    }
    if alternating.sign() != Sign::Plus {
        return Err(Error::Precision {
            condition: f64::INFINITY,
        });
    }
    let log_value = fixed_log(&alternating, bits);
    let condition = (fixed_log(&absolute, bits) - log_value).exp();
    Ok(ExactValue {
        value: fixed_to_f64(&alternating, bits),
        log_value,
        condition_number: condition,
    })
}

/// `x / 2^bits`, rounded once from the top 64 bits of `x`.
fn fixed_to_f64(x: &BigInt, bits: u64) -> f64 {
    let shift = x.bits().saturating_sub(64);
    let top = (x >> shift).to_f64().expect("64-bit value converts");
    let e = shift as i64 - bits as i64;
    // two steps so that neither factor underflows on its own
    let half = (e / 2) as i32;
    top * 2f64.powi(half) * 2f64.powi(e as i32 - half)
}

/// Natural log of `x / 2^bits` for positive `x`.
fn fixed_log(x: &BigInt, bits: u64) -> f64 {
    let width = x.bits();
    let shift = width.saturating_sub(64);
    let top = (x >> shift).to_f64().expect("64-bit value converts");
    top.ln() + (shift as f64 - bits as f64) * std::f64::consts::LN_2
}

/// `lim ν_n = e^{-1/γ}`.
pub fn nu_limit(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((-gamma.recip()).exp())
}
