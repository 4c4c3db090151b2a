use fpp_core::exact::{composition_sums, nu_n, nu_n_high_precision, pi_tail, s_ell, s_ell_infinity};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Every vector of `l` positive integers with sum at most `n`.
fn compositions(l: usize, n: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        if n - first + 1 < l {
            break;
        }
        for mut rest in compositions(l - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `S_ℓ(n)` by enumeration, in exact arithmetic with `γ = num/den`.
fn s_ell_enumerated(l: usize, n: usize, num: i64, den: i64) -> BigRational {
    let gamma = ratio(num, den);
    let w = |k: usize| (BigRational::one() + gamma.clone() * ratio(k as i64, 1)).recip();
    let mut total = BigRational::zero();
    for x in compositions(l, n) {
        let mut term = BigRational::one();
        for (k, &xk) in x.iter().enumerate() {
            for _ in 0..xk {
                term *= w(k + 1);
            }
        }
        total += term;
    }
    total
}

#[test]
fn composition_sums_match_enumeration_exactly() {
    for (num, den) in [(1, 1), (1, 2), (3, 1), (2, 7)] {
        for n in 1..=8 {
            let gamma = ratio(num, den);
            let dp: Vec<BigRational> = composition_sums(n, n + 1, |k| {
                (BigRational::one() + gamma.clone() * ratio(k as i64, 1)).recip()
            });
            for (l, value) in dp.iter().enumerate().skip(1) {
                assert_eq!(*value, s_ell_enumerated(l, n, num, den), "gamma={num}/{den} n={n} l={l}");
            }
        }
    }
}

#[test]
fn double_precision_values_match_exact_ones() {
    for (num, den) in [(1, 1), (1, 2), (3, 1)] {
        let gamma = num as f64 / den as f64;
        for n in 1..=8usize {
            let mut nu = BigRational::one();
            for l in 1..=n {
                let exact = s_ell_enumerated(l, n, num, den);
                let got = s_ell(l as u64, n as u64, gamma).unwrap().value;
                let want = exact.to_f64().unwrap();
                assert!(((got - want) / want).abs() < 1e-13, "S_{l}({n}) {got} vs {want}");
                if l % 2 == 1 {
                    nu -= exact;
                } else {
                    nu += exact;
                }
            }
            let want = nu.to_f64().unwrap();
            let got = nu_n(n as u64, gamma).unwrap().value;
            assert!(((got - want) / want).abs() < 1e-12, "nu_{n} {got} vs {want}");
            let high = nu_n_high_precision(n as u64, gamma).unwrap().value;
            assert!(((high - want) / want).abs() < 1e-15, "nu_{n} {high} vs {want}");
        }
    }
}

#[test]
fn pi_matches_exact_product() {
    for (num, den) in [(1, 1), (1, 3), (5, 2)] {
        let gamma = num as f64 / den as f64;
        let mut product = BigRational::one();
        for m in 1..=30u64 {
            let want = product.recip().to_f64().unwrap();
            let got = pi_tail(m, gamma).unwrap().value;
            assert!(((got - want) / want).abs() < 1e-13, "m={m}");
            product *= BigRational::one() + ratio(num, den) * ratio(m as i64, 1);
        }
    }
}

#[test]
fn s_ell_tends_to_its_limit() {
    for gamma in [0.5, 1.0, 2.0] {
        for l in 1..=4u64 {
            let limit = s_ell_infinity(l, gamma).unwrap();
            let far = s_ell(l, 20_000, gamma).unwrap().value;
            assert!(((far - limit) / limit).abs() < 1e-2, "l={l} gamma={gamma}: {far} vs {limit}");
            let near = s_ell(l, 50, gamma).unwrap().value;
            assert!(near <= far);
        }
    }
}
