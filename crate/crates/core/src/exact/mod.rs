//! Closed-form oracles.
//!
//! Products and factorials are evaluated in log space. The alternating sum for
//! the complete-recovery probability reports its condition number and refuses
//! to answer in double precision when cancellation would eat every digit; a
//! fixed-point big-integer path is provided for those cases.

mod constants;
mod curves;
mod recovery;
mod sum;
mod tail;
mod value;

pub use constants::{
    c_tilde, ctilde_margin, gamma_c, gamma_c_condition, kappa_from_p, percolation_constants,
    PercolationConstants, DEFAULT_BISECTION_TOL,
};
pub use curves::{reference_curve, Curve};
pub use recovery::{
    composition_sums, nu_limit, nu_n, nu_n_high_precision, s_ell, s_ell_infinity,
    MAX_CONDITION_NUMBER,
};
pub use sum::NeumaierSum;
pub use tail::{pi_asymptote, pi_tail, pi_tail_gamma_form};
pub use value::ExactValue;

use crate::error::{Error, Result};

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("gamma must be positive and finite, got {gamma}")))
    }
}
