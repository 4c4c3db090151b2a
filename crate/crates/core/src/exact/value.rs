use serde::{Deserialize, Serialize};

/// A closed-form value together with its numeric provenance.
///
/// `condition_number` is `Σ|terms| / |result|` for alternating sums and 1 for
/// everything else.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub value: f64,
    pub log_value: f64,
    pub condition_number: f64,
}

impl ExactValue {
    pub(crate) fn from_log(log_value: f64) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
            condition_number: 1.0,
        }
    }

    pub(crate) fn from_value(value: f64) -> Self {
        Self {
            value,
            log_value: value.ln(),
            condition_number: 1.0,
        }
    }
}
