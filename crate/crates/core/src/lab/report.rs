use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::stats::Interval;

pub const REPORT_CSV_HEADER: &str = "label,point,stderr,lo,hi,oracle,verdict";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// One row of a report.
///
/// A `binding` verdict decides the report; a non-binding one is recorded for
/// information (finite-size behaviour of statements that only hold
/// asymptotically).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub label: String,
    pub point: f64,
    pub stderr: f64,
    pub lo: f64,
    pub hi: f64,
    pub oracle: Option<f64>,
    pub verdict: Option<Verdict>,
    pub binding: bool,
}

impl Estimate {
    pub fn new(label: impl Into<String>, interval: Interval) -> Self {
        Self {
            label: label.into(),
            point: interval.point,
            stderr: interval.stderr,
            lo: interval.lo,
            hi: interval.hi,
            oracle: None,
            verdict: None,
            binding: false,
        }
    }

    pub fn interval(&self) -> Interval {
        Interval {
            point: self.point,
            stderr: self.stderr,
            lo: self.lo,
            hi: self.hi,
        }
    }

    /// Oracle with no verdict attached.
    pub fn with_oracle(mut self, oracle: f64) -> Self {
        self.oracle = Some(oracle);
        self
    }

    /// Binding check: the oracle must lie in `[lo, hi]`.
    pub fn against(self, oracle: f64) -> Self {
        let ok = self.interval().contains(oracle);
        self.with_oracle(oracle).judged(ok)
    }

    pub fn judged(mut self, ok: bool) -> Self {
        self.verdict = Some(Verdict::from_bool(ok));
        self.binding = true;
        self
    }

    pub fn noted(mut self, ok: bool) -> Self {
        self.verdict = Some(Verdict::from_bool(ok));
        self.binding = false;
        self
    }

    fn verdict_text(&self) -> &'static str {
        match (self.verdict, self.binding) {
            (None, _) => "",
            (Some(Verdict::Pass), true) => "pass",
            (Some(Verdict::Fail), true) => "fail",
            (Some(Verdict::Pass), false) => "noted-pass",
            (Some(Verdict::Fail), false) => "noted-fail",
        }
    }
}

/// Replication-aggregated estimates of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub estimates: Vec<Estimate>,
    pub replications_used: u64,
    pub replications_discarded: u64,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            estimates: Vec::new(),
            replications_used: 0,
            replications_discarded: 0,
        }
    }

    pub fn param(mut self, key: &str, value: impl Display) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn push(&mut self, estimate: Estimate) {
        self.estimates.push(estimate);
    }

    pub fn estimate(&self, label: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.label == label)
    }

    /// `Pass` unless some binding check failed.
    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(
            self.estimates
                .iter()
                .all(|e| !e.binding || e.verdict != Some(Verdict::Fail)),
        )
    }

    pub fn passed(&self) -> bool {
        self.verdict().is_pass()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{REPORT_CSV_HEADER}")?;
        for e in &self.estimates {
            let oracle = e.oracle.map(|o| o.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.label,
                e.point,
                e.stderr,
                e.lo,
                e.hi,
                oracle,
                e.verdict_text()
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
