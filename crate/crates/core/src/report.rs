//! Verification reports and the pass/fail rule.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::ContourSpec;
use crate::gamma::{exp_log, wrap_phase};
use crate::quadrature::MethodUsed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Inconclusive when the error bar relative to |rhs| exceeds `rel_tol`;
/// otherwise pass iff `deviation < max(rel_tol, 3 * rel_error)`.
pub fn classify(deviation: f64, rel_error: f64, rel_tol: f64) -> Status {
    if !deviation.is_finite() || !rel_error.is_finite() || rel_error > rel_tol {
        Status::Inconclusive
    } else if deviation < rel_tol.max(3.0 * rel_error) {
        Status::Pass
    } else {
        Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueReport {
    pub re: f64,
    pub im: f64,
    pub log_mag: f64,
    pub phase: f64,
    pub error: f64,
    pub rel_error: f64,
}

impl ValueReport {
    /// `rel_error` is relative to |value|; the absolute error is derived.
    pub fn from_log(log: Complex64, rel_error: f64) -> Self {
        let v = exp_log(log);
        Self {
            re: v.re,
            im: v.im,
            log_mag: log.re,
            phase: if log.re == f64::NEG_INFINITY { 0.0 } else { wrap_phase(log.im) },
            error: rel_error * v.norm(),
            rel_error,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub params: serde_json::Value,
    pub contour: Option<ContourSpec>,
    pub lhs: Option<ValueReport>,
    pub rhs: ValueReport,
    pub rel_deviation: Option<f64>,
    pub rel_tol: f64,
    pub status: Status,
    pub method: Option<MethodUsed>,
    pub nodes: u64,
    pub runtime_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization_note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_normalization: Option<[f64; 2]>,
    pub anchor: String,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    /// JSON with the timing field zeroed, for reproducibility comparisons.
    pub fn stable_json(&self) -> String {
        let mut copy = self.clone();
        copy.runtime_s = 0.0;
        serde_json::to_string_pretty(&copy).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let dev = self
            .rel_deviation
            .map_or("n/a".to_string(), |d| format!("{d:.3e}"));
        let err = self
            .lhs
            .as_ref()
            .map_or("n/a".to_string(), |l| format!("{:.3e}", l.rel_error));
        format!(
            "{} N={} status={} rel_deviation={} lhs_rel_error={} nodes={} runtime={:.2}s",
            self.identity,
            self.n,
            self.status.as_str(),
            dev,
            err,
            self.nodes,
            self.runtime_s
        )
    }
}
