use std::time::Instant;

use num_complex::Complex64;

use super::params::params_to_json;
use super::IdentityCase;
use crate::contour::{default_contour, validate, ContourSpec, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::gamma::exp_log;
use crate::quadrature::{integrate, IntegralEstimate, QuadratureConfig};
use crate::report::{classify, Status, ValueReport, VerificationReport};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub quadrature: QuadratureConfig,
    /// Explicit contour; when absent the default contour is used.
    pub contour: Option<ContourSpec>,
    pub margin: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            contour: None,
            margin: DEFAULT_MARGIN,
        }
    }
}

impl VerifyOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            quadrature: QuadratureConfig::default().with_rel_tol(rel_tol),
            ..Self::default()
        }
    }
}

/// |lhs/rhs - 1| and the lhs error bar relative to |rhs|, from logs.
pub fn compare_logs(lhs: Complex64, lhs_rel_error: f64, rhs: Complex64) -> (f64, f64) {
    if rhs.re == f64::NEG_INFINITY {
        let l = exp_log(lhs).norm();
        return (l, lhs_rel_error * l);
    }
    if lhs.re == f64::NEG_INFINITY {
        return (1.0, 0.0);
    }
    let d = lhs - rhs;
    ((d.exp() - 1.0).norm(), lhs_rel_error * d.re.exp())
}

/// Integrate the left-hand side and compare it with the closed form.
///
/// Infeasible contours and unconverged quadrature yield an inconclusive
/// report; other numerical errors are returned.
pub fn verify(case: &IdentityCase, opts: &VerifyOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let rel_tol = opts.quadrature.rel_tol;
    let mut report = VerificationReport {
        identity: case.id.as_str().to_string(),
        n: case.n,
        params: params_to_json(&case.params),
        contour: None,
        lhs: None,
        rhs: ValueReport::from_log(case.rhs_log, 0.0),
        rel_deviation: None,
        rel_tol,
        status: Status::Inconclusive,
        method: None,
        nodes: 0,
        runtime_s: 0.0,
        normalization_note: case.normalization_note.clone(),
        fitted_normalization: None,
        anchor: case.anchor().to_string(),
        notes: Vec::new(),
    };
    let contour = match &opts.contour {
        Some(c) => c.clone(),
        None => match default_contour(&case.lhs, opts.margin) {
            Ok(c) => c,
            Err(Error::Infeasible { violations }) => {
                report.notes.push(format!("infeasible contour: {}", violations.join("; ")));
                report.runtime_s = start.elapsed().as_secs_f64();
                return Ok(report);
            }
            Err(e) => return Err(e),
        },
    };
    report.contour = Some(contour.clone());
    let check = validate(&case.lhs, &contour)?;
    if !check.passed() {
        report.notes.push(format!("contour violates pole separation: {}", check.violations().join("; ")));
        report.runtime_s = start.elapsed().as_secs_f64();
        return Ok(report);
    }
    let estimate: IntegralEstimate = match integrate(&case.lhs, &contour, &opts.quadrature) {
        Ok(e) => e,
        Err(Error::NoConvergence { estimate }) => {
            report.notes.push("quadrature did not reach the requested tolerance".into());
            *estimate
        }
        Err(Error::BudgetExceeded { budget, needed }) => {
            report
                .notes
                .push(format!("node budget {budget} exceeded (needed {needed})"));
            report.runtime_s = start.elapsed().as_secs_f64();
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let (deviation, rel_error) = compare_logs(estimate.log_value, estimate.rel_error, case.rhs_log);
    report.lhs = Some(ValueReport::from_log(estimate.log_value, estimate.rel_error));
    report.rel_deviation = Some(deviation);
    report.method = Some(estimate.method_used);
    report.nodes = estimate.nodes_evaluated;
    report.status = if estimate.converged {
        classify(deviation, rel_error, rel_tol)
    } else {
        Status::Inconclusive
    };
    if case.normalization_note.is_some() && case.rhs_log.re.is_finite() {
        let ratio = exp_log(estimate.log_value - case.rhs_log);
        report.fitted_normalization = Some([ratio.re, ratio.im]);
    }
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}
