//! Straight vertical contours and pole-separation checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::{MbIntegrand, Placement};

pub const DEFAULT_MARGIN: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub offsets: Vec<f64>,
    pub margin: f64,
}

impl ContourSpec {
    pub fn new(offsets: Vec<f64>, margin: f64) -> Self {
        Self { offsets, margin }
    }
}

/// `Re(constant) + sum_j coeffs[j] * c_j >= margin` for one numerator factor.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleConstraint {
    pub factor: usize,
    pub constant_re: f64,
    pub coeffs: Vec<i32>,
}

impl PoleConstraint {
    pub fn slack(&self, offsets: &[f64], margin: f64) -> f64 {
        let lin: f64 = self
            .coeffs
            .iter()
            .zip(offsets)
            .map(|(&c, &o)| c as f64 * o)
            .sum();
        self.constant_re + lin - margin
    }

    pub fn describe(&self) -> String {
        let mut s = format!("factor {}: {:.4}", self.factor, self.constant_re);
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                s.push_str(&format!(" {:+}*c{}", c, j));
            }
        }
        s.push_str(" >= margin");
        s
    }
}

pub fn pole_constraints(integrand: &MbIntegrand) -> Vec<PoleConstraint> {
    integrand
        .gamma_factors
        .iter()
        .enumerate()
        .filter(|(_, f)| f.placement == Placement::Numerator)
        .map(|(factor, f)| PoleConstraint {
            factor,
            constant_re: f.arg.constant.re,
            coeffs: f.arg.coeffs.clone(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintStatus {
    pub constraint: PoleConstraint,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourReport {
    pub statuses: Vec<ConstraintStatus>,
    pub min_slack: f64,
}

impl ContourReport {
    pub fn passed(&self) -> bool {
        self.statuses.iter().all(|s| s.slack >= 0.0)
    }

    pub fn violations(&self) -> Vec<String> {
        self.statuses
            .iter()
            .filter(|s| s.slack < 0.0)
            .map(|s| format!("{} (slack {:.4})", s.constraint.describe(), s.slack))
            .collect()
    }
}

pub fn validate(integrand: &MbIntegrand, contour: &ContourSpec) -> Result<ContourReport> {
    if contour.offsets.len() != integrand.dim {
        return Err(Error::DimensionMismatch {
            expected: integrand.dim,
            got: contour.offsets.len(),
        });
    }
    let statuses: Vec<ConstraintStatus> = pole_constraints(integrand)
        .into_iter()
        .map(|constraint| {
            let slack = constraint.slack(&contour.offsets, contour.margin);
            ConstraintStatus { constraint, slack }
        })
        .collect();
    let min_slack = statuses
        .iter()
        .map(|s| s.slack)
        .fold(f64::INFINITY, f64::min);
    Ok(ContourReport {
        statuses,
        min_slack,
    })
}

/// Validate and turn a failing contour into [`Error::ContourViolation`].
pub fn require_valid(integrand: &MbIntegrand, contour: &ContourSpec) -> Result<ContourReport> {
    let report = validate(integrand, contour)?;
    if report.passed() {
        Ok(report)
    } else {
        Err(Error::ContourViolation {
            violations: report.violations(),
        })
    }
}

/// Offsets at zero if feasible, otherwise the midpoints of the per-axis
/// intervals cut out by single-variable constraints.
pub fn default_contour(integrand: &MbIntegrand, margin: f64) -> Result<ContourSpec> {
    let zero = ContourSpec::new(vec![0.0; integrand.dim], margin);
    if validate(integrand, &zero)?.passed() {
        return Ok(zero);
    }
    let mut lo = vec![f64::NEG_INFINITY; integrand.dim];
    let mut hi = vec![f64::INFINITY; integrand.dim];
    for pc in pole_constraints(integrand) {
        let nonzero: Vec<usize> = (0..pc.coeffs.len()).filter(|&j| pc.coeffs[j] != 0).collect();
        if nonzero.len() != 1 {
            continue;
        }
        let j = nonzero[0];
        let k = pc.coeffs[j] as f64;
        let bound = (margin - pc.constant_re) / k;
        if k > 0.0 {
            lo[j] = lo[j].max(bound);
        } else {
            hi[j] = hi[j].min(bound);
        }
    }
    let mut offsets = Vec::with_capacity(integrand.dim);
    let mut violations = Vec::new();
    for j in 0..integrand.dim {
        if lo[j] > hi[j] {
            violations.push(format!("axis {j}: empty interval [{:.4}, {:.4}]", lo[j], hi[j]));
            offsets.push(0.0);
            continue;
        }
        offsets.push(match (lo[j].is_finite(), hi[j].is_finite()) {
            (true, true) => 0.5 * (lo[j] + hi[j]),
            (true, false) => lo[j].max(0.0) + if lo[j] >= 0.0 { 0.5 } else { 0.0 },
            (false, true) => hi[j].min(0.0) - if hi[j] <= 0.0 { 0.5 } else { 0.0 },
            (false, false) => 0.0,
        });
    }
    if !violations.is_empty() {
        return Err(Error::Infeasible { violations });
    }
    let contour = ContourSpec::new(offsets, margin);
    let report = validate(integrand, &contour)?;
    if report.passed() {
        Ok(contour)
    } else {
        Err(Error::Infeasible {
            violations: report.violations(),
        })
    }
}
