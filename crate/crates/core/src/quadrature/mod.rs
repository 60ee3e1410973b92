//! Numerical integration of Mellin-Barnes integrands along straight
//! vertical contours, `prod_j dz_j / (2 pi i)` with `z_j = c_j + i t_j`.

pub mod accum;
pub mod grid;
pub mod qmc;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{require_valid, ContourSpec};
use crate::error::{Error, Result};
use crate::gamma::exp_log;
use crate::integrand::MbIntegrand;
use grid::{Lattice, RefineSettings, Stop};

pub const MAX_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Auto,
    Line,
    Tensor,
    Qmc,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "line" => Ok(Method::Line),
            "tensor" => Ok(Method::Tensor),
            "qmc" => Ok(Method::Qmc),
            other => Err(Error::BadConfig(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: Method,
    pub rel_tol: f64,
    /// Tails are cut where log|f| has dropped this much below its peak.
    pub truncation_log_threshold: f64,
    pub max_refinements: u32,
    pub initial_step: f64,
    pub qmc_points: u64,
    pub qmc_randomizations: u32,
    pub seed: u64,
    pub node_budget: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            rel_tol: 1e-8,
            truncation_log_threshold: 40.0,
            max_refinements: 10,
            initial_step: 0.5,
            qmc_points: 1 << 15,
            qmc_randomizations: 16,
            seed: 0,
            node_budget: 20_000_000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::BadConfig(format!("rel_tol {} not in (0, 1)", self.rel_tol)));
        }
        if self.qmc_randomizations < 2 {
            return Err(Error::BadConfig("need at least two randomizations".into()));
        }
        if !(self.initial_step > 0.0) || self.truncation_log_threshold <= 0.0 {
            return Err(Error::BadConfig("step and threshold must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodUsed {
    Exact,
    Line,
    Tensor,
    Qmc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: Complex64,
    pub log_value: Complex64,
    pub error_estimate: f64,
    pub rel_error: f64,
    pub nodes_evaluated: u64,
    pub method_used: MethodUsed,
    pub converged: bool,
}

impl IntegralEstimate {
    fn from_log(log_value: Complex64, rel_error: f64, nodes: u64, method: MethodUsed, converged: bool) -> Self {
        let value = exp_log(log_value);
        Self {
            value,
            log_value,
            error_estimate: rel_error * value.norm(),
            rel_error,
            nodes_evaluated: nodes,
            method_used: method,
            converged,
        }
    }

    fn zero() -> Self {
        Self::from_log(Complex64::new(f64::NEG_INFINITY, 0.0), 0.0, 0, MethodUsed::Exact, true)
    }
}

fn point(contour: &ContourSpec, t: &[f64]) -> Vec<Complex64> {
    contour
        .offsets
        .iter()
        .zip(t)
        .map(|(&c, &ti)| Complex64::new(c, ti))
        .collect()
}

/// Measure factor (2 pi)^-d from dz/(2 pi i) = dt/(2 pi).
fn log_measure(dim: usize) -> Complex64 {
    Complex64::new(-(dim as f64) * (2.0 * PI).ln(), 0.0)
}

struct Prepared {
    peak: f64,
    extents: Vec<f64>,
    tail_rel: f64,
}

/// Generic off-axis positions, in units of 1/rate, for the scans below.
/// Points with some t_j = 0 can sit on zeros of 1/Gamma(z_k - z_j) factors.
const PROBES: [f64; 3] = [-0.31, 0.17, 0.43];

/// Visit `t` with axis `axis` fixed at `value` and the others on probe
/// positions.
fn probe_lines(rates: &[f64], axis: usize, value: f64, mut visit: impl FnMut(&[f64]) -> Result<()>) -> Result<()> {
    let dim = rates.len();
    let others = dim - 1;
    let mut t = vec![0.0; dim];
    for code in 0..PROBES.len().pow(others as u32) {
        let mut c = code;
        for (j, tj) in t.iter_mut().enumerate() {
            if j == axis {
                *tj = value;
            } else {
                *tj = PROBES[c % PROBES.len()] / rates[j];
                c /= PROBES.len();
            }
        }
        visit(&t)?;
    }
    Ok(())
}

/// Per-axis truncation from the decay rate, widened until the integrand at
/// the cut sits `threshold` below its peak.
fn prepare(f: &MbIntegrand, contour: &ContourSpec, cfg: &QuadratureConfig) -> Result<Prepared> {
    let rates = f.decay_rates()?;
    let dim = f.dim;
    let edge_max = |axis: usize, value: f64| -> Result<f64> {
        let mut m = f64::NEG_INFINITY;
        probe_lines(&rates, axis, value, |t| {
            m = m.max(f.eval_log(&point(contour, t))?.re);
            Ok(())
        })?;
        Ok(m)
    };
    let mut peak = f64::NEG_INFINITY;
    for (axis, &rate) in rates.iter().enumerate() {
        for k in -8..=8 {
            peak = peak.max(edge_max(axis, k as f64 * 0.5 / rate)?);
        }
    }
    if peak == f64::NEG_INFINITY {
        return Err(Error::BadConfig("integrand vanishes at every probe point".into()));
    }
    let mut extents = Vec::with_capacity(dim);
    let mut tail_rel = 0.0f64;
    for (axis, &rate) in rates.iter().enumerate() {
        let mut t = (cfg.truncation_log_threshold + 10.0) / rate;
        let mut edge = f64::INFINITY;
        for _ in 0..12 {
            edge = edge_max(axis, t)?.max(edge_max(axis, -t)?);
            if edge < peak - cfg.truncation_log_threshold {
                break;
            }
            t *= 1.25;
        }
        // Exponential tail beyond the cut, both sides, relative to the peak.
        tail_rel += 2.0 * (edge - peak).exp() / rate;
        extents.push(t);
    }
    Ok(Prepared {
        extents,
        tail_rel,
        peak,
    })
}

fn lattice_integral(
    f: &MbIntegrand,
    contour: &ContourSpec,
    cfg: &QuadratureConfig,
    method: MethodUsed,
) -> Result<IntegralEstimate> {
    let prep = prepare(f, contour, cfg)?;
    let extents = prep.extents.clone();
    let extent = move |axis: usize, _: &[f64]| (-extents[axis], extents[axis]);
    let log_f = |t: &[f64]| f.eval_log(&point(contour, t));
    let lattice = Lattice {
        dim: f.dim,
        extent: &extent,
        log_f: &log_f,
    };
    let out = lattice.refine(&RefineSettings {
        initial_step: cfg.initial_step,
        rel_tol: cfg.rel_tol,
        max_refinements: cfg.max_refinements,
        node_budget: cfg.node_budget,
        min_levels: 3,
    })?;
    if let Stop::Budget { needed } = out.stop {
        return Err(Error::BudgetExceeded {
            budget: cfg.node_budget,
            needed,
        });
    }
    let log_value = out.log_value + log_measure(f.dim);
    // Peak-relative tail bound translated to the integral's scale.
    let peak_to_value = {
        let peak = prep.peak;
        let volume: f64 = prep.extents.iter().map(|t| 2.0 * t).product();
        (peak + volume.ln() + log_measure(f.dim).re - log_value.re).exp()
    };
    let rel_error = out.rel_change + prep.tail_rel * peak_to_value + rounding_error(f, out.cancellation);
    let est = IntegralEstimate::from_log(
        log_value,
        rel_error,
        out.nodes,
        method,
        out.stop == Stop::Converged,
    );
    if est.converged {
        Ok(est)
    } else {
        Err(Error::NoConvergence {
            estimate: Box::new(est),
        })
    }
}

/// Relative rounding floor: a few ulps per factor evaluation, amplified by
/// cancellation in the node sum.
fn rounding_error(f: &MbIntegrand, cancellation: f64) -> f64 {
    let factors = (f.gamma_factors.len() + f.power_factors.len() + 1) as f64;
    4.0 * f64::EPSILON * factors * cancellation
}

fn preflight(f: &MbIntegrand, contour: &ContourSpec, cfg: &QuadratureConfig) -> Result<()> {
    cfg.check()?;
    if f.dim == 0 || f.dim > MAX_DIM {
        return Err(Error::UnsupportedDimension(f.dim));
    }
    require_valid(f, contour)?;
    Ok(())
}

/// Trapezoid rule with step halving on a single vertical line.
pub fn integrate_line(f: &MbIntegrand, contour: &ContourSpec, cfg: &QuadratureConfig) -> Result<IntegralEstimate> {
    if f.dim != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: f.dim,
        });
    }
    preflight(f, contour, cfg)?;
    if f.is_zero() {
        return Ok(IntegralEstimate::zero());
    }
    lattice_integral(f, contour, cfg, MethodUsed::Line)
}

/// Tensor-product trapezoid rule with joint step halving.
pub fn integrate_tensor(f: &MbIntegrand, contour: &ContourSpec, cfg: &QuadratureConfig) -> Result<IntegralEstimate> {
    preflight(f, contour, cfg)?;
    if f.is_zero() {
        return Ok(IntegralEstimate::zero());
    }
    lattice_integral(f, contour, cfg, MethodUsed::Tensor)
}

/// Randomized quasi-Monte Carlo with a logistic map per axis.
///
/// The map scale is a quarter of the slowest decay rate over lattice
/// directions, which keeps the weighted integrand bounded near the cube faces.
pub fn integrate_qmc(f: &MbIntegrand, contour: &ContourSpec, cfg: &QuadratureConfig) -> Result<IntegralEstimate> {
    preflight(f, contour, cfg)?;
    if f.is_zero() {
        return Ok(IntegralEstimate::zero());
    }
    let kappa = vec![0.25 * f.min_directional_rate()?; f.dim];
    let log_f = |t: &[f64]| f.eval_log(&point(contour, t));
    let out = qmc::integrate_cube(
        f.dim,
        &kappa,
        &log_f,
        cfg.qmc_points,
        cfg.qmc_randomizations,
        cfg.seed,
        cfg.rel_tol,
        cfg.node_budget.min(8 * cfg.qmc_points * cfg.qmc_randomizations as u64),
    )?;
    Ok(IntegralEstimate::from_log(
        out.log_value + log_measure(f.dim),
        out.rel_error,
        out.nodes,
        MethodUsed::Qmc,
        true,
    ))
}

/// Dispatch on `cfg.method`; `Auto` picks by dimension and falls back from
/// the tensor rule to QMC when the node budget is exhausted.
pub fn integrate(f: &MbIntegrand, contour: &ContourSpec, cfg: &QuadratureConfig) -> Result<IntegralEstimate> {
    match cfg.method {
        Method::Line => integrate_line(f, contour, cfg),
        Method::Tensor => integrate_tensor(f, contour, cfg),
        Method::Qmc => integrate_qmc(f, contour, cfg),
        Method::Auto => match f.dim {
            1 => integrate_line(f, contour, cfg),
            2 | 3 => match integrate_tensor(f, contour, cfg) {
                Err(Error::BudgetExceeded { .. }) => integrate_qmc(f, contour, cfg),
                other => other,
            },
            _ => integrate_qmc(f, contour, cfg),
        },
    }
}
