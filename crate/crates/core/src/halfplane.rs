//! Upper half-plane integrals: the two-propagator chain rule and the
//! transition element between power-law and plane-wave functions.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde_json::json;

use crate::catalog::verify::compare_logs;
use crate::error::{Error, Result};
use crate::gamma::{chain_constant, log_gamma};
use crate::quadrature::grid::{Lattice, RefineSettings, Stop};
use crate::quadrature::{MethodUsed, QuadratureConfig};
use crate::report::{classify, Status, ValueReport, VerificationReport};

/// A point x + iy with y > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::DomainViolation(format!(
                "point {x} + {y}i is not in the open upper half-plane"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn translate(&self, t: f64) -> Self {
        Self { x: self.x + t, y: self.y }
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self {
            x: self.x * lambda,
            y: self.y * lambda,
        }
    }
}

fn check_spin(s: f64) -> Result<()> {
    if s > 0.5 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::BadSpin(s))
    }
}

/// Density ((2s - 1)/pi) (2y)^(2s - 2) of the spin-s measure.
pub fn measure_weight(point: HalfPlanePoint, s: f64) -> Result<f64> {
    check_spin(s)?;
    Ok((2.0 * s - 1.0) / PI * (2.0 * point.y).powf(2.0 * s - 2.0))
}

fn log_measure(s: f64, y: f64) -> f64 {
    ((2.0 * s - 1.0) / PI).ln() + (2.0 * s - 2.0) * (2.0 * y).ln()
}

/// log of (i/(z - conj w))^alpha for z, conj w given directly.
fn log_propagator(z: Complex64, w_conj: Complex64, alpha: Complex64) -> Complex64 {
    alpha * (Complex64::i() / (z - w_conj)).ln()
}

/// (i/(z - conj(w)))^alpha, principal branch.
pub fn propagator(z: HalfPlanePoint, w: HalfPlanePoint, alpha: Complex64) -> Complex64 {
    log_propagator(z.z(), w.z().conj(), alpha).exp()
}

/// Widen `bound` by factors of 1.25 until `edge(bound)` drops `threshold`
/// below `peak`.
fn widen(mut bound: f64, peak: f64, threshold: f64, edge: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..30 {
        if edge(bound) < peak - threshold {
            break;
        }
        bound *= 1.25;
    }
    bound
}

fn max_over(lo: f64, hi: f64, steps: usize, f: impl Fn(f64) -> f64) -> f64 {
    (0..=steps)
        .map(|k| f(lo + (hi - lo) * k as f64 / steps as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn settings(cfg: &QuadratureConfig) -> RefineSettings {
    RefineSettings {
        initial_step: cfg.initial_step,
        rel_tol: cfg.rel_tol,
        max_refinements: cfg.max_refinements,
        node_budget: cfg.node_budget,
        min_levels: 3,
    }
}

struct HalfPlaneRun {
    identity: &'static str,
    params: serde_json::Value,
    rhs_log: Complex64,
    anchor: &'static str,
}

fn finish(
    run: HalfPlaneRun,
    outcome: Result<crate::quadrature::grid::LatticeOutcome>,
    rel_tol: f64,
    start: Instant,
) -> Result<VerificationReport> {
    let out = outcome?;
    let mut report = VerificationReport {
        identity: run.identity.to_string(),
        n: 0,
        params: run.params,
        contour: None,
        lhs: None,
        rhs: ValueReport::from_log(run.rhs_log, 0.0),
        rel_deviation: None,
        rel_tol,
        status: Status::Inconclusive,
        method: Some(MethodUsed::Tensor),
        nodes: out.nodes,
        runtime_s: 0.0,
        normalization_note: None,
        fitted_normalization: None,
        anchor: run.anchor.to_string(),
        notes: Vec::new(),
    };
    match out.stop {
        Stop::Budget { needed } => {
            report.notes.push(format!("node budget exceeded (needed {needed})"));
            if out.levels == 0 {
                report.runtime_s = start.elapsed().as_secs_f64();
                return Ok(report);
            }
        }
        Stop::MaxRefinements => report.notes.push("refinement limit reached".into()),
        Stop::Converged => {}
    }
    let lhs_rel_error = out.rel_change + 32.0 * f64::EPSILON * out.cancellation;
    let (deviation, rel_error) = compare_logs(out.log_value, lhs_rel_error, run.rhs_log);
    report.lhs = Some(ValueReport::from_log(out.log_value, lhs_rel_error));
    report.rel_deviation = Some(deviation);
    report.status = if out.stop == Stop::Converged {
        classify(deviation, rel_error, rel_tol)
    } else {
        Status::Inconclusive
    };
    report.runtime_s = start.elapsed().as_secs_f64();
    Ok(report)
}

fn cx_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

/// Log-integrand of the chain rule in coordinates (tau, t):
/// v = e^tau, u = x0 + (c0 + v) sinh t, w = u + iv.
fn chain_integrand(
    s: f64,
    alpha: Complex64,
    beta: Complex64,
    z: Complex64,
    zeta_conj: Complex64,
) -> impl Fn(f64, f64) -> Complex64 {
    let x0 = 0.5 * (z.re - zeta_conj.re);
    let c0 = 0.5 * (z.im - zeta_conj.im);
    move |tau: f64, t: f64| {
        let v = tau.exp();
        let sc = c0 + v;
        let w = Complex64::new(x0 + sc * t.sinh(), v);
        let jac = (sc * t.cosh() * v).ln();
        Complex64::new(log_measure(s, v) + jac, 0.0)
            + log_propagator(z, w.conj(), alpha)
            + log_propagator(w, zeta_conj, beta)
    }
}

/// Check that the spin-s integral of D_alpha(z, w^*) D_beta(w, zeta^*) equals
/// the chain constant times D_{alpha+beta-2s}(z, zeta^*).
pub fn verify_chain_rule(
    s: f64,
    alpha: Complex64,
    beta: Complex64,
    z: HalfPlanePoint,
    zeta: HalfPlanePoint,
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    let start = Instant::now();
    check_spin(s)?;
    let half = s - 0.5;
    if !(alpha.re > half && beta.re > half && alpha.re + beta.re > 2.0 * s) {
        return Err(Error::DomainViolation(format!(
            "need Re alpha, Re beta > s - 1/2 and Re(alpha + beta) > 2s; got alpha={alpha}, beta={beta}, s={s}"
        )));
    }
    let zeta_conj = zeta.z().conj();
    let gamma_exp = alpha + beta - 2.0 * s;
    let rhs_log = chain_constant(alpha, beta, s)? + log_propagator(z.z(), zeta_conj, gamma_exp);

    let f = chain_integrand(s, alpha, beta, z.z(), zeta_conj);
    let thr = cfg.truncation_log_threshold;
    let sum_re = alpha.re + beta.re;
    let t_rate = sum_re - 1.0;
    let mut t_max = (thr + 10.0) / t_rate;
    let mut tau_lo = -(thr + 10.0) / (2.0 * s - 1.0);
    let mut tau_hi = (thr + 10.0) / (sum_re - 2.0 * s);
    tau_lo = tau_lo.max(-600.0);
    tau_hi = tau_hi.min(600.0);
    let peak = {
        let g = |tau: f64| max_over(-t_max, t_max, 200, |t| f(tau, t).re);
        max_over(tau_lo, tau_hi, 200, g)
    };
    tau_lo = -widen(-tau_lo, peak, thr, |b| max_over(-t_max, t_max, 200, |t| f(-b, t).re)).min(600.0);
    tau_hi = widen(tau_hi, peak, thr, |b| max_over(-t_max, t_max, 200, |t| f(b, t).re)).min(600.0);
    t_max = widen(t_max, peak, thr, |b| {
        max_over(tau_lo, tau_hi, 400, |tau| f(tau, b).re.max(f(tau, -b).re))
    })
    .min(700.0);

    let extent = move |axis: usize, _: &[f64]| {
        if axis == 0 {
            (tau_lo, tau_hi)
        } else {
            (-t_max, t_max)
        }
    };
    let log_f = |c: &[f64]| Ok(f(c[0], c[1]));
    let lattice = Lattice {
        dim: 2,
        extent: &extent,
        log_f: &log_f,
    };
    let run = HalfPlaneRun {
        identity: "halfplane-chain-rule",
        params: json!({
            "s": s,
            "alpha": cx_json(alpha),
            "beta": cx_json(beta),
            "z": cx_json(z.z()),
            "zeta": cx_json(zeta.z()),
        }),
        rhs_log,
        anchor: "Half-plane chain rule for two propagators",
    };
    finish(run, lattice.refine(&settings(cfg)), cfg.rel_tol, start)
}

/// Check that the spin-s scalar product of the power-law function M_nu with
/// the plane wave E_p equals p^(-i nu - 1/2).
///
/// The x integral of each row runs along x = y (sinh t + i (cosh t - 1)),
/// which turns the oscillating factor e^{ipx} into a decaying one; the
/// conjugated power is continued analytically with conj(z) = x - iy.
pub fn verify_transition_element(s: f64, nu: f64, p: f64, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    check_spin(s)?;
    if !(p > 0.0 && p.is_finite()) || !nu.is_finite() {
        return Err(Error::DomainViolation(format!("need p > 0 and finite nu; got p={p}, nu={nu}")));
    }
    let i = Complex64::i();
    let rhs_log = (Complex64::new(-0.5, -nu)) * p.ln();
    let power = Complex64::new(s, -nu);
    let constant = log_gamma(power)? - log_gamma(Complex64::new(2.0 * s, 0.0))?
        + (s - 0.5) * p.ln();
    let deform = 1.0;
    let f = move |tau: f64, t: f64| -> Complex64 {
        let y = tau.exp();
        let x = y * Complex64::new(t.sinh(), deform * (t.cosh() - 1.0));
        let dx = y * Complex64::new(t.cosh(), deform * t.sinh());
        let zbar = x - i * y;
        let z = x + i * y;
        constant
            + log_measure(s, y)
            + y.ln()
            + dx.ln()
            + power * (-i / zbar).ln()
            + i * p * z
    };
    let thr = cfg.truncation_log_threshold;
    let rate_lo = s.min(2.0 * s - 1.0);
    let tau_lo = -(thr + 10.0) / rate_lo - 2.0;
    let tau_hi = ((thr + 10.0) / p).ln() + 2.0;
    let cutoff = thr + 10.0;
    let extent = move |axis: usize, c: &[f64]| {
        if axis == 0 {
            (tau_lo, tau_hi)
        } else {
            let y = c[0].exp();
            let t = (1.0 + cutoff / (p * y * deform)).acosh() + 1.0;
            (-t, t)
        }
    };
    let log_f = |c: &[f64]| Ok(f(c[0], c[1]));
    let lattice = Lattice {
        dim: 2,
        extent: &extent,
        log_f: &log_f,
    };
    let run = HalfPlaneRun {
        identity: "halfplane-transition",
        params: json!({"s": s, "nu": nu, "p": p}),
        rhs_log,
        anchor: "Transition element between power-law and plane-wave functions",
    };
    finish(run, lattice.refine(&settings(cfg)), cfg.rel_tol, start)
}
