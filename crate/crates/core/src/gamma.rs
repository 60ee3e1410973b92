//! Complex log-Gamma and related helpers.
//!
//! Values are carried as complex logarithms so that products of many Gamma
//! factors neither overflow nor underflow. Imaginary parts follow the
//! principal-sum convention and are only meaningful modulo 2*pi.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance to a non-positive integer at which an argument counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_RADIUS: f64 = 12.0;

// B_{2k} / (2k (2k - 1)) for k = 1..=10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Log of zero, used for factors 1/Gamma evaluated at a pole.
pub fn log_zero() -> Complex64 {
    Complex64::new(f64::NEG_INFINITY, 0.0)
}

pub fn is_pole(z: Complex64) -> bool {
    let nearest = z.re.round();
    nearest <= 0.0 && (z.re - nearest).abs() < POLE_TOLERANCE && z.im.abs() < POLE_TOLERANCE
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(z))
    }
}

/// Complex logarithm of Gamma(z).
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    check_finite(z)?;
    if is_pole(z) {
        return Err(Error::PoleArgument(z));
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        Ok(Complex64::new(PI.ln(), 0.0) - log_sin_pi(z) - stirling(one_minus))
    } else {
        Ok(stirling(z))
    }
}

/// Log of 1/Gamma(z); the log of zero at poles.
pub fn log_rgamma(z: Complex64) -> Result<Complex64> {
    match log_gamma(z) {
        Ok(v) => Ok(-v),
        Err(Error::PoleArgument(_)) => Ok(log_zero()),
        Err(e) => Err(e),
    }
}

fn stirling(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut shift = Complex64::new(1.0, 0.0);
    let mut shifted = false;
    while w.norm() < STIRLING_RADIUS {
        shift *= w;
        w += 1.0;
        shifted = true;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut term = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for c in STIRLING_COEFFS {
        series += term * c;
        term *= inv2;
    }
    let mut out = (w - 0.5) * w.ln() - w + HALF_LN_TWO_PI + series;
    if shifted {
        out -= shift.ln();
    }
    out
}

/// log sin(pi z), stable for large |Im z|.
fn log_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im > 1.0 {
        // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})
        let q = (i * 2.0 * PI * z).exp();
        -i * PI * z + (Complex64::new(1.0, 0.0) - q).ln() + Complex64::new(0.5f64.ln(), PI / 2.0)
    } else if z.im < -1.0 {
        // sin(pi z) = (-i/2) e^{i pi z} (1 - e^{-2 i pi z})
        let q = (-i * 2.0 * PI * z).exp();
        i * PI * z + (Complex64::new(1.0, 0.0) - q).ln() + Complex64::new(0.5f64.ln(), -PI / 2.0)
    } else {
        (z * PI).sin().ln()
    }
}

/// Sum of log-Gamma over `num` minus the sum over `den`.
///
/// A pole in `den` makes the ratio vanish; the result then has real part
/// negative infinity. A pole in `num` is an error.
pub fn gamma_ratio_log(num: &[Complex64], den: &[Complex64]) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &z in num {
        acc += log_gamma(z)?;
    }
    let mut vanishes = false;
    for &z in den {
        let r = log_rgamma(z)?;
        if r.re == f64::NEG_INFINITY {
            vanishes = true;
        } else {
            acc += r;
        }
    }
    Ok(if vanishes { log_zero() } else { acc })
}

/// Log of Gamma(2s) Gamma(alpha + beta - 2s) / (Gamma(alpha) Gamma(beta)).
///
/// Symmetric in (alpha, beta) bit for bit.
pub fn chain_constant(alpha: Complex64, beta: Complex64, s: f64) -> Result<Complex64> {
    let (a, b) = if (alpha.re, alpha.im) <= (beta.re, beta.im) {
        (alpha, beta)
    } else {
        (beta, alpha)
    };
    let two_s = Complex64::new(2.0 * s, 0.0);
    gamma_ratio_log(&[two_s, a + b - two_s], &[a, b])
}

/// Principal power exp(exponent * log(base)).
pub fn complex_power(base: Complex64, exponent: Complex64) -> Result<Complex64> {
    check_finite(base)?;
    check_finite(exponent)?;
    if base.re == 0.0 && base.im == 0.0 {
        return Err(Error::ZeroBase);
    }
    Ok((exponent * base.ln()).exp())
}

/// Wrap a phase into (-pi, pi].
pub fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Convert a complex logarithm into a plain value.
pub fn exp_log(log: Complex64) -> Complex64 {
    if log.re == f64::NEG_INFINITY {
        Complex64::new(0.0, 0.0)
    } else {
        log.exp()
    }
}
