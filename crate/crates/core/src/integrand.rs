//! Products of Gamma factors with affine arguments in the integration
//! variables.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{log_gamma, log_rgamma, log_zero};

/// `constant + sum_j coeffs[j] * z_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineArg {
    pub constant: Complex64,
    pub coeffs: Vec<i32>,
}

impl AffineArg {
    pub fn new(constant: Complex64, coeffs: Vec<i32>) -> Self {
        Self { constant, coeffs }
    }

    pub fn constant(dim: usize, constant: Complex64) -> Self {
        Self::new(constant, vec![0; dim])
    }

    /// `constant + coeff * z_axis`.
    pub fn single(dim: usize, constant: Complex64, axis: usize, coeff: i32) -> Self {
        let mut coeffs = vec![0; dim];
        coeffs[axis] = coeff;
        Self::new(constant, coeffs)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        let mut out = self.constant;
        for (&c, &z) in self.coeffs.iter().zip(point) {
            match c {
                0 => {}
                1 => out += z,
                -1 => out -= z,
                _ => out += z * c as f64,
            }
        }
        out
    }

    /// Real part of the argument on the contour with the given offsets.
    pub fn real_part_at(&self, offsets: &[f64]) -> f64 {
        self.constant.re
            + self
                .coeffs
                .iter()
                .zip(offsets)
                .map(|(&c, &o)| c as f64 * o)
                .sum::<f64>()
    }

    fn eliminate(&self, axis: usize) -> Self {
        let ce = self.coeffs[axis];
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != axis)
            .map(|(_, &c)| c - ce)
            .collect();
        Self::new(self.constant, coeffs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Numerator,
    Denominator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub arg: AffineArg,
    pub placement: Placement,
    pub multiplicity: u32,
}

/// `base^(exponent)` with a positive real base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFactor {
    pub base: f64,
    pub exponent: AffineArg,
}

/// exp(log_prefactor) / symmetry_divisor * prod powers * prod Gamma^(+-mult).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MbIntegrand {
    pub dim: usize,
    pub gamma_factors: Vec<GammaFactor>,
    pub power_factors: Vec<PowerFactor>,
    pub log_prefactor: Complex64,
    pub symmetry_divisor: u64,
}

impl MbIntegrand {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            gamma_factors: Vec::new(),
            power_factors: Vec::new(),
            log_prefactor: Complex64::new(0.0, 0.0),
            symmetry_divisor: 1,
        }
    }

    pub fn numerator(&mut self, arg: AffineArg) -> &mut Self {
        self.push(arg, Placement::Numerator)
    }

    pub fn denominator(&mut self, arg: AffineArg) -> &mut Self {
        self.push(arg, Placement::Denominator)
    }

    fn push(&mut self, arg: AffineArg, placement: Placement) -> &mut Self {
        debug_assert_eq!(arg.dim(), self.dim);
        self.gamma_factors.push(GammaFactor {
            arg,
            placement,
            multiplicity: 1,
        });
        self
    }

    pub fn power(&mut self, base: f64, exponent: AffineArg) -> &mut Self {
        self.power_factors.push(PowerFactor { base, exponent });
        self
    }

    pub fn is_zero(&self) -> bool {
        self.log_prefactor.re == f64::NEG_INFINITY
    }

    /// Complex log of the integrand at `point`, including the divisor.
    pub fn eval_log(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        for z in point {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(*z));
            }
        }
        if self.is_zero() {
            return Ok(log_zero());
        }
        let mut acc = self.log_prefactor - (self.symmetry_divisor as f64).ln();
        let mut vanishes = false;
        for (index, f) in self.gamma_factors.iter().enumerate() {
            let arg = f.arg.eval(point);
            let m = f.multiplicity as f64;
            match f.placement {
                Placement::Numerator => match log_gamma(arg) {
                    Ok(v) => acc += v * m,
                    Err(Error::PoleArgument(_)) => {
                        return Err(Error::NumeratorPole { factor: index })
                    }
                    Err(e) => return Err(e),
                },
                Placement::Denominator => {
                    let v = log_rgamma(arg)?;
                    if v.re == f64::NEG_INFINITY {
                        vanishes = true;
                    } else {
                        acc += v * m;
                    }
                }
            }
        }
        if vanishes {
            return Ok(log_zero());
        }
        for p in &self.power_factors {
            acc += p.exponent.eval(point) * p.base.ln();
        }
        Ok(acc)
    }

    /// Gamma factors expanded by multiplicity, in a canonical order.
    pub fn factor_multiset(&self) -> Vec<(Placement, AffineArg)> {
        let mut out: Vec<(Placement, AffineArg)> = self
            .gamma_factors
            .iter()
            .flat_map(|f| std::iter::repeat_n((f.placement, f.arg.clone()), f.multiplicity as usize))
            .collect();
        out.sort_by(|a, b| {
            (a.0 as u8, &a.1.coeffs)
                .cmp(&(b.0 as u8, &b.1.coeffs))
                .then(a.1.constant.re.total_cmp(&b.1.constant.re))
                .then(a.1.constant.im.total_cmp(&b.1.constant.im))
        });
        out
    }

    /// Same dimension, Gamma factor multiset and power factors, with
    /// constants compared to absolute tolerance `tol`. Prefactor and
    /// divisor are not compared.
    pub fn same_factors(&self, other: &MbIntegrand, tol: f64) -> bool {
        let close = |a: &AffineArg, b: &AffineArg| a.coeffs == b.coeffs && (a.constant - b.constant).norm() <= tol;
        let (fa, fb) = (self.factor_multiset(), other.factor_multiset());
        self.dim == other.dim
            && fa.len() == fb.len()
            && fa.iter().zip(&fb).all(|(a, b)| a.0 == b.0 && close(&a.1, &b.1))
            && self.power_factors.len() == other.power_factors.len()
            && self
                .power_factors
                .iter()
                .zip(&other.power_factors)
                .all(|(a, b)| (a.base - b.base).abs() <= tol * a.base.abs() && close(&a.exponent, &b.exponent))
    }

    /// Exponential decay rate along each axis on vertical lines.
    pub fn decay_rates(&self) -> Result<Vec<f64>> {
        (0..self.dim)
            .map(|axis| {
                let mut net = 0i64;
                for f in &self.gamma_factors {
                    let w = f.arg.coeffs[axis].unsigned_abs() as i64 * f.multiplicity as i64;
                    match f.placement {
                        Placement::Numerator => net += w,
                        Placement::Denominator => net -= w,
                    }
                }
                let rate = PI / 2.0 * net as f64;
                if rate > 0.0 {
                    Ok(rate)
                } else {
                    Err(Error::NonDecaying { axis, rate })
                }
            })
            .collect()
    }

    /// Smallest exponential decay rate per unit L1 length over the lattice
    /// directions {-1, 0, 1}^dim.
    pub fn min_directional_rate(&self) -> Result<f64> {
        let rates = self.decay_rates()?;
        let mut best = rates.iter().cloned().fold(f64::INFINITY, f64::min);
        let total = 3usize.pow(self.dim as u32);
        let mut u = vec![0i64; self.dim];
        for code in 0..total {
            let mut c = code;
            for x in u.iter_mut() {
                *x = (c % 3) as i64 - 1;
                c /= 3;
            }
            let l1: i64 = u.iter().map(|x| x.abs()).sum();
            if l1 == 0 {
                continue;
            }
            let mut net = 0i64;
            for f in &self.gamma_factors {
                let dot: i64 = f.arg.coeffs.iter().zip(&u).map(|(&a, &b)| a as i64 * b).sum();
                let w = dot.abs() * f.multiplicity as i64;
                match f.placement {
                    Placement::Numerator => net += w,
                    Placement::Denominator => net -= w,
                }
            }
            let rate = PI / 2.0 * net as f64 / l1 as f64;
            if rate <= 0.0 {
                return Err(Error::NonDecaying { axis: 0, rate });
            }
            best = best.min(rate);
        }
        Ok(best)
    }

    /// Substitute `z_axis = -sum_{j != axis} z_j` and drop that axis.
    ///
    /// The factor 2*pi*i of the delta function cancels the measure
    /// dz/(2*pi*i) of the eliminated variable, so the prefactor is kept.
    pub fn reduce_delta_constraint(&self, axis: usize) -> Result<MbIntegrand> {
        if axis >= self.dim || self.dim < 2 {
            return Err(Error::BadAxis {
                axis,
                dim: self.dim,
            });
        }
        Ok(MbIntegrand {
            dim: self.dim - 1,
            gamma_factors: self
                .gamma_factors
                .iter()
                .map(|f| GammaFactor {
                    arg: f.arg.eliminate(axis),
                    placement: f.placement,
                    multiplicity: f.multiplicity,
                })
                .collect(),
            power_factors: self
                .power_factors
                .iter()
                .map(|p| PowerFactor {
                    base: p.base,
                    exponent: p.exponent.eliminate(axis),
                })
                .collect(),
            log_prefactor: self.log_prefactor,
            symmetry_divisor: self.symmetry_divisor,
        })
    }
}
