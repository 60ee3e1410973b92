//! Randomized rank-1 Kronecker sequences with a logistic change of variables.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::accum::LogSum;
use crate::error::Result;

const CHUNK: u64 = 1 << 15;

/// Generator of the R_d sequence: powers of the inverse of the positive
/// root of x^(d+1) = x + 1.
pub fn kronecker_generator(dim: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..60 {
        let f = phi.powi(dim as i32 + 1) - phi - 1.0;
        let df = (dim as f64 + 1.0) * phi.powi(dim as i32) - 1.0;
        phi -= f / df;
    }
    (1..=dim).map(|j| phi.powi(-(j as i32)).fract()).collect()
}

pub struct QmcOutcome {
    pub log_value: Complex64,
    /// Student-t scaled standard error relative to |value|.
    pub rel_error: f64,
    pub nodes: u64,
}

/// Integrate `log_f` over R^d with the substitution
/// t_j = ln(v_j / (1 - v_j)) / kappa_j, v in the unit cube.
///
/// Point counts double while the error bar exceeds `rel_tol` and
/// `max_nodes` allows another pass.
pub fn integrate_cube(
    dim: usize,
    kappa: &[f64],
    log_f: &(dyn Fn(&[f64]) -> Result<Complex64> + Sync),
    points: u64,
    randomizations: u32,
    seed: u64,
    rel_tol: f64,
    max_nodes: u64,
) -> Result<QmcOutcome> {
    let alpha = kronecker_generator(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shifts: Vec<Vec<f64>> = (0..randomizations)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    let log_kappa: f64 = kappa.iter().map(|k| k.ln()).sum();
    let node = |shift: &[f64], i: u64| -> Result<Complex64> {
        let mut t = Vec::with_capacity(dim);
        let mut log_w = -log_kappa;
        for j in 0..dim {
            let v = (shift[j] + i as f64 * alpha[j]).fract();
            if v <= 0.0 || v >= 1.0 {
                return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
            }
            t.push((v / (1.0 - v)).ln() / kappa[j]);
            log_w -= (v * (1.0 - v)).ln();
        }
        Ok(log_f(&t)? + log_w)
    };

    let mut sums = vec![LogSum::new(); randomizations as usize];
    let mut done = 0u64;
    let mut target = points;
    loop {
        for (r, shift) in shifts.iter().enumerate() {
            let mut start = done + 1;
            while start <= target {
                let end = (start + CHUNK - 1).min(target);
                let logs: Vec<Result<Complex64>> =
                    (start..=end).into_par_iter().map(|i| node(shift, i)).collect();
                for v in logs {
                    sums[r].add(v?);
                }
                start = end + 1;
            }
        }
        done = target;
        let (log_value, rel_error) = combine(&sums, done, randomizations);
        let total = done * randomizations as u64;
        if rel_error <= rel_tol || 2 * total > max_nodes {
            return Ok(QmcOutcome {
                log_value,
                rel_error,
                nodes: total,
            });
        }
        target *= 2;
    }
}

fn combine(sums: &[LogSum], n: u64, randomizations: u32) -> (Complex64, f64) {
    let logs: Vec<Complex64> = sums
        .iter()
        .map(|s| s.log() - (n as f64).ln())
        .collect();
    let scale = logs
        .iter()
        .map(|l| l.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return (Complex64::new(f64::NEG_INFINITY, 0.0), 0.0);
    }
    let plain: Vec<Complex64> = logs
        .iter()
        .map(|l| {
            if l.re == f64::NEG_INFINITY {
                Complex64::new(0.0, 0.0)
            } else {
                (l - scale).exp()
            }
        })
        .collect();
    let r = plain.len() as f64;
    let mean = plain.iter().sum::<Complex64>() / r;
    let var = plain.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / (r - 1.0);
    let se = (var / r).sqrt();
    let factor = student_t_975(randomizations.saturating_sub(1).max(1));
    let log_value = Complex64::new(scale, 0.0) + mean.ln();
    (log_value, factor * se / mean.norm())
}

/// Two-sided 95% Student-t factor for `dof` degrees of freedom.
pub fn student_t_975(dof: u32) -> f64 {
    StudentsT::new(0.0, 1.0, dof as f64)
        .map(|t| t.inverse_cdf(0.975))
        .unwrap_or(1.96)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_one_dim_is_golden_ratio() {
        let a = kronecker_generator(1);
        assert!((a[0] - 0.618_033_988_749_895).abs() < 1e-14);
    }

    #[test]
    fn t_factor_for_fifteen_dof() {
        assert!((student_t_975(15) - 2.131_449_545_559_323).abs() < 1e-9);
    }

    #[test]
    fn gaussian_in_two_dims() {
        let f = |t: &[f64]| Ok(Complex64::new(-(t[0] * t[0] + t[1] * t[1]), 0.0));
        let out = integrate_cube(2, &[1.0, 1.0], &f, 1 << 14, 8, 3, 1e-9, 1 << 18).unwrap();
        let v = out.log_value.re.exp();
        assert!((v - std::f64::consts::PI).abs() < 1e-3, "{v}");
        assert!(out.rel_error < 1e-3);
    }
}
