//! Independent evaluation of the Barnes first lemma integral by summing the
//! residues of the left pole series.
//!
//! Leading terms are summed directly. The remainder of each series is
//! expanded in powers of 1/n from the large-n expansion of the Gamma
//! ratio and summed with the Hurwitz zeta function, which also continues
//! the sum to parameters where the series itself diverges.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{IdentityCase, IdentityId};
use crate::error::{Error, Result};
use crate::gamma::log_gamma;

const TAIL_ORDER: usize = 14;
const ZETA_TERMS: usize = 10;
const SPLIT: usize = 16;
const CHECK_SPLIT: usize = 24;
const AGREEMENT: f64 = 1e-10;

// B_0..=B_20.
const BERNOULLI: [f64; 21] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
    -691.0 / 2730.0,
    0.0,
    7.0 / 6.0,
    0.0,
    -3617.0 / 510.0,
    0.0,
    43867.0 / 798.0,
    0.0,
    -174_611.0 / 330.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidueSum {
    pub value: Complex64,
    /// Relative disagreement between two different direct/tail splits.
    pub tail_bound: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn bernoulli_poly(m: usize, x: Complex64) -> Complex64 {
    let mut out = Complex64::new(0.0, 0.0);
    let mut xp = Complex64::new(1.0, 0.0);
    // sum_k C(m, k) B_k x^(m-k), accumulated from the highest k down.
    for k in (0..=m).rev() {
        out += xp * (binomial(m, k) * BERNOULLI[k]);
        xp *= x;
    }
    out
}

/// sum_{n >= start} n^(-s), continued analytically in s.
fn hurwitz_tail(s: Complex64, start: f64) -> Complex64 {
    let ln_n = start.ln();
    let pow = |e: Complex64| (-e * ln_n).exp();
    let mut out = pow(s - 1.0) / (s - 1.0) + pow(s) * 0.5;
    let mut rising = s;
    let mut fact = 2.0;
    for k in 1..=ZETA_TERMS {
        out += rising * pow(s + (2 * k - 1) as f64) * (BERNOULLI[2 * k] / fact);
        rising *= (s + (2 * k - 1) as f64) * (s + (2 * k) as f64);
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
    }
    out
}

/// sum_{n>=0} Gamma(n+c1) Gamma(n+c2) / (Gamma(n+1) Gamma(n+d)).
fn gamma_ratio_series(c: [Complex64; 2], d: Complex64, split: usize) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut direct = Complex64::new(0.0, 0.0);
    for n in 0..split {
        let nf = n as f64;
        let l = log_gamma(c[0] + nf)? + log_gamma(c[1] + nf)? - log_gamma(one + nf)? - log_gamma(d + nf)?;
        direct += l.exp();
    }
    let power = c[0] + c[1] - one - d;
    let mut g = [Complex64::new(0.0, 0.0); TAIL_ORDER + 1];
    for (k, gk) in g.iter_mut().enumerate().skip(1) {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let b = bernoulli_poly(k + 1, c[0]) + bernoulli_poly(k + 1, c[1])
            - bernoulli_poly(k + 1, one)
            - bernoulli_poly(k + 1, d);
        *gk = b * (sign / (k * (k + 1)) as f64);
    }
    let mut e = [Complex64::new(0.0, 0.0); TAIL_ORDER + 1];
    e[0] = one;
    for m in 1..=TAIL_ORDER {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 1..=m {
            acc += g[k] * e[m - k] * k as f64;
        }
        e[m] = acc / m as f64;
    }
    let mut tail = Complex64::new(0.0, 0.0);
    for (j, ej) in e.iter().enumerate() {
        tail += ej * hurwitz_tail(Complex64::new(j as f64, 0.0) - power, split as f64);
    }
    Ok(direct + tail)
}

fn barnes_residues(a: [Complex64; 2], b: [Complex64; 2], split: usize) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (first, other) in [(b[0], b[1]), (b[1], b[0])] {
        // Residues at z = -first - n.
        let pref = PI / ((other - first) * PI).sin();
        let series = gamma_ratio_series([a[0] + first, a[1] + first], first - other + 1.0, split)?;
        total += pref * series;
    }
    Ok(total)
}

/// Residue-sum value of a Barnes first lemma case (`barnes1` or `g1` at N = 1).
pub fn cross_check_residue(case: &IdentityCase) -> Result<ResidueSum> {
    let (a, b) = match (case.id, case.n) {
        (IdentityId::Barnes1, _) => (&case.params["a"], &case.params["b"]),
        (IdentityId::G1, 1) => (&case.params["alpha"], &case.params["beta"]),
        _ => {
            return Err(Error::SchemaMismatch(
                "residue cross-check needs a Barnes first lemma case".into(),
            ))
        }
    };
    let gap = b[0] - b[1];
    if (gap.re - gap.re.round()).abs() < 1e-9 && gap.im.abs() < 1e-9 {
        return Err(Error::SeriesDivergent(
            "b1 - b2 is an integer: the two pole series collide".into(),
        ));
    }
    let a = [a[0], a[1]];
    let b = [b[0], b[1]];
    let value = barnes_residues(a, b, SPLIT)?;
    let check = barnes_residues(a, b, CHECK_SPLIT)?;
    let tail_bound = (value - check).norm() / value.norm();
    if !(tail_bound <= AGREEMENT) {
        return Err(Error::SeriesDivergent(format!(
            "tail estimates disagree at relative level {tail_bound:.2e}"
        )));
    }
    Ok(ResidueSum { value, tail_bound })
}
