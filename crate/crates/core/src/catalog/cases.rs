use num_complex::Complex64;

use super::{ConstraintCheck, IdentityId, ParamMap};
use crate::error::{Error, Result};
use crate::gamma::{log_gamma, log_rgamma, log_zero};
use crate::integrand::{AffineArg, MbIntegrand};

pub(super) struct Built {
    pub lhs: MbIntegrand,
    pub rhs_log: Complex64,
    pub constraints: Vec<ConstraintCheck>,
    pub normalization_note: Option<String>,
}

const S2_NOTE: &str = "unit normalization: 2*pi*i times the delta function cancels the measure \
of the eliminated variable; fitted_normalization = lhs/rhs is reported";

/// Accumulates a closed-form log value.
struct Closed {
    log: Complex64,
    vanishes: bool,
}

impl Closed {
    fn new() -> Self {
        Self {
            log: Complex64::new(0.0, 0.0),
            vanishes: false,
        }
    }

    fn num(&mut self, z: Complex64) -> Result<&mut Self> {
        match log_gamma(z) {
            Ok(v) => self.log += v,
            Err(Error::PoleArgument(_)) => return Err(Error::RhsPole),
            Err(e) => return Err(e),
        }
        Ok(self)
    }

    fn den(&mut self, z: Complex64) -> Result<&mut Self> {
        let v = log_rgamma(z)?;
        if v.re == f64::NEG_INFINITY {
            self.vanishes = true;
        } else {
            self.log += v;
        }
        Ok(self)
    }

    fn add(&mut self, v: f64) -> &mut Self {
        self.log += v;
        self
    }

    fn finish(&self) -> Complex64 {
        if self.vanishes {
            log_zero()
        } else {
            self.log
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn factorial(n: usize) -> u64 {
    (2..=n as u64).product()
}

fn sum(v: &[Complex64]) -> Complex64 {
    v.iter().sum()
}

fn check(name: impl Into<String>, holds: bool) -> ConstraintCheck {
    ConstraintCheck {
        name: name.into(),
        holds,
    }
}

fn arg(dim: usize, constant: Complex64, terms: &[(usize, i32)]) -> AffineArg {
    let mut a = AffineArg::constant(dim, constant);
    for &(axis, c) in terms {
        a.coeffs[axis] += c;
    }
    a
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// prod_{k,j} Gamma(alpha_k - z_j) Gamma(beta_k + z_j) / prod_{k<j} Gamma(z_k - z_j) Gamma(z_j - z_k).
fn first_kind(dim: usize, alpha: &[Complex64], beta: &[Complex64]) -> MbIntegrand {
    let mut f = MbIntegrand::new(dim);
    for j in 0..dim {
        for &a in alpha {
            f.numerator(arg(dim, a, &[(j, -1)]));
        }
        for &b in beta {
            f.numerator(arg(dim, b, &[(j, 1)]));
        }
    }
    for k in 0..dim {
        for j in k + 1..dim {
            f.denominator(arg(dim, zero(), &[(k, 1), (j, -1)]));
            f.denominator(arg(dim, zero(), &[(j, 1), (k, -1)]));
        }
    }
    f
}

/// prod Gamma(alpha_k +- z_j) / prod Gamma(+-2 z_k) prod_{k<j} Gamma(z_k +- z_j) Gamma(-z_k +- z_j).
fn second_kind(dim: usize, alpha: &[Complex64]) -> MbIntegrand {
    let mut f = MbIntegrand::new(dim);
    for j in 0..dim {
        for &a in alpha {
            f.numerator(arg(dim, a, &[(j, 1)]));
            f.numerator(arg(dim, a, &[(j, -1)]));
        }
    }
    for k in 0..dim {
        f.denominator(arg(dim, zero(), &[(k, 2)]));
        f.denominator(arg(dim, zero(), &[(k, -2)]));
    }
    for k in 0..dim {
        for j in k + 1..dim {
            for (sk, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                f.denominator(arg(dim, zero(), &[(k, sk), (j, sj)]));
            }
        }
    }
    f
}

fn third_kind(dim: usize, alpha: &[Complex64], beta: &[Complex64]) -> MbIntegrand {
    let mut f = MbIntegrand::new(dim);
    for j in 0..dim {
        for &a in alpha {
            f.numerator(arg(dim, a, &[(j, -1)]));
        }
        for &b in beta {
            f.numerator(arg(dim, b, &[(j, 1)]));
            f.numerator(arg(dim, -b, &[(j, 1)]));
        }
    }
    for k in 0..dim {
        for j in k + 1..dim {
            f.denominator(arg(dim, zero(), &[(k, 1), (j, 1)]));
            f.denominator(arg(dim, zero(), &[(k, 1), (j, -1)]));
            f.denominator(arg(dim, zero(), &[(j, 1), (k, -1)]));
        }
    }
    f
}

/// prod Gamma(y_k - u_j) Gamma(x_k + u_j) / prod_{i != j} Gamma(u_i - u_j) over the
/// axes `axes` of a `dim`-dimensional integrand.
fn type_a_core(f: &mut MbIntegrand, axes: &[usize], y: &[Complex64], x: &[Complex64]) {
    let dim = f.dim;
    for &j in axes {
        for &yk in y {
            f.numerator(arg(dim, yk, &[(j, -1)]));
        }
        for &xk in x {
            f.numerator(arg(dim, xk, &[(j, 1)]));
        }
    }
    for &i in axes {
        for &j in axes {
            if i != j {
                f.denominator(arg(dim, zero(), &[(i, 1), (j, -1)]));
            }
        }
    }
}

/// Argument constant + sign * sum of all listed axes.
fn collective(dim: usize, constant: Complex64, axes: &[usize], sign: i32) -> AffineArg {
    let terms: Vec<(usize, i32)> = axes.iter().map(|&a| (a, sign)).collect();
    arg(dim, constant, &terms)
}

fn first_kind_rhs(alpha: &[Complex64], beta: &[Complex64], n_fact: usize) -> Result<Complex64> {
    let mut r = Closed::new();
    r.add(ln_factorial(n_fact));
    for &a in alpha {
        for &b in beta {
            r.num(a + b)?;
        }
    }
    r.den(sum(alpha) + sum(beta))?;
    Ok(r.finish())
}

fn pair_sum_rhs(r: &mut Closed, alpha: &[Complex64]) -> Result<()> {
    for k in 0..alpha.len() {
        for j in k + 1..alpha.len() {
            r.num(alpha[k] + alpha[j])?;
        }
    }
    Ok(())
}

fn second_kind_rhs(alpha: &[Complex64], n: usize, with_sum: bool) -> Result<Complex64> {
    let mut r = Closed::new();
    r.add(n as f64 * 2f64.ln() + ln_factorial(n));
    pair_sum_rhs(&mut r, alpha)?;
    if with_sum {
        r.den(sum(alpha))?;
    }
    Ok(r.finish())
}

fn cross_rhs(r: &mut Closed, y: &[Complex64], x: &[Complex64]) -> Result<()> {
    for &yj in y {
        for &xk in x {
            r.num(yj + xk)?;
        }
    }
    Ok(())
}

fn s_ratio_rhs(r: &mut Closed, s: Complex64, v: &[Complex64]) -> Result<()> {
    for &z in v {
        r.num(s - z)?;
        r.den(s + z)?;
    }
    Ok(())
}

fn positive_re(name: &str, v: &[Complex64]) -> ConstraintCheck {
    check(format!("Re {name}_k > 0"), v.iter().all(|z| z.re > 0.0))
}

pub(super) fn build(id: IdentityId, n: usize, p: &ParamMap) -> Result<Built> {
    let get = |name: &str| p[name].as_slice();
    let i = Complex64::i();
    let mut constraints = Vec::new();
    let mut note = None;
    use IdentityId::*;
    let (lhs, rhs_log) = match id {
        G1 | Barnes1 => {
            let (alpha, beta) = if id == G1 { (get("alpha"), get("beta")) } else { (get("a"), get("b")) };
            (first_kind(n, alpha, beta), first_kind_rhs(alpha, beta, n)?)
        }
        G2 => {
            let alpha = get("alpha");
            (second_kind(n, alpha), second_kind_rhs(alpha, n, true)?)
        }
        G2a => {
            let alpha = get("alpha");
            (second_kind(n, alpha), second_kind_rhs(alpha, n, false)?)
        }
        G3 => {
            let (alpha, beta) = (get("alpha"), get("beta"));
            let distinct = (0..alpha.len())
                .all(|k| (k + 1..alpha.len()).all(|j| (alpha[k] - alpha[j]).norm() > 1e-12));
            constraints.push(check("alpha pairwise distinct", distinct));
            let mut r = Closed::new();
            r.add(ln_factorial(n));
            for &b in beta {
                for &a in alpha {
                    r.num(a + b)?;
                    r.num(a - b)?;
                }
            }
            for k in 0..alpha.len() {
                for j in k + 1..alpha.len() {
                    r.den(alpha[k] + alpha[j])?;
                }
            }
            (third_kind(n, alpha, beta), r.finish())
        }
        Iw => {
            let (a, b) = (get("a"), get("b"));
            let zeta = get("zeta")[0];
            constraints.push(check("zeta > 0", zeta.im == 0.0 && zeta.re > 0.0));
            if !(zeta.im == 0.0 && zeta.re > 0.0) {
                return Err(Error::ConstraintViolated("zeta > 0".into()));
            }
            let mut f = first_kind(n, a, b);
            f.symmetry_divisor = factorial(n);
            f.power(zeta.re, collective(n, zero(), &(0..n).collect::<Vec<_>>(), 1));
            let mut r = Closed::new();
            cross_rhs(&mut r, a, b)?;
            r.log += sum(a) * zeta.re.ln() - (sum(a) + sum(b)) * (1.0 + zeta.re).ln();
            (f, r.finish())
        }
        Tba => {
            let (x, xp) = (get("x"), get("xp"));
            constraints.push(check("Im x_k > 0", x.iter().all(|z| z.im > 0.0)));
            constraints.push(check("Im xp_k > 0", xp.iter().all(|z| z.im > 0.0)));
            let alpha: Vec<Complex64> = xp.iter().map(|v| i * v.conj()).collect();
            let beta: Vec<Complex64> = x.iter().map(|v| -i * v).collect();
            let m = n - 1;
            let mut f = first_kind(m, &alpha, &beta);
            f.symmetry_divisor = factorial(m);
            (f, first_kind_rhs(&alpha, &beta, 0)?)
        }
        Abop => {
            let (x, xp) = (get("x"), get("xp"));
            constraints.push(check("Im x_k > 0", x.iter().all(|z| z.im > 0.0)));
            constraints.push(check("Im xp_k < 0", xp.iter().all(|z| z.im < 0.0)));
            let alpha: Vec<Complex64> = xp
                .iter()
                .map(|v| i * v)
                .chain(x.iter().map(|v| -i * v))
                .collect();
            let m = n - 1;
            let mut f = second_kind(m, &alpha);
            // du/(4 pi) is half of dz/(2 pi i) per variable.
            f.symmetry_divisor = factorial(m) << m;
            let mut r = Closed::new();
            pair_sum_rhs(&mut r, &alpha)?;
            r.den(sum(&alpha))?;
            (f, r.finish())
        }
        S1 => {
            let (y, x) = (get("y"), get("x"));
            constraints.push(positive_re("x", x));
            constraints.push(positive_re("y", y));
            let nu = sum(y) + sum(x);
            let axes: Vec<usize> = (0..n).collect();
            let mut f = MbIntegrand::new(n);
            type_a_core(&mut f, &axes, y, x);
            for &j in &axes {
                f.denominator(arg(n, nu, &[(j, 1)]));
            }
            f.symmetry_divisor = factorial(n);
            let mut r = Closed::new();
            cross_rhs(&mut r, y, x)?;
            for &xk in x {
                r.den(nu - xk)?;
            }
            (f, r.finish())
        }
        S2 => {
            let (y, x) = (get("y"), get("x"));
            constraints.push(positive_re("x", x));
            constraints.push(positive_re("y", y));
            let axes: Vec<usize> = (0..n).collect();
            let mut full = MbIntegrand::new(n);
            type_a_core(&mut full, &axes, y, x);
            full.symmetry_divisor = factorial(n);
            let f = full.reduce_delta_constraint(n - 1)?;
            let big_x = sum(x);
            let mut r = Closed::new();
            for &xk in x {
                r.num(big_x - xk)?;
            }
            for &yk in y {
                r.den(big_x + yk)?;
            }
            cross_rhs(&mut r, y, x)?;
            note = Some(S2_NOTE.to_string());
            (f, r.finish())
        }
        S3 | Barnes2 => {
            let (y, x, nu) = (get("y"), get("x"), get("nu")[0]);
            let (big_x, big_y) = (sum(x), sum(y));
            constraints.push(positive_re("x", x));
            constraints.push(positive_re("y", y));
            constraints.push(check("Re nu > Re X", nu.re > big_x.re));
            let axes: Vec<usize> = (0..n).collect();
            let mut f = MbIntegrand::new(n);
            f.numerator(collective(n, nu - big_x, &axes, -1));
            f.denominator(collective(n, nu + big_y, &axes, -1));
            type_a_core(&mut f, &axes, y, x);
            f.symmetry_divisor = factorial(n);
            let mut r = Closed::new();
            for (&xk, &yk) in x.iter().zip(y) {
                r.num(nu - xk)?;
                r.den(nu + yk)?;
            }
            cross_rhs(&mut r, y, x)?;
            r.den(big_x + big_y)?;
            (f, r.finish())
        }
        S4 | S5 => {
            let (y, x, s) = (get("y"), get("x"), get("s")[0]);
            let (big_x, big_y) = (sum(x), sum(y));
            constraints.push(positive_re("x", x));
            constraints.push(positive_re("y", y));
            constraints.push(check("Re s > Re X", s.re > big_x.re));
            let f = if id == S4 {
                constraints.push(check("Re X > Re y_k", y.iter().all(|z| big_x.re > z.re)));
                s4_integrand(n, y, x, s)
            } else {
                constraints.push(check("Re(X - Y) > 0", big_x.re > big_y.re));
                s5_integrand(n, y, x, s)
            };
            let mut r = Closed::new();
            s_ratio_rhs(&mut r, s, x)?;
            s_ratio_rhs(&mut r, s, y)?;
            cross_rhs(&mut r, y, x)?;
            (f, r.finish())
        }
    };
    Ok(Built {
        lhs,
        rhs_log,
        constraints,
        normalization_note: note,
    })
}

fn s4_integrand(n: usize, y: &[Complex64], x: &[Complex64], s: Complex64) -> MbIntegrand {
    let big_x = sum(x);
    let axes: Vec<usize> = (0..n).collect();
    let mut f = MbIntegrand::new(n);
    f.numerator(collective(n, s - big_x, &axes, -1));
    f.denominator(collective(n, s + big_x, &axes, 1));
    for &yk in y {
        f.numerator(collective(n, big_x - yk, &axes, 1));
    }
    for &k in &axes {
        let mut a = collective(n, big_x, &axes, 1);
        a.coeffs[k] -= 1;
        f.denominator(a);
    }
    type_a_core(&mut f, &axes, y, x);
    f.symmetry_divisor = factorial(n);
    f
}

/// Axis 0 is nu, axes 1..n are u_1..u_{n-1}.
fn s5_integrand(n: usize, y: &[Complex64], x: &[Complex64], s: Complex64) -> MbIntegrand {
    let (big_x, big_y) = (sum(x), sum(y));
    let u: Vec<usize> = (1..n).collect();
    let mut f = MbIntegrand::new(n);
    f.numerator(arg(n, s - big_x, &[(0, -1)]));
    f.denominator(arg(n, s + big_x, &[(0, 1)]));
    for &xk in x {
        f.numerator(arg(n, big_x - xk, &[(0, 1)]));
    }
    for &k in &u {
        f.denominator(arg(n, big_x, &[(0, 1), (k, 1)]));
    }
    f.numerator(arg(n, big_y, &[(0, -1)]));
    let mut a = collective(n, big_x - big_y, &u, 1);
    a.coeffs[0] += 1;
    f.numerator(a);
    f.denominator(collective(n, big_x, &u, 1));
    type_a_core(&mut f, &u, y, x);
    f.symmetry_divisor = factorial(n - 1);
    f
}
