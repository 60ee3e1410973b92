use num_complex::Complex64;

/// Running sum of values given by their complex logarithms.
///
/// Terms are rescaled by the largest magnitude seen so far, so sums of
/// numbers far outside the f64 range stay representable. Real and imaginary
/// parts use Neumaier compensated summation. Order of `add` calls fully
/// determines the result.
#[derive(Clone, Copy, Debug)]
pub struct LogSum {
    scale: f64,
    sum: Complex64,
    comp: Complex64,
    abs_sum: f64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self {
            scale: f64::NEG_INFINITY,
            sum: Complex64::new(0.0, 0.0),
            comp: Complex64::new(0.0, 0.0),
            abs_sum: 0.0,
        }
    }

    pub fn add(&mut self, log_term: Complex64) {
        if log_term.re == f64::NEG_INFINITY {
            return;
        }
        if log_term.re > self.scale {
            if self.scale > f64::NEG_INFINITY {
                let r = (self.scale - log_term.re).exp();
                self.sum *= r;
                self.comp *= r;
                self.abs_sum *= r;
            }
            self.scale = log_term.re;
        }
        let m = (log_term.re - self.scale).exp();
        let term = Complex64::from_polar(m, log_term.im);
        neumaier(&mut self.sum.re, &mut self.comp.re, term.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, term.im);
        self.abs_sum += m;
    }

    /// Complex log of the sum; real part negative infinity for zero.
    pub fn log(&self) -> Complex64 {
        let total = self.sum + self.comp;
        if self.scale == f64::NEG_INFINITY || total.norm() == 0.0 {
            return Complex64::new(f64::NEG_INFINITY, 0.0);
        }
        Complex64::new(self.scale, 0.0) + total.ln()
    }

    /// log of the sum of magnitudes.
    pub fn log_abs(&self) -> f64 {
        if self.scale == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.scale + self.abs_sum.ln()
    }
}

/// |exp(a - b) - 1| for two complex logs, with zero handled.
pub fn rel_change(new: Complex64, old: Complex64) -> f64 {
    match (new.re == f64::NEG_INFINITY, old.re == f64::NEG_INFINITY) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        _ => {
            let d = new - old;
            (d.exp() - 1.0).norm()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_far_outside_f64_range() {
        let mut s = LogSum::new();
        s.add(Complex64::new(1000.0, 0.0));
        s.add(Complex64::new(1000.0 + 2f64.ln(), 0.0));
        let l = s.log();
        assert!((l.re - (1000.0 + 3f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn empty_sum_is_zero() {
        let mut s = LogSum::new();
        s.add(Complex64::new(f64::NEG_INFINITY, 0.0));
        assert_eq!(s.log().re, f64::NEG_INFINITY);
    }

    #[test]
    fn compensated_sum_of_many_small_terms() {
        let mut s = LogSum::new();
        s.add(Complex64::new(0.0, 0.0));
        let tiny = 1e-16f64.ln();
        for _ in 0..1_000_000 {
            s.add(Complex64::new(tiny, 0.0));
        }
        assert!((s.log().re - 1e-10f64.ln_1p()).abs() < 1e-15);
    }

    #[test]
    fn cancellation_to_zero() {
        let mut s = LogSum::new();
        s.add(Complex64::new(0.0, 0.0));
        s.add(Complex64::new(0.0, std::f64::consts::PI));
        assert!(s.log().re < -30.0);
    }
}
