//! Nested trapezoid rule on an integer lattice with step halving.

use num_complex::Complex64;
use rayon::prelude::*;

use super::accum::{rel_change, LogSum};
use crate::error::Result;

const CHUNK: usize = 1 << 15;

/// Coordinate range of `axis`, given the coordinates of earlier axes.
pub type ExtentFn<'a> = dyn Fn(usize, &[f64]) -> (f64, f64) + Sync + 'a;
/// Complex log of the integrand (without the rule weight) at a node.
pub type LogFn<'a> = dyn Fn(&[f64]) -> Result<Complex64> + Sync + 'a;

pub struct Lattice<'a> {
    pub dim: usize,
    pub extent: &'a ExtentFn<'a>,
    pub log_f: &'a LogFn<'a>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stop {
    Converged,
    MaxRefinements,
    Budget { needed: u64 },
}

#[derive(Clone, Debug)]
pub struct LatticeOutcome {
    /// Complex log of h^d times the node sum at the finest level.
    pub log_value: Complex64,
    pub rel_change: f64,
    /// sum |f| / |sum f| at the finest level, at least 1.
    pub cancellation: f64,
    pub nodes: u64,
    pub levels: u32,
    pub step: f64,
    pub stop: Stop,
}

pub struct RefineSettings {
    pub initial_step: f64,
    pub rel_tol: f64,
    pub max_refinements: u32,
    pub node_budget: u64,
    pub min_levels: u32,
}

impl Lattice<'_> {
    fn index_range(&self, axis: usize, coords: &[f64], h: f64) -> (i64, i64) {
        let (lo, hi) = (self.extent)(axis, coords);
        ((lo / h).ceil() as i64, (hi / h).floor() as i64)
    }

    fn count(&self, h: f64) -> u64 {
        let mut coords = vec![0.0; self.dim];
        self.count_from(0, h, &mut coords)
    }

    fn count_from(&self, axis: usize, h: f64, coords: &mut [f64]) -> u64 {
        let (a, b) = self.index_range(axis, &coords[..axis], h);
        if b < a {
            return 0;
        }
        if axis + 1 == self.dim {
            return (b - a + 1) as u64;
        }
        let mut n = 0;
        for k in a..=b {
            coords[axis] = k as f64 * h;
            n += self.count_from(axis + 1, h, coords);
        }
        n
    }

    fn walk(
        &self,
        axis: usize,
        h: f64,
        idx: &mut Vec<i64>,
        coords: &mut Vec<f64>,
        sink: &mut dyn FnMut(&[i64]) -> Result<()>,
    ) -> Result<()> {
        let (a, b) = self.index_range(axis, &coords[..axis], h);
        for k in a..=b {
            idx[axis] = k;
            coords[axis] = k as f64 * h;
            if axis + 1 == self.dim {
                sink(idx)?;
            } else {
                self.walk(axis + 1, h, idx, coords, sink)?;
            }
        }
        Ok(())
    }

    fn flush(&self, buf: &mut Vec<i64>, h: f64, acc: &mut LogSum) -> Result<()> {
        let d = self.dim;
        let logs: Vec<Result<Complex64>> = buf
            .par_chunks(d)
            .map(|idx| {
                let coords: Vec<f64> = idx.iter().map(|&k| k as f64 * h).collect();
                (self.log_f)(&coords)
            })
            .collect();
        for v in logs {
            acc.add(v?);
        }
        buf.clear();
        Ok(())
    }

    /// Add all nodes of the level with step `h`; the first level takes every
    /// node, later levels only those with at least one odd index.
    fn add_level(&self, h: f64, first: bool, acc: &mut LogSum) -> Result<u64> {
        let mut buf: Vec<i64> = Vec::with_capacity(CHUNK * self.dim);
        let mut added = 0u64;
        let mut idx = vec![0i64; self.dim];
        let mut coords = vec![0.0; self.dim];
        let mut pending: Result<()> = Ok(());
        {
            let mut sink = |k: &[i64]| -> Result<()> {
                if !first && k.iter().all(|v| v % 2 == 0) {
                    return Ok(());
                }
                buf.extend_from_slice(k);
                added += 1;
                if buf.len() >= CHUNK * self.dim {
                    self.flush(&mut buf, h, acc)?;
                }
                Ok(())
            };
            if let Err(e) = self.walk(0, h, &mut idx, &mut coords, &mut sink) {
                pending = Err(e);
            }
        }
        pending?;
        self.flush(&mut buf, h, acc)?;
        Ok(added)
    }

    pub fn refine(&self, s: &RefineSettings) -> Result<LatticeOutcome> {
        let mut acc = LogSum::new();
        let mut h = s.initial_step;
        let mut nodes = 0u64;
        let mut prev: Option<Complex64> = None;
        let mut change = f64::INFINITY;
        let mut cancellation = 1.0f64;
        let mut level = 0u32;
        loop {
            let needed = self.count(h);
            if needed > s.node_budget {
                let log_value = match prev {
                    Some(v) => v,
                    None => Complex64::new(f64::NAN, 0.0),
                };
                return Ok(LatticeOutcome {
                    log_value,
                    rel_change: change,
                    cancellation,
                    nodes,
                    levels: level,
                    step: 2.0 * h,
                    stop: Stop::Budget { needed },
                });
            }
            nodes += self.add_level(h, prev.is_none(), &mut acc)?;
            let raw = acc.log();
            let current = raw + Complex64::new(self.dim as f64 * h.ln(), 0.0);
            if raw.re.is_finite() {
                cancellation = (acc.log_abs() - raw.re).exp().max(1.0);
            }
            if let Some(p) = prev {
                change = rel_change(current, p);
            }
            level += 1;
            prev = Some(current);
            let stop = if level >= s.min_levels && change < s.rel_tol / 4.0 {
                Some(Stop::Converged)
            } else if level > s.max_refinements {
                Some(Stop::MaxRefinements)
            } else {
                None
            };
            if let Some(stop) = stop {
                return Ok(LatticeOutcome {
                    log_value: current,
                    rel_change: change,
                    cancellation,
                    nodes,
                    levels: level,
                    step: h,
                    stop,
                });
            }
            h *= 0.5;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_converges_fast() {
        let extent = |_: usize, _: &[f64]| (-9.0, 9.0);
        let f = |t: &[f64]| Ok(Complex64::new(-t[0] * t[0], 0.0));
        let lat = Lattice {
            dim: 1,
            extent: &extent,
            log_f: &f,
        };
        let out = lat
            .refine(&RefineSettings {
                initial_step: 1.0,
                rel_tol: 1e-13,
                max_refinements: 8,
                node_budget: 1 << 20,
                min_levels: 2,
            })
            .unwrap();
        assert_eq!(out.stop, Stop::Converged);
        let want = std::f64::consts::PI.sqrt();
        assert!((out.log_value.re.exp() - want).abs() < 1e-13);
    }

    #[test]
    fn dependent_extents_cover_a_triangle() {
        // Area of {0 <= y <= x <= 1} with a smooth weight vanishing at the edges.
        let extent = |axis: usize, c: &[f64]| if axis == 0 { (0.0, 1.0) } else { (0.0, c[0]) };
        let f = |t: &[f64]| Ok(Complex64::new((t[0] * t[1] + 1.0).ln(), 0.0));
        let lat = Lattice {
            dim: 2,
            extent: &extent,
            log_f: &f,
        };
        let out = lat
            .refine(&RefineSettings {
                initial_step: 0.25,
                rel_tol: 1e-3,
                max_refinements: 8,
                node_budget: 1 << 22,
                min_levels: 2,
            })
            .unwrap();
        // Trapezoid on a triangle is only first order; just check the area scale.
        let v = out.log_value.re.exp();
        assert!((v - 0.625).abs() < 0.05, "{v}");
    }
}
