//! Named complex parameters: JSON parsing, echoing and seeded sampling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use super::IdentityId;
use crate::error::{Error, Result};

pub type ParamMap = BTreeMap<String, Vec<Complex64>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub count: usize,
}

fn scalar(v: &Value) -> Option<Complex64> {
    match v {
        Value::Number(n) => n.as_f64().map(|x| Complex64::new(x, 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            Some(Complex64::new(pair[0].as_f64()?, pair[1].as_f64()?))
        }
        Value::Object(m) => Some(Complex64::new(
            m.get("re")?.as_f64()?,
            m.get("im").and_then(Value::as_f64).unwrap_or(0.0),
        )),
        _ => None,
    }
}

fn entry(name: &str, count: usize, v: &Value) -> Result<Vec<Complex64>> {
    let bad = || Error::SchemaMismatch(format!("'{name}' must hold {count} value(s)"));
    let list = match v {
        Value::Array(items) if count == 1 && items.len() == 2 && items.iter().all(Value::is_number) => {
            vec![scalar(v).ok_or_else(bad)?]
        }
        Value::Array(items) => items
            .iter()
            .map(|x| scalar(x).ok_or_else(bad))
            .collect::<Result<Vec<_>>>()?,
        other => vec![scalar(other).ok_or_else(bad)?],
    };
    if list.len() != count {
        return Err(Error::SchemaMismatch(format!(
            "'{name}' has {} value(s), expected {count}",
            list.len()
        )));
    }
    if let Some(z) = list.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite(*z));
    }
    Ok(list)
}

/// Parse a JSON object of parameters against a schema.
///
/// Each value is a number, an `[re, im]` pair or `{"re", "im"}` object, or a
/// list of those. Unknown and missing names are rejected.
pub fn parse_params(json: &Value, schema: &[ParamSpec]) -> Result<ParamMap> {
    let obj = json
        .as_object()
        .ok_or_else(|| Error::SchemaMismatch("parameters must be a JSON object".into()))?;
    for key in obj.keys() {
        if !schema.iter().any(|p| p.name == key) {
            return Err(Error::SchemaMismatch(format!("unknown parameter '{key}'")));
        }
    }
    let mut out = ParamMap::new();
    for spec in schema {
        let v = obj
            .get(spec.name)
            .ok_or_else(|| Error::SchemaMismatch(format!("missing parameter '{}'", spec.name)))?;
        out.insert(spec.name.to_string(), entry(spec.name, spec.count, v)?);
    }
    Ok(out)
}

/// Check an already-typed map against a schema.
pub fn check_params(params: &ParamMap, schema: &[ParamSpec]) -> Result<()> {
    for key in params.keys() {
        if !schema.iter().any(|p| p.name == key) {
            return Err(Error::SchemaMismatch(format!("unknown parameter '{key}'")));
        }
    }
    for spec in schema {
        match params.get(spec.name) {
            None => return Err(Error::SchemaMismatch(format!("missing parameter '{}'", spec.name))),
            Some(v) if v.len() != spec.count => {
                return Err(Error::SchemaMismatch(format!(
                    "'{}' has {} value(s), expected {}",
                    spec.name,
                    v.len(),
                    spec.count
                )))
            }
            Some(v) => {
                if let Some(z) = v.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NonFinite(*z));
                }
            }
        }
    }
    Ok(())
}

/// Parameters as `{name: [[re, im], ...]}`.
pub fn params_to_json(params: &ParamMap) -> Value {
    let map = params
        .iter()
        .map(|(k, v)| {
            let list = v.iter().map(|z| serde_json::json!([z.re, z.im])).collect();
            (k.clone(), Value::Array(list))
        })
        .collect();
    Value::Object(map)
}

struct Sampler(ChaCha8Rng);

impl Sampler {
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.random::<f64>()
    }

    fn complex(&mut self, re_lo: f64, re_hi: f64) -> Complex64 {
        let re = self.uniform(re_lo, re_hi);
        Complex64::new(re, self.uniform(-0.5, 0.5))
    }

    fn standard(&mut self, count: usize) -> Vec<Complex64> {
        (0..count).map(|_| self.complex(0.2, 1.2)).collect()
    }

    /// A value whose real part exceeds `base.re` by 0.3 to 1.0.
    fn above(&mut self, base: Complex64) -> Complex64 {
        let gap = self.uniform(0.3, 1.0);
        Complex64::new(base.re + gap, self.uniform(-0.5, 0.5))
    }
}

fn stream_seed(id: IdentityId, n: usize, seed: u64) -> u64 {
    // FNV-1a over the identity name, mixed with N and the user seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.as_str().bytes().chain((n as u64).to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Deterministic parameter draw satisfying the identity's constraints.
///
/// Real parts are uniform in [0.2, 1.2] and imaginary parts in [-0.5, 0.5]
/// unless the identity needs ordered real parts.
pub fn sample_params(id: IdentityId, n: usize, seed: u64) -> Result<ParamMap> {
    let schema = id.schema(n)?;
    let count = |name: &str| schema.iter().find(|p| p.name == name).map_or(0, |p| p.count);
    let mut rng = Sampler(ChaCha8Rng::seed_from_u64(stream_seed(id, n, seed)));
    let mut out = ParamMap::new();
    let sum = |v: &[Complex64]| v.iter().sum::<Complex64>();
    use IdentityId::*;
    match id {
        G1 | G2 | G2a | Barnes1 => {
            for p in &schema {
                out.insert(p.name.into(), rng.standard(p.count));
            }
        }
        G3 => {
            let alpha = (0..count("alpha")).map(|_| rng.complex(0.5, 1.2)).collect();
            let beta = (0..count("beta")).map(|_| rng.complex(-0.15, 0.15)).collect();
            out.insert("alpha".into(), alpha);
            out.insert("beta".into(), beta);
        }
        Iw => {
            out.insert("a".into(), rng.standard(n));
            out.insert("b".into(), rng.standard(n));
            let zeta = rng.uniform(0.25f64.ln(), 4f64.ln()).exp();
            out.insert("zeta".into(), vec![Complex64::new(zeta, 0.0)]);
        }
        Tba => {
            // Upper half-plane points rotated from admissible Gamma arguments.
            let alpha = rng.standard(n);
            let beta = rng.standard(n);
            let i = Complex64::i();
            out.insert("x".into(), beta.iter().map(|b| i * b).collect());
            out.insert("xp".into(), alpha.iter().map(|a| i * a.conj()).collect());
        }
        Abop => {
            let alpha = rng.standard(2 * n);
            let i = Complex64::i();
            out.insert("xp".into(), alpha[..n].iter().map(|a| -i * a).collect());
            out.insert("x".into(), alpha[n..].iter().map(|a| i * a).collect());
        }
        S1 | S2 => {
            out.insert("x".into(), rng.standard(count("x")));
            out.insert("y".into(), rng.standard(count("y")));
        }
        S3 | Barnes2 => {
            let x = rng.standard(count("x"));
            let y = rng.standard(count("y"));
            let nu = rng.above(sum(&x));
            out.insert("x".into(), x);
            out.insert("y".into(), y);
            out.insert("nu".into(), vec![nu]);
        }
        S4 => {
            let x = rng.standard(n + 1);
            let big_x = sum(&x);
            let top = 1.2f64.min(big_x.re - 0.1);
            let y: Vec<Complex64> = (0..n).map(|_| rng.complex(0.2, top)).collect();
            let s = rng.above(big_x);
            out.insert("x".into(), x);
            out.insert("y".into(), y);
            out.insert("s".into(), vec![s]);
        }
        S5 => {
            let x = rng.standard(n + 1);
            let big_x = sum(&x);
            let mut y = rng.standard(n);
            let big_y = sum(&y).re;
            let cap = big_x.re - 0.2;
            if big_y > cap {
                for v in &mut y {
                    v.re *= cap / big_y;
                }
            }
            let s = rng.above(big_x);
            out.insert("x".into(), x);
            out.insert("y".into(), y);
            out.insert("s".into(), vec![s]);
        }
    }
    Ok(out)
}
