//! Catalog of Mellin-Barnes identities with closed-form right-hand sides.

mod cases;
pub mod params;
pub mod residue;
pub mod verify;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrand::MbIntegrand;
pub use params::{parse_params, sample_params, ParamMap, ParamSpec};
pub use verify::{verify, VerifyOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityId {
    G1,
    G2,
    G3,
    G2a,
    Iw,
    Tba,
    Abop,
    S1,
    S2,
    S3,
    S4,
    S5,
    Barnes1,
    Barnes2,
}

impl IdentityId {
    pub const ALL: [IdentityId; 14] = [
        IdentityId::G1,
        IdentityId::G2,
        IdentityId::G3,
        IdentityId::G2a,
        IdentityId::Iw,
        IdentityId::Tba,
        IdentityId::Abop,
        IdentityId::S1,
        IdentityId::S2,
        IdentityId::S3,
        IdentityId::S4,
        IdentityId::S5,
        IdentityId::Barnes1,
        IdentityId::Barnes2,
    ];

    pub fn as_str(self) -> &'static str {
        use IdentityId::*;
        match self {
            G1 => "g1",
            G2 => "g2",
            G3 => "g3",
            G2a => "g2a",
            Iw => "iw",
            Tba => "tba",
            Abop => "abop",
            S1 => "s1",
            S2 => "s2",
            S3 => "s3",
            S4 => "s4",
            S5 => "s5",
            Barnes1 => "barnes1",
            Barnes2 => "barnes2",
        }
    }

    /// Smallest and largest supported N.
    pub fn n_range(self) -> (usize, usize) {
        use IdentityId::*;
        match self {
            Barnes1 | Barnes2 => (1, 1),
            Tba | Abop | S2 => (2, 7),
            _ => (1, 6),
        }
    }

    pub fn dim(self, n: usize) -> usize {
        use IdentityId::*;
        match self {
            Tba | Abop | S2 => n - 1,
            _ => n,
        }
    }

    pub fn dimension_formula(self) -> &'static str {
        use IdentityId::*;
        match self {
            Tba | Abop | S2 => "N-1",
            Barnes1 | Barnes2 => "1",
            _ => "N",
        }
    }

    /// Short label naming the identity.
    pub fn anchor(self) -> &'static str {
        use IdentityId::*;
        match self {
            G1 => "Gustafson first integral (type A)",
            G2 => "Gustafson second integral (type BC)",
            G3 => "Type-A/BC mixed integral with Gamma(z_j +- beta_m)",
            G2a => "Second integral with 2N+1 parameters (one parameter sent to infinity)",
            Iw => "Binomial-weighted first integral, zeta^(sum z)",
            Tba => "First integral in rotated real variables u, z = iu",
            Abop => "Second integral in rotated real variables u, z = iu",
            S1 => "Type-A integral with 1/Gamma(nu + u_k), nu = X + Y",
            S2 => "Delta-constrained type-A integral (de Branges-Wilson class)",
            S3 => "Type-A integral with Gamma(nu - X - U)/Gamma(nu + Y - U)",
            S4 => "Type-A integral with Gamma(s - X - U)/Gamma(s + X + U)",
            S5 => "Mixed integral over nu and u_1..u_{N-1}",
            Barnes1 => "Barnes first lemma",
            Barnes2 => "Barnes second lemma",
        }
    }

    pub fn constraint_text(self) -> &'static str {
        use IdentityId::*;
        match self {
            G3 => "alpha pairwise distinct; contour separates alpha and +-beta poles",
            Iw => "zeta > 0",
            Tba => "Im x_k > 0, Im xp_k > 0",
            Abop => "Im x_k > 0, Im xp_k < 0",
            S1 => "Re x_k > 0, Re y_k > 0; nu = X + Y",
            S2 => "Re x_k > 0, Re y_k > 0",
            S3 | Barnes2 => "Re x_k > 0, Re y_k > 0, Re nu > Re X",
            S4 => "Re x_k > 0, Re y_k > 0, Re X > Re y_k, Re s > Re X",
            S5 => "Re x_k > 0, Re y_k > 0, Re(X - Y) > 0, Re(s - X) > 0",
            _ => "contours separate increasing and decreasing pole series",
        }
    }

    pub fn schema(self, n: usize) -> Result<Vec<ParamSpec>> {
        let (lo, hi) = self.n_range();
        if n < lo || n > hi {
            return Err(Error::SchemaMismatch(format!(
                "{} needs {lo} <= N <= {hi}, got {n}",
                self.as_str()
            )));
        }
        let p = |name, count| ParamSpec { name, count };
        use IdentityId::*;
        Ok(match self {
            G1 => vec![p("alpha", n + 1), p("beta", n + 1)],
            G2 => vec![p("alpha", 2 * n + 2)],
            G3 => vec![p("alpha", n + 1), p("beta", n)],
            G2a => vec![p("alpha", 2 * n + 1)],
            Iw => vec![p("a", n), p("b", n), p("zeta", 1)],
            Tba | Abop => vec![p("x", n), p("xp", n)],
            S1 => vec![p("y", n + 1), p("x", n + 2)],
            S2 => vec![p("y", n - 1), p("x", n + 1)],
            S3 => vec![p("y", n + 1), p("x", n + 1), p("nu", 1)],
            S4 | S5 => vec![p("y", n), p("x", n + 1), p("s", 1)],
            Barnes1 => vec![p("a", 2), p("b", 2)],
            Barnes2 => vec![p("y", 2), p("x", 2), p("nu", 1)],
        })
    }
}

impl std::fmt::Display for IdentityId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IdentityId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintCheck {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct IdentityCase {
    pub id: IdentityId,
    pub n: usize,
    pub params: ParamMap,
    pub constraints: Vec<ConstraintCheck>,
    pub lhs: MbIntegrand,
    pub rhs_log: Complex64,
    pub normalization_note: Option<String>,
}

impl IdentityCase {
    pub fn dim(&self) -> usize {
        self.lhs.dim
    }

    pub fn anchor(&self) -> &'static str {
        self.id.anchor()
    }
}

/// Build a validated case from explicit parameters.
pub fn build_identity(id: IdentityId, n: usize, params: ParamMap) -> Result<IdentityCase> {
    let schema = id.schema(n)?;
    params::check_params(&params, &schema)?;
    let built = cases::build(id, n, &params)?;
    if let Some(c) = built.constraints.iter().find(|c| !c.holds) {
        return Err(Error::ConstraintViolated(c.name.clone()));
    }
    debug_assert_eq!(built.lhs.dim, id.dim(n));
    Ok(IdentityCase {
        id,
        n,
        params,
        constraints: built.constraints,
        lhs: built.lhs,
        rhs_log: built.rhs_log,
        normalization_note: built.normalization_note,
    })
}

/// Build from a JSON parameter object.
pub fn build_identity_json(id: IdentityId, n: usize, json: &serde_json::Value) -> Result<IdentityCase> {
    let schema = id.schema(n)?;
    build_identity(id, n, parse_params(json, &schema)?)
}

/// Build with seeded parameters.
pub fn build_sampled(id: IdentityId, n: usize, seed: u64) -> Result<IdentityCase> {
    build_identity(id, n, sample_params(id, n, seed)?)
}
