//! Closed-form parameters of the circulant witnesses `W[a, b, c, d]` obtained
//! by twirling the `SO(3)`-parameterized family in `M_4(C)`, and the `SO(2)`
//! family in `M_3(C)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{EulerAngles, Parity, StochasticMatrix, Witness};

/// Slack on `a + b + c + d = 3` and on the sign of each parameter.
pub const PARAMS_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Euler { angles: EulerAngles, parity: Parity },
    Manual,
}

/// `(a, b, c, d)` with `a + b + c + d = 3`; row `i` of `3Φ` reads `a, b, c, d`
/// starting on the diagonal and moving right cyclically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub provenance: Provenance,
}

impl WitnessParams {
    /// Manual parameters, validated against the default tolerance.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::with_tolerance(a, b, c, d, PARAMS_TOL)
    }

    pub fn with_tolerance(a: f64, b: f64, c: f64, d: f64, tol: f64) -> Result<Self> {
        let p = Self {
            a,
            b,
            c,
            d,
            provenance: Provenance::Manual,
        };
        p.validate(tol)?;
        Ok(p)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let values = self.as_array();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("parameters must be finite".into()));
        }
        let residual = self.sum_residual();
        if residual.abs() > tol {
            return Err(Error::Validation(format!(
                "a + b + c + d must equal 3 (residual {residual:.3e})"
            )));
        }
        if let Some(v) = values.iter().find(|&&v| !(-tol..=3.0 + tol).contains(&v)) {
            return Err(Error::Validation(format!(
                "parameter {v} lies outside [0, 3]"
            )));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `a + b + c + d − 3`.
    pub fn sum_residual(&self) -> f64 {
        self.a + self.b + self.c + self.d - 3.0
    }

    /// Same numbers, provenance dropped.
    pub fn as_manual(&self) -> Self {
        Self {
            provenance: Provenance::Manual,
            ..*self
        }
    }
}

/// Twirled circulant parameters of the Euler-angle family.
///
/// `Proper` evaluates the closed forms for `𝓡(α, β, γ)`; `Improper` the primed
/// forms for `−𝓡(α, β, γ)`, which differ only by the sign of every
/// non-constant term.
pub fn abcd_from_euler(angles: EulerAngles, parity: Parity) -> WitnessParams {
    let (sa, ca) = angles.alpha.sin_cos();
    let (sb, cb) = angles.beta.sin_cos();
    let (sg, cg) = angles.gamma.sin_cos();
    let s2 = 2f64.sqrt();
    let s3 = 3f64.sqrt();
    let s6 = 6f64.sqrt();
    let sign = parity.sign();

    let a_var = (angles.alpha + angles.gamma).cos() * (1.0 + cb) + cb;

    // shared between b and d
    let bd_common = (sa * sg - ca * cb * cg - 3.0 * ca * cg + 3.0 * cb * sa * sg - 2.0 * cb) / 6.0;

    let b_var = bd_common
        + (3.0 * cg * sa + 3.0 * ca * cb * sg + cb * cg * sa + ca * sg) / (2.0 * s3)
        + 2.0 / (3.0 * s2) * sb * (2.0 * cg + ca)
        - 2.0 / s6 * sa * sb;

    let c_var = -(2.0 * ca * cb * cg - 2.0 * sa * sg + cb) / 3.0
        - 2.0 / (3.0 * s2) * sb * (cg - ca)
        + 2.0 / s6 * sb * (sg + sa)
        - (cg * sa + ca * cb * sg - cb * cg * sa - ca * sg) / s3;

    let d_var = bd_common
        - (3.0 * cb * cg * sa + 3.0 * ca * sg + cg * sa + ca * cb * sg) / (2.0 * s3)
        - 2.0 / (3.0 * s2) * sb * (cg + 2.0 * ca)
        - 2.0 / s6 * sg * sb;

    WitnessParams {
        a: (3.0 + sign * a_var) / 4.0,
        b: (3.0 + sign * b_var) / 4.0,
        c: (3.0 + sign * c_var) / 4.0,
        d: (3.0 + sign * d_var) / 4.0,
        provenance: Provenance::Euler { angles, parity },
    }
}

/// The circulant stochastic matrix `circ(a, b, c, d) / 3`.
pub fn circulant_phi(p: &WitnessParams) -> Result<StochasticMatrix> {
    StochasticMatrix::circulant(&p.as_array())
}

/// `W[a, b, c, d]`.
pub fn witness_from_params(p: &WitnessParams) -> Result<Witness> {
    if let Some(v) = p.as_array().iter().find(|&&v| v < -PARAMS_TOL) {
        return Err(Error::Domain(format!("negative witness parameter {v}")));
    }
    Ok(Witness::from_stochastic(&circulant_phi(p)?))
}

/// Circulant parameters read off a witness in block form.
pub fn params_from_witness(w: &Witness) -> Result<WitnessParams> {
    if w.n() != 4 {
        return Err(Error::Shape(format!("expected n = 4, got n = {}", w.n())));
    }
    let phi = w.induced_phi();
    let avg: Vec<f64> = (0..4)
        .map(|o| (0..4).map(|i| 3.0 * phi[i * 4 + (i + o) % 4]).sum::<f64>() / 4.0)
        .collect();
    WitnessParams::new(avg[0], avg[1], avg[2], avg[3])
}

/// `n = 3` parameters `(a, b, c)` with `a + b + c = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct N3Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
}

pub fn n3_abc(alpha: f64) -> N3Params {
    let (s, c) = alpha.sin_cos();
    let h = 3f64.sqrt() / 2.0;
    N3Params {
        a: 2.0 / 3.0 * (1.0 + c),
        b: 2.0 / 3.0 * (1.0 - 0.5 * c - h * s),
        c: 2.0 / 3.0 * (1.0 - 0.5 * c + h * s),
        alpha,
    }
}

impl N3Params {
    /// `bc − (1 − a)²`, zero on the boundary ellipse.
    pub fn ellipse_residual(&self) -> f64 {
        self.b * self.c - (1.0 - self.a).powi(2)
    }

    /// The three Cho–Kye conditions: `0 ≤ a < 2`, `a + b + c ≥ 2`, and
    /// `a ≤ 1 ⇒ bc ≥ (1 − a)²`.
    pub fn cho_kye(&self, tol: f64) -> [bool; 3] {
        [
            self.a >= -tol && self.a < 2.0,
            self.a + self.b + self.c >= 2.0 - tol,
            self.a > 1.0 + tol || self.ellipse_residual() >= -tol,
        ]
    }
}
