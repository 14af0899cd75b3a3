use std::path::Path;

use clap::Args;
use ewcones_core::{abcd_from_euler, EulerAngles, Matrix, Parity, WitnessParams};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<ewcones_core::Error> for CliError {
    fn from(err: ewcones_core::Error) -> Self {
        CliError::Validation(err.to_string())
    }
}

/// A witness named either by Euler angles or by `(a, b, c, d)`.
#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false, id = "point")]
pub struct PointArgs {
    /// Euler angles `alpha,beta,gamma` (radians unless --degrees)
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, group = "point")]
    pub euler: Option<Vec<f64>>,

    /// Circulant parameters `a,b,c,d` with a + b + c + d = 3
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, group = "point")]
    pub params: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PointOptions {
    #[command(flatten)]
    #[serde(flatten)]
    pub point: PointArgs,

    /// Parity of the rotation used with --euler
    #[arg(long, default_value = "proper")]
    pub parity: Parity,

    /// Read --euler in degrees
    #[arg(long)]
    pub degrees: bool,

    /// Decision tolerance
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

impl PointOptions {
    pub fn resolve(&self) -> Result<WitnessParams, CliError> {
        match (&self.point.euler, &self.point.params) {
            (Some(e), None) => {
                let [a, b, g] = <[f64; 3]>::try_from(e.as_slice()).map_err(|_| {
                    CliError::Usage(format!("--euler takes 3 values, got {}", e.len()))
                })?;
                let angles = if self.degrees {
                    EulerAngles::from_degrees(a, b, g)
                } else {
                    EulerAngles::new(a, b, g)
                };
                Ok(abcd_from_euler(angles, self.parity))
            }
            (None, Some(p)) => {
                let [a, b, c, d] = <[f64; 4]>::try_from(p.as_slice()).map_err(|_| {
                    CliError::Usage(format!("--params takes 4 values, got {}", p.len()))
                })?;
                Ok(WitnessParams::with_tolerance(a, b, c, d, self.tol)?)
            }
            _ => Err(CliError::Usage("give exactly one of --euler or --params".into())),
        }
    }

    pub fn echo(&self) -> Value {
        serde_json::to_value(self).expect("options serialize")
    }
}

/// Reads a square complex matrix stored as JSON `[re, im]` pairs, either as a
/// flat row-major list or as a list of rows.
pub fn read_state(path: &Path, dim: usize) -> Result<Matrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{} is not valid JSON: {e}", path.display())))?;
    parse_state(&value, dim)
}

pub fn parse_state(value: &Value, dim: usize) -> Result<Matrix, CliError> {
    let bad = |msg: String| CliError::Validation(msg);
    let outer = value
        .as_array()
        .ok_or_else(|| bad("state must be a JSON array".into()))?;
    let entries: Vec<&Value> = if outer.len() == dim * dim {
        outer.iter().collect()
    } else if outer.len() == dim && outer.iter().all(|r| r.as_array().is_some_and(|r| r.len() == dim)) {
        outer.iter().flat_map(|r| r.as_array().unwrap().iter()).collect()
    } else {
        return Err(bad(format!(
            "state needs {} entries or {dim} rows of {dim}",
            dim * dim
        )));
    };
    let data = entries
        .into_iter()
        .enumerate()
        .map(|(k, v)| match v.as_array().map(|p| p.as_slice()) {
            Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(bad(format!("entry {k} is not a pair of numbers"))),
            },
            _ => Err(bad(format!("entry {k} is not a [re, im] pair"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_vec(dim, dim, data)?)
}
