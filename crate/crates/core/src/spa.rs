//! Structural physical approximation of the circulant witnesses.
//!
//! `W(p) = (1 − p) W/Tr W + p I/N²` is a state for `p ≥ p*`. At `p*` the
//! operator splits as `Σ_{i<j} σ_ij + σ_d`, which is separable whenever the
//! three slacks `2b+c+d−1`, `2c+b+d−1`, `2d+b+c−1` are nonnegative.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::errata::{SPA_CRITICAL_P, SPA_NORMALIZATION};
use crate::family::{witness_from_params, WitnessParams};
use crate::maps::Witness;
use crate::numerics::{hermitian_eig, partial_transpose, BipartiteShape, Matrix};

/// Slack allowed on PSD checks and on the reconstruction.
pub const SPA_TOL: f64 = 1e-10;

const N: usize = 4;

/// `(1 − p)·W/Tr W + (p/N²)·I`.
pub fn spa_mix(w: &Witness, p: f64) -> Result<Matrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("mixing parameter {p} outside [0, 1]")));
    }
    let op = w.operator();
    let dim = op.rows();
    let tr = op.trace().re;
    if tr.abs() < f64::EPSILON {
        return Err(Error::Domain("witness has zero trace".into()));
    }
    Ok(&op.scale((1.0 - p) / tr) + &Matrix::identity(dim).scale(p / dim as f64))
}

/// Smallest `p` for which [`spa_mix`] is PSD, from `λ_min(W/Tr W)`.
pub fn critical_p(w: &Witness) -> Result<f64> {
    let op = w.operator();
    let dim = op.rows() as f64;
    let lambda = hermitian_eig(op)?.min() / op.trace().re;
    if lambda >= 0.0 {
        return Ok(0.0);
    }
    Ok(-lambda / (1.0 / dim - lambda))
}

/// `4(3 − a)/(15 − 4a)`.
pub fn critical_p_closed_form(a: f64) -> f64 {
    4.0 * (3.0 - a) / (15.0 - 4.0 * a)
}

/// `4(a − 3)/(3 + 4(a − 3))`, kept for the errata report only.
pub fn critical_p_as_printed(a: f64) -> f64 {
    4.0 * (a - 3.0) / (3.0 + 4.0 * (a - 3.0))
}

/// Bisection on the sign of `λ_min(W(p))`, down to an interval of width `tol`.
pub fn critical_p_bisection(w: &Witness, tol: f64) -> Result<f64> {
    let min_at = |p: f64| -> Result<f64> { Ok(hermitian_eig(&spa_mix(w, p)?)?.min()) };
    if min_at(0.0)? >= 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if min_at(mid)? >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(2b+c+d−1, 2c+b+d−1, 2d+b+c−1)`.
pub fn spa3_check(p: &WitnessParams) -> [f64; 3] {
    [
        2.0 * p.b + p.c + p.d - 1.0,
        2.0 * p.c + p.b + p.d - 1.0,
        2.0 * p.d + p.b + p.c - 1.0,
    ]
}

/// `1/(4(15 − 4a))`.
pub fn normalization(a: f64) -> f64 {
    1.0 / (4.0 * (15.0 - 4.0 * a))
}

fn shape() -> BipartiteShape {
    BipartiteShape::square(N)
}

/// `σ_ij = |ij⟩⟨ij| + |ji⟩⟨ji| + |ii⟩⟨ii| + |jj⟩⟨jj| − |ii⟩⟨jj| − |jj⟩⟨ii|`
/// with 0-based `i ≠ j`.
pub fn sigma_pair(i: usize, j: usize) -> Matrix {
    let s = shape();
    let mut m = Matrix::zeros(N * N, N * N);
    for k in [s.index(i, j), s.index(j, i), s.index(i, i), s.index(j, j)] {
        m[(k, k)] = Complex64::new(1.0, 0.0);
    }
    m[(s.index(i, i), s.index(j, j))] = Complex64::new(-1.0, 0.0);
    m[(s.index(j, j), s.index(i, i))] = Complex64::new(-1.0, 0.0);
    m
}

/// Diagonal `σ_d` carrying the three slacks on the offset-1, 2, 3 sectors.
pub fn sigma_diag(p: &WitnessParams) -> Matrix {
    let s = shape();
    let slacks = spa3_check(p);
    let mut m = Matrix::zeros(N * N, N * N);
    for i in 0..N {
        for (offset, w) in slacks.iter().enumerate() {
            let k = s.index(i, (i + offset + 1) % N);
            m[(k, k)] = Complex64::new(*w, 0.0);
        }
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaPair {
    /// 1-based labels.
    pub i: usize,
    pub j: usize,
    pub sigma: Matrix,
    pub min_eigenvalue: f64,
    pub min_pt_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub sigma_pairs: Vec<SigmaPair>,
    pub sigma_diag: Matrix,
    pub normalization: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaResult {
    pub params: WitnessParams,
    pub p_star: f64,
    pub p_star_closed_form: f64,
    pub p_star_as_printed: f64,
    pub mixed_operator: Matrix,
    pub mixed_min_eigenvalue: f64,
    pub decomposition: Decomposition,
    pub spa3_slacks: [f64; 3],
    pub spa3_satisfied: bool,
    /// `‖normalization·(Σσ_ij + σ_d) − W(p*)‖_F`.
    pub reconstruction_residual: f64,
    pub errata_applied: Vec<&'static str>,
}

impl SpaResult {
    /// True when every piece of the decomposition checks out: each `σ_ij` is
    /// PSD and PPT, `σ_d` is nonnegative and the sum rebuilds `W(p*)`.
    pub fn certifies_separability(&self) -> bool {
        self.spa3_satisfied
            && self.reconstruction_residual <= SPA_TOL
            && self
                .decomposition
                .sigma_pairs
                .iter()
                .all(|s| s.min_eigenvalue >= -SPA_TOL && s.min_pt_eigenvalue >= -SPA_TOL)
    }
}

/// Critical mixture of `W[a, b, c, d]` and its split into `σ_ij` and `σ_d`.
pub fn spa_decompose(p: &WitnessParams) -> Result<SpaResult> {
    let w = witness_from_params(p)?;
    let p_star = critical_p(&w)?;
    let mixed = spa_mix(&w, p_star)?;
    let mixed_min_eigenvalue = hermitian_eig(&mixed)?.min();

    let mut sigma_pairs = Vec::with_capacity(6);
    let mut total = Matrix::zeros(N * N, N * N);
    for i in 0..N {
        for j in i + 1..N {
            let sigma = sigma_pair(i, j);
            total = &total + &sigma;
            sigma_pairs.push(SigmaPair {
                i: i + 1,
                j: j + 1,
                min_eigenvalue: hermitian_eig(&sigma)?.min(),
                min_pt_eigenvalue: hermitian_eig(&partial_transpose(&sigma, shape())?)?.min(),
                sigma,
            });
        }
    }
    let diag = sigma_diag(p);
    total = &total + &diag;
    let norm = normalization(p.a);
    let reconstruction_residual = total.scale(norm).distance(&mixed);

    let slacks = spa3_check(p);
    Ok(SpaResult {
        params: *p,
        p_star,
        p_star_closed_form: critical_p_closed_form(p.a),
        p_star_as_printed: critical_p_as_printed(p.a),
        mixed_operator: mixed,
        mixed_min_eigenvalue,
        decomposition: Decomposition {
            sigma_pairs,
            sigma_diag: diag,
            normalization: norm,
        },
        spa3_slacks: slacks,
        spa3_satisfied: slacks.iter().all(|s| *s >= -SPA_TOL),
        reconstruction_residual,
        errata_applied: vec![SPA_CRITICAL_P, SPA_NORMALIZATION],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(a: f64, b: f64, c: f64, d: f64) -> WitnessParams {
        WitnessParams::new(a, b, c, d).unwrap()
    }

    #[test]
    fn mix_endpoints() {
        let w = witness_from_params(&params(0.0, 1.0, 1.0, 1.0)).unwrap();
        let one = spa_mix(&w, 1.0).unwrap();
        assert!(one.distance(&Matrix::identity(16).scale(1.0 / 16.0)) < 1e-15);
        let zero = spa_mix(&w, 0.0).unwrap();
        assert!(zero.distance(&w.operator().scale(1.0 / 12.0)) < 1e-15);
        assert!(matches!(spa_mix(&w, 1.5), Err(Error::Domain(_))));
        assert!(matches!(spa_mix(&w, -0.1), Err(Error::Domain(_))));

        let at = spa_mix(&w, 0.8).unwrap();
        assert_abs_diff_eq!(hermitian_eig(&at).unwrap().min(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn critical_values() {
        for (p, want) in [
            (params(0.0, 1.0, 1.0, 1.0), 0.8),
            (params(1.5, 0.5, 0.5, 0.5), 2.0 / 3.0),
            (params(1.0, 1.0, 1.0, 0.0), 8.0 / 11.0),
        ] {
            let w = witness_from_params(&p).unwrap();
            assert_abs_diff_eq!(critical_p(&w).unwrap(), want, epsilon = 1e-12);
            assert_abs_diff_eq!(critical_p_closed_form(p.a), want, epsilon = 1e-15);
            assert_abs_diff_eq!(critical_p_bisection(&w, 1e-13).unwrap(), want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(critical_p_as_printed(1.0), 1.6, epsilon = 1e-15);
    }

    #[test]
    fn slacks() {
        assert_eq!(spa3_check(&params(1.0, 1.0, 1.0, 0.0)), [2.0, 2.0, 1.0]);
        assert_eq!(spa3_check(&params(0.0, 1.0, 1.0, 1.0)), [3.0, 3.0, 3.0]);
        assert_eq!(spa3_check(&params(1.0, 1.0, 0.0, 1.0)), [2.0, 1.0, 2.0]);
        assert_eq!(spa3_check(&params(2.25, 0.25, 0.25, 0.25)), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn reduction_decomposition() {
        let r = spa_decompose(&params(0.0, 1.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(r.p_star, 0.8, epsilon = 1e-12);
        assert!(r.reconstruction_residual < 1e-12, "{}", r.reconstruction_residual);
        assert!(r.certifies_separability());
        assert_eq!(r.decomposition.sigma_pairs.len(), 6);
        assert_abs_diff_eq!(r.decomposition.normalization, 1.0 / 60.0, epsilon = 1e-15);
    }

    #[test]
    fn shifted_witness_identity() {
        let p = params(0.7, 0.9, 0.6, 0.8);
        let w = witness_from_params(&p).unwrap();
        let lhs = w.operator() + &Matrix::identity(16).scale(3.0 - p.a);
        let mut rhs = sigma_diag(&p);
        for i in 0..4 {
            for j in i + 1..4 {
                rhs = &rhs + &sigma_pair(i, j);
            }
        }
        assert!(lhs.distance(&rhs) < 1e-14);
    }
}
