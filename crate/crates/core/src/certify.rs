//! Certificates for the circulant witnesses `W[a, b, c, d]`.
//!
//! `W[a, b, c, d]` is decomposable exactly when `b = d`. For `b ≠ d` the
//! certificate is a PPT probe state `ρ_ε` with `Tr(W ρ_ε) < 0`; for `b = d` it
//! is an explicit split `W = P + Q^Γ` with `P, Q ≥ 0`.
//!
//! Block positivity is checked numerically by alternating minimization over
//! product vectors. That search gives evidence, not a proof.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::cones::{cone_residuals, MEMBERSHIP_TOL};
use crate::error::{Error, Result};
use crate::family::{witness_from_params, WitnessParams};
use crate::maps::Witness;
use crate::numerics::{hermitian_eig, partial_transpose, BipartiteShape, Matrix};

/// Slack for PSD/PPT checks inside certificates, scaled by `max(1, max |m_ij|)`.
pub const CERTIFICATE_TOL: f64 = 1e-10;
/// A pairing must fall below `−PAIRING_MARGIN` to certify indecomposability.
pub const PAIRING_MARGIN: f64 = 1e-10;
/// Default see-saw seed.
pub const DEFAULT_SEED: u64 = 0x5EED_2011;

const SEESAW_MAX_ITERATIONS: usize = 500;
const SEESAW_IMPROVEMENT: f64 = 1e-12;

const N: usize = 4;

fn shape() -> BipartiteShape {
    BipartiteShape::square(N)
}

fn basis_index(i: usize, j: usize) -> usize {
    shape().index(i % N, j % N)
}

fn scaled_tol(m: &Matrix) -> f64 {
    CERTIFICATE_TOL * m.max_abs().max(1.0)
}

/// The unnormalized probe state
/// `ρ_ε = Σ_i [|ii⟩⟨ii| + ε|i,i+1⟩⟨i,i+1| + |i,i+2⟩⟨i,i+2| + ε⁻¹|i,i+3⟩⟨i,i+3|] + Σ_{i≠j} |ii⟩⟨jj|`.
#[derive(Clone, Debug, Serialize)]
pub struct PptProbe {
    pub epsilon: f64,
    pub state: Matrix,
    /// `λ_min(ρ_ε)`
    pub min_eigenvalue: f64,
    /// `λ_min(ρ_ε^Γ)`
    pub min_pt_eigenvalue: f64,
}

pub fn probe_state(epsilon: f64) -> Result<PptProbe> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("probe needs epsilon > 0, got {epsilon}")));
    }
    let mut rho = Matrix::zeros(N * N, N * N);
    for i in 0..N {
        for (offset, weight) in [(0, 1.0), (1, epsilon), (2, 1.0), (3, 1.0 / epsilon)] {
            let k = basis_index(i, i + offset);
            rho[(k, k)] = Complex64::new(weight, 0.0);
        }
        for j in 0..N {
            if i != j {
                rho[(basis_index(i, i), basis_index(j, j))] = Complex64::new(1.0, 0.0);
            }
        }
    }
    let min_eigenvalue = hermitian_eig(&rho)?.min();
    let min_pt_eigenvalue = hermitian_eig(&partial_transpose(&rho, shape())?)?.min();
    let tol = scaled_tol(&rho);
    if min_eigenvalue < -tol || min_pt_eigenvalue < -tol {
        return Err(Error::Validation(format!(
            "probe at epsilon = {epsilon} failed PSD/PPT ({min_eigenvalue:.3e}, {min_pt_eigenvalue:.3e})"
        )));
    }
    Ok(PptProbe {
        epsilon,
        state: rho,
        min_eigenvalue,
        min_pt_eigenvalue,
    })
}

/// `Tr(W ρ_ε)`.
pub fn pairing(w: &Witness, probe: &PptProbe) -> Result<f64> {
    if w.operator().rows() != probe.state.rows() {
        return Err(Error::Shape("witness and probe dimensions differ".into()));
    }
    Ok(w.operator().trace_product(&probe.state).re)
}

/// `4[d/ε + bε − (b + d)]`, the pairing of `W[a, b, c, d]` with `ρ_ε`.
pub fn pairing_closed_form(p: &WitnessParams, epsilon: f64) -> f64 {
    4.0 * (p.d / epsilon + p.b * epsilon - (p.b + p.d))
}

/// `(ε₋, ε₊) = ((b + d ∓ |b − d|) / 2b)`, the open interval where the pairing
/// is negative. `None` when `b = 0`.
pub fn epsilon_interval(p: &WitnessParams) -> Option<(f64, f64)> {
    if p.b <= 0.0 {
        return None;
    }
    let gap = (p.b - p.d).abs();
    Some(((p.b + p.d - gap) / (2.0 * p.b), (p.b + p.d + gap) / (2.0 * p.b)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Decomposable,
    Indecomposable,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    ProbeState {
        epsilon: f64,
        pairing_value: f64,
        epsilon_interval: Option<(f64, f64)>,
        probe_min_eigenvalue: f64,
        probe_min_pt_eigenvalue: f64,
    },
    Split {
        p: Matrix,
        q: Matrix,
        a_eigenvalues: Vec<f64>,
        a_eigenvalues_closed_form: Vec<f64>,
        p_min_eigenvalue: f64,
        q_min_eigenvalue: f64,
        reconstruction_residual: f64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub witness_params: WitnessParams,
    pub tolerance: f64,
    /// False when the parameters are on neither cone.
    pub on_cone: bool,
    pub evidence: Evidence,
}

/// Decides decomposability of `W[a, b, c, d]` and builds the matching
/// certificate. Points off both cones are still processed; `on_cone` records it.
pub fn certify_decomposability(p: &WitnessParams, tol: f64) -> Result<Certificate> {
    let w = witness_from_params(p)?;
    let on_cone = cone_residuals(p, MEMBERSHIP_TOL).on_either();
    let (verdict, evidence) = if (p.b - p.d).abs() > tol {
        (Verdict::Indecomposable, probe_evidence(p, &w)?)
    } else {
        (Verdict::Decomposable, split_evidence(p, &w)?)
    };
    Ok(Certificate {
        verdict,
        witness_params: *p,
        tolerance: tol,
        on_cone,
        evidence,
    })
}

fn choose_epsilon(p: &WitnessParams) -> f64 {
    let (b, d) = (p.b, p.d);
    if b > 0.0 && d > 0.0 {
        // minimizer of d/ε + bε
        (d / b).sqrt()
    } else if let Some((lo, hi)) = epsilon_interval(p) {
        0.5 * (lo + hi)
    } else {
        // b = 0: pairing 4d(1/ε − 1) decreases in ε
        (-20..=20)
            .map(|k| 2f64.powi(k))
            .min_by(|x, y| pairing_closed_form(p, *x).total_cmp(&pairing_closed_form(p, *y)))
            .unwrap()
    }
}

fn probe_evidence(p: &WitnessParams, w: &Witness) -> Result<Evidence> {
    let epsilon = choose_epsilon(p);
    let probe = probe_state(epsilon)?;
    Ok(Evidence::ProbeState {
        epsilon,
        pairing_value: pairing(w, &probe)?,
        epsilon_interval: epsilon_interval(p),
        probe_min_eigenvalue: probe.min_eigenvalue,
        probe_min_pt_eigenvalue: probe.min_pt_eigenvalue,
    })
}

/// `P` on the `|ii⟩` sector: the circulant `A` with first row
/// `(a, m−1, c−1, m−1)`, `m = min(b, d)`.
pub fn split_p(p: &WitnessParams) -> Matrix {
    let m = p.b.min(p.d);
    let mut out = Matrix::zeros(N * N, N * N);
    for i in 0..N {
        let row = basis_index(i, i);
        for (offset, value) in [(0, p.a), (1, m - 1.0), (2, p.c - 1.0), (3, m - 1.0)] {
            out[(row, basis_index(i + offset, i + offset))] = Complex64::new(value, 0.0);
        }
    }
    out
}

/// `Q = Σ_i [b|i,i+1⟩⟨i,i+1| + c|i,i+2⟩⟨i,i+2| + d|i,i+3⟩⟨i,i+3|
///        − m(|i,i+1⟩⟨i+1,i| + |i,i+3⟩⟨i+3,i|) − c|i,i+2⟩⟨i+2,i|]`, `m = min(b, d)`.
pub fn split_q(p: &WitnessParams) -> Matrix {
    let m = p.b.min(p.d);
    let mut out = Matrix::zeros(N * N, N * N);
    for i in 0..N {
        for (offset, diag, off) in [(1, p.b, m), (2, p.c, p.c), (3, p.d, m)] {
            let k = basis_index(i, i + offset);
            out[(k, k)] = Complex64::new(diag, 0.0);
            out[(k, basis_index(i + offset, i))] = Complex64::new(-off, 0.0);
        }
    }
    out
}

/// `{0, 4(1−b), 2(2−b−c), 2(2−b−c)}`.
pub fn a_spectrum_closed_form(p: &WitnessParams) -> Vec<f64> {
    let mut v = vec![0.0, 4.0 * (1.0 - p.b), 2.0 * (2.0 - p.b - p.c), 2.0 * (2.0 - p.b - p.c)];
    v.sort_by(f64::total_cmp);
    v
}

fn split_evidence(p: &WitnessParams, w: &Witness) -> Result<Evidence> {
    let pm = split_p(p);
    let qm = split_q(p);
    let rebuilt = &pm + &partial_transpose(&qm, shape())?;
    let reconstruction_residual = w.operator().distance(&rebuilt);

    let a = Matrix::from_fn(N, N, |i, j| pm[(basis_index(i, i), basis_index(j, j))]);
    Ok(Evidence::Split {
        a_eigenvalues: hermitian_eig(&a)?.eigenvalues,
        a_eigenvalues_closed_form: a_spectrum_closed_form(p),
        p_min_eigenvalue: hermitian_eig(&pm)?.min(),
        q_min_eigenvalue: hermitian_eig(&qm)?.min(),
        reconstruction_residual,
        p: pm,
        q: qm,
    })
}

impl Certificate {
    /// Re-checks the certificate from scratch: rebuilds the witness and probe
    /// or split and tests every stated property.
    pub fn verify(&self) -> Result<()> {
        let w = witness_from_params(&self.witness_params)?;
        match (&self.verdict, &self.evidence) {
            (Verdict::Indecomposable, Evidence::ProbeState { epsilon, .. }) => {
                let probe = probe_state(*epsilon)?;
                let value = pairing(&w, &probe)?;
                if value >= -PAIRING_MARGIN {
                    return Err(Error::Validation(format!(
                        "pairing {value:.3e} is not below -{PAIRING_MARGIN:e}"
                    )));
                }
                Ok(())
            }
            (Verdict::Decomposable, Evidence::Split { p, q, .. }) => {
                let tol = CERTIFICATE_TOL;
                let p_min = hermitian_eig(p)?.min();
                let q_min = hermitian_eig(q)?.min();
                if p_min < -scaled_tol(p) || q_min < -scaled_tol(q) {
                    return Err(Error::Validation(format!(
                        "split is not PSD (P: {p_min:.3e}, Q: {q_min:.3e})"
                    )));
                }
                let residual = w.operator().distance(&(p + &partial_transpose(q, shape())?));
                if residual > tol {
                    return Err(Error::Validation(format!(
                        "W - P - Q^Γ has norm {residual:.3e}"
                    )));
                }
                Ok(())
            }
            _ => Err(Error::Validation("verdict and evidence disagree".into())),
        }
    }
}

/// Outcome of the product-vector search.
#[derive(Clone, Debug, Serialize)]
pub struct BlockPositivity {
    /// Smallest `⟨ψ⊗φ|W|ψ⊗φ⟩` seen over all restarts.
    pub minimum: f64,
    /// Running minimum after each restart.
    pub per_restart: Vec<f64>,
    pub restarts: usize,
    pub seed: u64,
    pub label: &'static str,
}

/// Generator for restart `index`; each restart owns an independent stream.
fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mixed = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha8Rng::seed_from_u64(mixed)
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// `(⟨ψ| ⊗ I) W (|ψ⟩ ⊗ I)` when `first` is true, else `(I ⊗ ⟨φ|) W (I ⊗ |φ⟩)`.
fn contract(w: &Matrix, shape: BipartiteShape, v: &[Complex64], first: bool) -> Matrix {
    let (da, db) = (shape.d_a, shape.d_b);
    if first {
        Matrix::from_fn(db, db, |k, l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..da {
                for j in 0..da {
                    acc += v[i].conj() * v[j] * w[(shape.index(i, k), shape.index(j, l))];
                }
            }
            acc
        })
    } else {
        Matrix::from_fn(da, da, |i, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..db {
                for l in 0..db {
                    acc += v[k].conj() * v[l] * w[(shape.index(i, k), shape.index(j, l))];
                }
            }
            acc
        })
    }
}

/// Alternating minimization of `⟨ψ⊗φ|W|ψ⊗φ⟩` over unit `ψ, φ`.
///
/// With `ψ` fixed the optimal `φ` is the bottom eigenvector of the contracted
/// `d_B × d_B` matrix, and vice versa. Each restart starts from a seeded random
/// pair and stops when an iteration improves by less than `1e-12`, or after
/// 500 iterations.
pub fn block_positivity_search(w: &Witness, restarts: usize, seed: u64) -> Result<BlockPositivity> {
    let shape = w.shape();
    let op = w.operator();
    let mut best = f64::INFINITY;
    let mut per_restart = Vec::with_capacity(restarts);
    for r in 0..restarts {
        let mut rng = restart_rng(seed, r);
        let mut psi = random_unit(&mut rng, shape.d_a);
        let _ = random_unit(&mut rng, shape.d_b);
        let mut current = f64::INFINITY;
        for _ in 0..SEESAW_MAX_ITERATIONS {
            let eig = hermitian_eig(&contract(op, shape, &psi, true))?;
            let phi = eig.eigenvectors.column(0);
            let eig = hermitian_eig(&contract(op, shape, &phi, false))?;
            psi = eig.eigenvectors.column(0);
            let value = eig.min();
            best = best.min(value);
            let improvement = current - value;
            current = value;
            if improvement < SEESAW_IMPROVEMENT {
                break;
            }
        }
        per_restart.push(best);
    }
    Ok(BlockPositivity {
        minimum: best,
        per_restart,
        restarts,
        seed,
        label: "numerical evidence",
    })
}

/// Minimum of the product-vector search.
pub fn block_positivity_min(w: &Witness, restarts: usize, seed: u64) -> Result<f64> {
    Ok(block_positivity_search(w, restarts, seed)?.minimum)
}

/// `Tr(W ρ)`; negative values certify that `ρ` is entangled.
pub fn detect(w: &Witness, rho: &Matrix) -> Result<f64> {
    if rho.rows() != w.operator().rows() || !rho.is_square() {
        return Err(Error::Shape(format!(
            "state is {}x{}, witness is {}x{}",
            rho.rows(),
            rho.cols(),
            w.operator().rows(),
            w.operator().cols()
        )));
    }
    let eig = hermitian_eig(rho)?;
    if eig.min() < -1e-9 * rho.max_abs().max(1.0) {
        return Err(Error::NotPsd {
            eigenvalue: eig.min(),
        });
    }
    Ok(w.operator().trace_product(rho).re)
}

/// `λ_min(ρ^Γ)`, for reporting whether a state is PPT.
pub fn min_partial_transpose_eigenvalue(rho: &Matrix, shape: BipartiteShape) -> Result<f64> {
    Ok(hermitian_eig(&partial_transpose(rho, shape)?)?.min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::maximally_entangled_projector;
    use approx::assert_abs_diff_eq;

    fn params(a: f64, b: f64, c: f64, d: f64) -> WitnessParams {
        WitnessParams::new(a, b, c, d).unwrap()
    }

    #[test]
    fn probe_structure() {
        let probe = probe_state(0.5).unwrap();
        assert_eq!(probe.state[(basis_index(0, 1), basis_index(0, 1))].re, 0.5);
        assert_eq!(probe.state[(basis_index(2, 1), basis_index(2, 1))].re, 2.0);
        assert_eq!(probe.state[(basis_index(1, 3), basis_index(1, 3))].re, 1.0);
        assert!(probe_state(1.0).is_ok());
        assert!(probe_state(1e-3).is_ok());
        assert!(matches!(probe_state(0.0), Err(Error::Domain(_))));
        assert!(matches!(probe_state(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn pairing_examples() {
        let w = witness_from_params(&params(1.0, 1.0, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(pairing(&w, &probe_state(0.5).unwrap()).unwrap(), -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pairing(&w, &probe_state(1.0).unwrap()).unwrap(), 0.0, epsilon = 1e-12);
        let r = witness_from_params(&params(0.0, 1.0, 1.0, 1.0)).unwrap();
        assert_abs_diff_eq!(pairing(&r, &probe_state(2.0).unwrap()).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn choi_point_is_indecomposable() {
        let cert = certify_decomposability(&params(1.0, 1.0, 1.0, 0.0), 1e-9).unwrap();
        assert_eq!(cert.verdict, Verdict::Indecomposable);
        match &cert.evidence {
            Evidence::ProbeState {
                epsilon,
                pairing_value,
                epsilon_interval,
                ..
            } => {
                assert_eq!(*epsilon_interval, Some((0.0, 1.0)));
                assert_eq!(*epsilon, 0.5);
                assert_abs_diff_eq!(*pairing_value, -2.0, epsilon = 1e-12);
            }
            other => panic!("unexpected evidence {other:?}"),
        }
        cert.verify().unwrap();
    }

    #[test]
    fn identity_point_is_decomposable() {
        let cert = certify_decomposability(&params(1.5, 0.5, 0.5, 0.5), 1e-9).unwrap();
        assert_eq!(cert.verdict, Verdict::Decomposable);
        match &cert.evidence {
            Evidence::Split {
                a_eigenvalues,
                reconstruction_residual,
                ..
            } => {
                for (got, want) in a_eigenvalues.iter().zip([0.0, 2.0, 2.0, 2.0]) {
                    assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
                }
                assert_eq!(*reconstruction_residual, 0.0);
            }
            other => panic!("unexpected evidence {other:?}"),
        }
        cert.verify().unwrap();
    }

    #[test]
    fn reduction_point_has_zero_a() {
        let p = params(0.0, 1.0, 1.0, 1.0);
        let cert = certify_decomposability(&p, 1e-9).unwrap();
        assert_eq!(cert.verdict, Verdict::Decomposable);
        assert_eq!(a_spectrum_closed_form(&p), vec![0.0; 4]);
        if let Evidence::Split { a_eigenvalues, .. } = &cert.evidence {
            assert!(a_eigenvalues.iter().all(|x| x.abs() < 1e-12));
        }
        cert.verify().unwrap();
    }

    #[test]
    fn zero_b_uses_scan() {
        // b = 0 branch: choose a large epsilon
        let p = params(1.0, 0.0, 1.0, 1.0);
        let cert = certify_decomposability(&p, 1e-9).unwrap();
        assert_eq!(cert.verdict, Verdict::Indecomposable);
        if let Evidence::ProbeState { epsilon, pairing_value, .. } = cert.evidence {
            assert_eq!(epsilon, 2f64.powi(20));
            assert!(pairing_value < -3.9);
        }
    }

    #[test]
    fn block_positivity_of_reduction_and_identity() {
        let r = witness_from_params(&params(0.0, 1.0, 1.0, 1.0)).unwrap();
        let min = block_positivity_min(&r, 8, 1).unwrap();
        assert!(min.abs() < 1e-8, "{min}");
        let id = Witness::new(4, Matrix::identity(16)).unwrap();
        assert_abs_diff_eq!(block_positivity_min(&id, 3, 1).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn detection() {
        let w = witness_from_params(&params(0.5, 0.75, 1.0, 0.75)).unwrap();
        let mixed = Matrix::identity(16).scale(1.0 / 16.0);
        assert_abs_diff_eq!(detect(&w, &mixed).unwrap(), 0.75, epsilon = 1e-12);

        let r = witness_from_params(&params(0.0, 1.0, 1.0, 1.0)).unwrap();
        let value = detect(&r, &maximally_entangled_projector(4)).unwrap();
        assert_abs_diff_eq!(value, -3.0, epsilon = 1e-12);

        let bad = Matrix::diag_real(&[[-0.5].as_slice(), &[1.5], &[0.0; 14]].concat());
        assert!(matches!(detect(&w, &bad), Err(Error::NotPsd { .. })));
    }
}
