//! Kossakowski positive maps `Φ_R` on `M_n(C)`, the doubly stochastic matrix
//! they induce on diagonal matrix units, the associated witness operators and
//! the Weyl twirl.
//!
//! Orientation: the doubly stochastic matrix returned by [`phi_matrix`] is
//! `Φ_ij = 1/n + 1/(n-1) Σ_kl ⟨j|d_l|j⟩ 𝓡_kl ⟨i|d_k|i⟩`, which is the diagonal
//! action of the *dual* map: `Φ_R^#(|i⟩⟨i|) = Σ_j Φ_ij |j⟩⟨j|`. The witness
//! assembled from it therefore equals `n(n-1)(1 ⊗ Φ_R^#)P⁺`, see
//! [`witness_via_map`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{diagonal_entry, ket, GellMannBasis};
use crate::error::{Error, Result};
use crate::numerics::{BipartiteShape, Matrix, RealMatrix, ONE, RECONSTRUCTION_TOL};

/// Slack for orthogonality of user-supplied rotations.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Euler angles `(α, β, γ)` in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn from_degrees(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::new(alpha.to_radians(), beta.to_radians(), gamma.to_radians())
    }

    /// The proper rotation these angles parameterize.
    pub fn rotation(&self) -> RealMatrix {
        euler_rotation(*self)
    }
}

/// Rotation matrix in the `z-x-z` Euler convention:
///
/// ```text
/// [ cα cγ − cβ sα sγ    cγ sα + cα cβ sγ    sβ sγ ]
/// [ −cβ cγ sα − cα sγ   cα cβ cγ − sα sγ    cγ sβ ]
/// [ sα sβ               −cα sβ              cβ    ]
/// ```
pub fn euler_rotation(angles: EulerAngles) -> RealMatrix {
    let (sa, ca) = angles.alpha.sin_cos();
    let (sb, cb) = angles.beta.sin_cos();
    let (sg, cg) = angles.gamma.sin_cos();
    RealMatrix::from_rows([
        [ca * cg - cb * sa * sg, cg * sa + ca * cb * sg, sb * sg],
        [-cb * cg * sa - ca * sg, ca * cb * cg - sa * sg, cg * sb],
        [sa * sb, -ca * sb, cb],
    ])
}

/// Planar rotation `[[cos α, −sin α], [sin α, cos α]]`, the `SO(2)` block for `n = 3`.
pub fn planar_rotation(alpha: f64) -> RealMatrix {
    let (s, c) = alpha.sin_cos();
    RealMatrix::from_rows([[c, -s], [s, c]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Proper,
    Improper,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Proper => 1.0,
            Parity::Improper => -1.0,
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proper" => Ok(Parity::Proper),
            "improper" => Ok(Parity::Improper),
            other => Err(Error::Validation(format!(
                "parity must be `proper` or `improper`, got `{other}`"
            ))),
        }
    }
}

/// An `(n-1)×(n-1)` orthogonal block `𝓡` embedded as `R = 𝓡 ⊕ (−I_{n(n-1)})`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalEmbedding {
    n: usize,
    small_block: RealMatrix,
    parity: Parity,
}

impl OrthogonalEmbedding {
    /// Wraps an orthogonal block; parity is read off its determinant.
    pub fn new(small_block: RealMatrix) -> Result<Self> {
        let n = small_block.dim() + 1;
        if n < 2 {
            return Err(Error::Domain("embedding needs n >= 2".into()));
        }
        let defect = small_block.orthogonality_defect();
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::Validation(format!(
                "block is not orthogonal (defect {defect:.3e})"
            )));
        }
        let parity = if small_block.determinant() > 0.0 {
            Parity::Proper
        } else {
            Parity::Improper
        };
        Ok(Self {
            n,
            small_block,
            parity,
        })
    }

    /// `n = 4` embedding of `𝓡(α, β, γ)` (proper) or `−𝓡(α, β, γ)` (improper).
    pub fn from_euler(angles: EulerAngles, parity: Parity) -> Self {
        let r = euler_rotation(angles);
        let small_block = match parity {
            Parity::Proper => r,
            Parity::Improper => r.negated(),
        };
        Self {
            n: 4,
            small_block,
            parity,
        }
    }

    /// The block `−I_{n-1}`, which reproduces the reduction map.
    pub fn reflection(n: usize) -> Result<Self> {
        Self::new(RealMatrix::identity(n - 1).negated())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn small_block(&self) -> &RealMatrix {
        &self.small_block
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// The full `(n²-1)×(n²-1)` rotation `𝓡 ⊕ (−I)`.
    pub fn full_rotation(&self) -> RealMatrix {
        let dim = self.n * self.n - 1;
        let mut r = RealMatrix::identity(dim).negated();
        let k = self.n - 1;
        for i in 0..k {
            for j in 0..k {
                r.set(i, j, self.small_block.get(i, j));
            }
        }
        r
    }

    pub fn kossakowski_map(&self) -> KossakowskiMap {
        KossakowskiMap::new(self.n, self.full_rotation())
            .expect("block embedding of an orthogonal matrix is orthogonal")
    }
}

/// `Φ_R(X) = I Tr X / n + 1/(n-1) Σ_{α,β≥1} f_α R_αβ Tr(f_β X)` for `R ∈ O(n²-1)`.
#[derive(Clone, Debug)]
pub struct KossakowskiMap {
    n: usize,
    rotation: RealMatrix,
    basis: GellMannBasis,
}

impl KossakowskiMap {
    pub fn new(n: usize, rotation: RealMatrix) -> Result<Self> {
        let basis = GellMannBasis::new(n)?;
        if rotation.dim() != n * n - 1 {
            return Err(Error::Shape(format!(
                "rotation must be {0}x{0} for n = {n}, got {1}x{1}",
                n * n - 1,
                rotation.dim()
            )));
        }
        let defect = rotation.orthogonality_defect();
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::Validation(format!(
                "rotation is not orthogonal (defect {defect:.3e})"
            )));
        }
        Ok(Self { n, rotation, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rotation(&self) -> &RealMatrix {
        &self.rotation
    }

    pub fn basis(&self) -> &GellMannBasis {
        &self.basis
    }

    /// `Φ_R^# = Φ_{Rᵀ}`.
    pub fn dual(&self) -> Self {
        Self {
            n: self.n,
            rotation: self.rotation.transpose(),
            basis: self.basis.clone(),
        }
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        self.apply_with(x, false)
    }

    pub fn apply_dual(&self, x: &Matrix) -> Result<Matrix> {
        self.apply_with(x, true)
    }

    fn apply_with(&self, x: &Matrix, transpose: bool) -> Result<Matrix> {
        let coeffs = self.basis.expand(x)?;
        let n = self.n;
        let scale = 1.0 / (n as f64 - 1.0);
        let mut out = Matrix::identity(n).scale_complex(x.trace() / n as f64);
        for alpha in 1..n * n {
            let mut weight = Complex64::new(0.0, 0.0);
            for (beta, c) in coeffs.iter().enumerate().skip(1) {
                let r = if transpose {
                    self.rotation.get(beta - 1, alpha - 1)
                } else {
                    self.rotation.get(alpha - 1, beta - 1)
                };
                if r != 0.0 {
                    weight += c * r;
                }
            }
            if weight != Complex64::new(0.0, 0.0) {
                out = &out + &self.basis.element(alpha).scale_complex(weight * scale);
            }
        }
        Ok(out)
    }

    /// `n(n-1) (1 ⊗ Φ) P⁺_n = (n-1) Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
    pub fn choi_operator(&self) -> Matrix {
        let n = self.n;
        let shape = BipartiteShape::square(n);
        let mut w = Matrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let block = self
                    .apply(&Matrix::unit(n, i, j))
                    .expect("unit matrix has the map's dimension");
                for p in 0..n {
                    for q in 0..n {
                        w[(shape.index(i, p), shape.index(j, q))] = block[(p, q)] * (n as f64 - 1.0);
                    }
                }
            }
        }
        w
    }
}

/// Doubly stochastic `n×n` matrix `Φ_ij`, stored 0-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StochasticMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Shape(format!("{} entries for n = {n}", entries.len())));
        }
        let m = Self { n, entries };
        let defect = m.stochastic_defect();
        if defect > 1e-10 {
            return Err(Error::Validation(format!(
                "matrix is not doubly stochastic (defect {defect:.3e})"
            )));
        }
        Ok(m)
    }

    /// Circulant matrix with first row `first_row / (n-1)`: row `i` reads the
    /// values starting at column `i` cyclically.
    pub fn circulant(first_row: &[f64]) -> Result<Self> {
        let n = first_row.len();
        let scale = 1.0 / (n as f64 - 1.0);
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| first_row[(j + n - i) % n] * scale)
            .collect();
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Worst of: negative entries, row-sum and column-sum deviation from 1.
    pub fn stochastic_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            let row: f64 = (0..n).map(|j| self.get(i, j)).sum();
            let col: f64 = (0..n).map(|j| self.get(j, i)).sum();
            worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        let most_negative = self.entries.iter().copied().fold(0.0f64, f64::min);
        // tiny negatives within round-off are tolerated by the caller's threshold
        worst.max(-most_negative - 1e-12).max(0.0)
    }

    /// `(1/n) Σ_i (n-1) Φ_{i, i+o}` for each cyclic offset `o`; for `n = 4`
    /// this is `(a, b, c, d)`.
    pub fn circulant_average(&self) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|o| (0..n).map(|i| self.get(i, (i + o) % n)).sum::<f64>() * (n as f64 - 1.0) / n as f64)
            .collect()
    }
}

/// `Φ_ij = 1/n + 1/(n-1) Σ_{k,l} ⟨j|d_l|j⟩ 𝓡_kl ⟨i|d_k|i⟩`.
pub fn phi_matrix(embedding: &OrthogonalEmbedding) -> StochasticMatrix {
    let n = embedding.n();
    let block = embedding.small_block();
    let mut entries = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let mut acc = 0.0;
            for k in 1..n {
                for l in 1..n {
                    acc += diagonal_entry(j, l) * block.get(k - 1, l - 1) * diagonal_entry(i, k);
                }
            }
            entries.push(1.0 / n as f64 + acc / (n as f64 - 1.0));
        }
    }
    StochasticMatrix::new(n, entries).expect("orthogonal blocks give doubly stochastic matrices")
}

/// A witness operator on `C^n ⊗ C^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    n: usize,
    operator: Matrix,
}

impl Witness {
    pub fn new(n: usize, operator: Matrix) -> Result<Self> {
        if operator.rows() != n * n || !operator.is_square() {
            return Err(Error::Shape(format!(
                "witness on C^{n} ⊗ C^{n} must be {0}x{0}",
                n * n
            )));
        }
        if !operator.is_hermitian(RECONSTRUCTION_TOL) {
            return Err(Error::NotHermitian {
                defect: operator.hermitian_defect(),
            });
        }
        Ok(Self { n, operator })
    }

    /// `W = Σ_ij |i⟩⟨j| ⊗ W_ij` with `W_ij = −|i⟩⟨j|` off the diagonal and
    /// `W_ii = (n-1) Σ_j Φ_ij |j⟩⟨j|`.
    pub fn from_stochastic(phi: &StochasticMatrix) -> Self {
        let n = phi.n();
        let shape = BipartiteShape::square(n);
        let mut w = Matrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    w[(shape.index(i, i), shape.index(j, j))] = -ONE;
                }
                w[(shape.index(i, j), shape.index(i, j))] =
                    Complex64::new((n as f64 - 1.0) * phi.get(i, j), 0.0);
            }
        }
        Self { n, operator: w }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn operator(&self) -> &Matrix {
        &self.operator
    }

    pub fn into_operator(self) -> Matrix {
        self.operator
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape::square(self.n)
    }

    /// Reads `Φ_ij = ⟨ij|W|ij⟩ / (n-1)` back off the diagonal blocks.
    pub fn induced_phi(&self) -> Vec<f64> {
        let n = self.n;
        let shape = self.shape();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let k = shape.index(i, j);
                self.operator[(k, k)].re / (n as f64 - 1.0)
            })
            .collect()
    }

    /// Largest deviation from the block form: off-diagonal blocks `−|i⟩⟨j|`,
    /// diagonal blocks diagonal.
    pub fn block_form_defect(&self) -> f64 {
        let n = self.n;
        let shape = self.shape();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for p in 0..n {
                    for q in 0..n {
                        let z = self.operator[(shape.index(i, p), shape.index(j, q))];
                        let target = if i != j && p == i && q == j {
                            -ONE
                        } else if i == j && p == q {
                            z
                        } else {
                            Complex64::new(0.0, 0.0)
                        };
                        worst = worst.max((z - target).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Witness assembled from [`phi_matrix`].
pub fn build_witness(embedding: &OrthogonalEmbedding) -> Witness {
    Witness::from_stochastic(&phi_matrix(embedding))
}

/// Independent construction route: `n(n-1) (1 ⊗ Φ_R^#) P⁺_n` evaluated through
/// the full Gell-Mann expansion.
pub fn witness_via_map(embedding: &OrthogonalEmbedding) -> Witness {
    let map = embedding.kossakowski_map().dual();
    Witness::new(embedding.n(), map.choi_operator()).expect("Choi operator of a Hermiticity-preserving map")
}

/// `|Ω⟩ = (1/√n) Σ_i |ii⟩`.
pub fn maximally_entangled_vector(n: usize) -> Vec<Complex64> {
    let shape = BipartiteShape::square(n);
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    let amp = 1.0 / (n as f64).sqrt();
    for i in 0..n {
        v[shape.index(i, i)] = Complex64::new(amp, 0.0);
    }
    v
}

/// `P⁺_n = |Ω⟩⟨Ω|`.
pub fn maximally_entangled_projector(n: usize) -> Matrix {
    Matrix::outer(&maximally_entangled_vector(n))
}

/// Weyl unitaries `U_kl = Σ_m ω^{km} |m⟩⟨m⊕l|` (1-based `m`, `⊕` mod `n`) and
/// the maximally entangled vectors `(I ⊗ U_kl)|Ω⟩`, indexed `k·n + l`.
#[derive(Clone, Debug)]
pub struct WeylSet {
    n: usize,
    unitaries: Vec<Matrix>,
    vectors: Vec<Vec<Complex64>>,
}

impl WeylSet {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("Weyl set needs n >= 2, got {n}")));
        }
        let omega = |p: usize| Complex64::from_polar(1.0, 2.0 * PI * (p % n) as f64 / n as f64);
        let oplus = |m: usize, l: usize| (m - 1 + l) % n + 1;
        let omega_vec = maximally_entangled_vector(n);
        let shape = BipartiteShape::square(n);

        let mut unitaries = Vec::with_capacity(n * n);
        let mut vectors = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                let mut u = Matrix::zeros(n, n);
                for m in 1..=n {
                    u[(ket(m), ket(oplus(m, l)))] = omega(k * m);
                }
                // (I ⊗ U)|Ω⟩
                let mut v = vec![Complex64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    for p in 0..n {
                        let amp = omega_vec[shape.index(i, p)];
                        if amp == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for q in 0..n {
                            v[shape.index(i, q)] += u[(q, p)] * amp;
                        }
                    }
                }
                unitaries.push(u);
                vectors.push(v);
            }
        }
        Ok(Self {
            n,
            unitaries,
            vectors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unitary(&self, k: usize, l: usize) -> &Matrix {
        &self.unitaries[k * self.n + l]
    }

    pub fn vector(&self, k: usize, l: usize) -> &[Complex64] {
        &self.vectors[k * self.n + l]
    }

    pub fn projector(&self, k: usize, l: usize) -> Matrix {
        Matrix::outer(self.vector(k, l))
    }

    pub fn projectors(&self) -> impl Iterator<Item = Matrix> + '_ {
        self.vectors.iter().map(|v| Matrix::outer(v))
    }

    /// `Σ_kl P_kl`, which should be the identity.
    pub fn projector_sum(&self) -> Matrix {
        self.projectors()
            .fold(Matrix::zeros(self.n * self.n, self.n * self.n), |acc, p| &acc + &p)
    }
}

/// `W̃ = Σ_kl Tr(W P_kl) P_kl`.
pub fn twirl(w: &Witness, weyl: &WeylSet) -> Result<Witness> {
    if w.n() != weyl.n() {
        return Err(Error::Shape(format!(
            "witness has n = {} but the Weyl set has n = {}",
            w.n(),
            weyl.n()
        )));
    }
    let dim = w.n() * w.n();
    let mut out = Matrix::zeros(dim, dim);
    for v in &weyl.vectors {
        let weight = w.operator().quadratic_form(v).re;
        out = &out + &Matrix::outer(v).scale(weight);
    }
    Witness::new(w.n(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_angles(rng: &mut ChaCha8Rng) -> EulerAngles {
        EulerAngles::new(
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..PI),
            rng.random_range(0.0..2.0 * PI),
        )
    }

    #[test]
    fn euler_special_cases() {
        let id = euler_rotation(EulerAngles::new(0.0, 0.0, 0.0));
        assert_eq!(id, RealMatrix::identity(3));
        let flip = euler_rotation(EulerAngles::new(0.0, PI, 0.0));
        let want = RealMatrix::from_rows([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
        for (a, b) in flip.as_slice().iter().zip(want.as_slice()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn euler_rotations_are_special_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let r = euler_rotation(random_angles(&mut rng));
            assert!(r.orthogonality_defect() < 1e-12);
            assert_abs_diff_eq!(r.determinant(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn embedding_parity_and_orthogonality() {
        let a = EulerAngles::new(0.3, 1.1, -2.0);
        let p = OrthogonalEmbedding::from_euler(a, Parity::Proper);
        let q = OrthogonalEmbedding::from_euler(a, Parity::Improper);
        assert_eq!(p.parity(), Parity::Proper);
        assert_eq!(OrthogonalEmbedding::new(q.small_block().clone()).unwrap().parity(), Parity::Improper);
        assert!(p.full_rotation().orthogonality_defect() < 1e-12);
        assert_eq!(p.full_rotation().dim(), 15);
        let bad = RealMatrix::from_rows([[1.0, 0.1], [0.0, 1.0]]);
        assert!(matches!(OrthogonalEmbedding::new(bad), Err(Error::Validation(_))));
    }

    #[test]
    fn unital_and_trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [3usize, 4] {
            for _ in 0..100 {
                let block = if n == 4 {
                    let e = OrthogonalEmbedding::from_euler(
                        random_angles(&mut rng),
                        if rng.random_bool(0.5) { Parity::Proper } else { Parity::Improper },
                    );
                    e.small_block().clone()
                } else {
                    let r = planar_rotation(rng.random_range(0.0..2.0 * PI));
                    if rng.random_bool(0.5) { r } else { r.negated() }
                };
                let map = OrthogonalEmbedding::new(block).unwrap().kossakowski_map();
                let id = Matrix::identity(n);
                assert!(map.apply(&id).unwrap().distance(&id) < 1e-12);
                assert!(map.apply_dual(&id).unwrap().distance(&id) < 1e-12);
            }
        }
        let map = OrthogonalEmbedding::from_euler(random_angles(&mut rng), Parity::Proper).kossakowski_map();
        for _ in 0..20 {
            let x = Matrix::from_fn(4, 4, |_, _| Complex64::new(rng.random(), rng.random()));
            assert!((map.apply(&x).unwrap().trace() - x.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn dual_satisfies_trace_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let map = OrthogonalEmbedding::from_euler(random_angles(&mut rng), Parity::Improper).kossakowski_map();
        let x = Matrix::from_fn(4, 4, |_, _| Complex64::new(rng.random(), rng.random()));
        let y = Matrix::from_fn(4, 4, |_, _| Complex64::new(rng.random(), rng.random()));
        let lhs = y.trace_product(&map.apply(&x).unwrap());
        let rhs = map.apply_dual(&y).unwrap().trace_product(&x);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn reflection_gives_reduction_map() {
        for n in 2..=5 {
            let map = OrthogonalEmbedding::reflection(n).unwrap().kossakowski_map();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let x = Matrix::from_fn(n, n, |_, _| Complex64::new(rng.random(), rng.random()));
            let want = (&Matrix::identity(n).scale_complex(x.trace()) - &x).scale(1.0 / (n as f64 - 1.0));
            assert!(map.apply(&x).unwrap().distance(&want) < 1e-12);
        }
    }

    #[test]
    fn off_diagonal_units_are_scaled() {
        let e = OrthogonalEmbedding::from_euler(EulerAngles::new(0.4, 0.9, 2.2), Parity::Proper);
        let map = e.kossakowski_map();
        let out = map.apply(&Matrix::unit(4, 0, 1)).unwrap();
        assert!(out.distance(&Matrix::unit(4, 0, 1).scale(-1.0 / 3.0)) < 1e-12);
    }

    #[test]
    fn diagonal_units_follow_phi_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let e = OrthogonalEmbedding::from_euler(random_angles(&mut rng), Parity::Proper);
            let phi = phi_matrix(&e);
            let map = e.kossakowski_map();
            for i in 0..4 {
                let want_dual = Matrix::diag_real(&(0..4).map(|j| phi.get(i, j)).collect::<Vec<_>>());
                let want = Matrix::diag_real(&(0..4).map(|j| phi.get(j, i)).collect::<Vec<_>>());
                let unit = Matrix::unit(4, i, i);
                assert!(map.apply_dual(&unit).unwrap().distance(&want_dual) < 1e-12);
                assert!(map.apply(&unit).unwrap().distance(&want) < 1e-12);
            }
        }
    }

    #[test]
    fn phi_matrix_special_blocks() {
        let id = OrthogonalEmbedding::from_euler(EulerAngles::new(0.0, 0.0, 0.0), Parity::Proper);
        let avg = phi_matrix(&id).circulant_average();
        for (got, want) in avg.iter().zip([1.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let reduction = phi_matrix(&OrthogonalEmbedding::reflection(4).unwrap());
        let want = StochasticMatrix::circulant(&[0.0, 1.0, 1.0, 1.0]).unwrap();
        for (a, b) in reduction.entries().iter().zip(want.entries()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn phi_matrix_is_doubly_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let e = OrthogonalEmbedding::from_euler(random_angles(&mut rng), Parity::Proper);
            assert!(phi_matrix(&e).stochastic_defect() < 1e-10);
        }
    }

    #[test]
    fn reduction_witness_shape() {
        let w = build_witness(&OrthogonalEmbedding::reflection(4).unwrap());
        let shape = w.shape();
        for i in 0..4 {
            for j in 0..4 {
                let diag = w.operator()[(shape.index(i, j), shape.index(i, j))].re;
                assert_abs_diff_eq!(diag, if i == j { 0.0 } else { 1.0 }, epsilon = 1e-12);
                if i != j {
                    assert_eq!(w.operator()[(shape.index(i, i), shape.index(j, j))].re, -1.0);
                }
            }
        }
    }

    #[test]
    fn witness_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for k in 0..50 {
            let parity = if k % 2 == 0 { Parity::Proper } else { Parity::Improper };
            let e = OrthogonalEmbedding::from_euler(random_angles(&mut rng), parity);
            let w = build_witness(&e);
            let via_map = witness_via_map(&e);
            assert!(w.operator().distance(via_map.operator()) < 1e-12);
            assert_abs_diff_eq!(w.operator().trace().re, 12.0, epsilon = 1e-12);
            assert!(w.block_form_defect() < 1e-12);
        }
    }

    #[test]
    fn weyl_set_structure() {
        let weyl = WeylSet::new(4).unwrap();
        assert_eq!(weyl.unitary(0, 0), &Matrix::identity(4));
        let shift = Matrix::from_fn(4, 4, |r, c| if c == (r + 1) % 4 { ONE } else { Complex64::new(0.0, 0.0) });
        assert!(weyl.unitary(0, 1).distance(&shift) < 1e-15);
        for k in 0..4 {
            for l in 0..4 {
                let u = weyl.unitary(k, l);
                assert!((&u.adjoint() * u).distance(&Matrix::identity(4)) < 1e-12);
            }
        }
        assert!(weyl.projector_sum().distance(&Matrix::identity(16)) < 1e-10);
        assert!(matches!(WeylSet::new(1), Err(Error::Domain(_))));
    }

    #[test]
    fn qubit_weyl_projectors_are_bell_states() {
        let weyl = WeylSet::new(2).unwrap();
        assert!(weyl.projector_sum().distance(&Matrix::identity(4)) < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = [
            [h, 0.0, 0.0, h],
            [0.0, h, h, 0.0],
            [h, 0.0, 0.0, -h],
            [0.0, h, -h, 0.0],
        ];
        for (idx, b) in bell.iter().enumerate() {
            let v: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            let want = Matrix::outer(&v);
            let got = weyl.projector(idx / 2, idx % 2);
            assert!(got.distance(&want) < 1e-12, "k,l = {}, {}", idx / 2, idx % 2);
        }
    }

    #[test]
    fn twirl_fixes_circulant_and_preserves_trace() {
        let weyl = WeylSet::new(4).unwrap();
        let circ = Witness::from_stochastic(&StochasticMatrix::circulant(&[1.0, 1.0, 1.0, 0.0]).unwrap());
        let t = twirl(&circ, &weyl).unwrap();
        assert!(t.operator().distance(circ.operator()) < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let w = build_witness(&OrthogonalEmbedding::from_euler(random_angles(&mut rng), Parity::Proper));
        let t = twirl(&w, &weyl).unwrap();
        assert!((t.operator().trace() - w.operator().trace()).norm() < 1e-12);
        assert!(t.block_form_defect() < 1e-12);
    }
}
