//! Generalized Gell-Mann basis of `M_n(C)`.
//!
//! Element order is frozen: `[f_0, d_1..d_{n-1}, u_kl.., v_kl..]` with the
//! off-diagonal pairs `k < l` in lexicographic order. Labels use the 1-based
//! ket convention `|1⟩..|n⟩`; storage is 0-based and [`ket`] is the only place
//! the two meet.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Storage index of the 1-based ket `|k⟩`.
#[inline]
pub fn ket(k: usize) -> usize {
    debug_assert!(k >= 1, "kets are 1-based");
    k - 1
}

/// What a basis element is, in 1-based ket labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisLabel {
    /// `f_0 = I/√n`
    Identity,
    /// `d_l`, `1 ≤ l ≤ n-1`
    Diagonal { l: usize },
    /// `u_kl = (|k⟩⟨l| + |l⟩⟨k|)/√2`
    Symmetric { k: usize, l: usize },
    /// `v_kl = -i(|k⟩⟨l| - |l⟩⟨k|)/√2`
    Antisymmetric { k: usize, l: usize },
}

#[derive(Clone, Debug)]
pub struct GellMannBasis {
    n: usize,
    elements: Vec<Matrix>,
    labels: Vec<BasisLabel>,
}

/// `⟨i|d_l|i⟩` for 1-based `i` and `l`.
pub fn diagonal_entry(i: usize, l: usize) -> f64 {
    let norm = ((l * (l + 1)) as f64).sqrt();
    if i <= l {
        1.0 / norm
    } else if i == l + 1 {
        -(l as f64) / norm
    } else {
        0.0
    }
}

/// `⟨i|d_l|i⟩` as an exact signed square: `(negative, num, den)` with
/// `⟨i|d_l|i⟩ = ±√(num/den)`.
pub fn diagonal_entry_squared(i: usize, l: usize) -> (bool, u64, u64) {
    let prod = (l * (l + 1)) as u64;
    if i <= l {
        (false, 1, prod)
    } else if i == l + 1 {
        (true, (l * l) as u64, prod)
    } else {
        (false, 0, 1)
    }
}

impl GellMannBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("basis needs n >= 2, got {n}")));
        }
        let mut elements = Vec::with_capacity(n * n);
        let mut labels = Vec::with_capacity(n * n);

        elements.push(Matrix::identity(n).scale(1.0 / (n as f64).sqrt()));
        labels.push(BasisLabel::Identity);

        for l in 1..n {
            let diag: Vec<f64> = (1..=n).map(|i| diagonal_entry(i, l)).collect();
            elements.push(Matrix::diag_real(&diag));
            labels.push(BasisLabel::Diagonal { l });
        }

        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|k| ((k + 1)..=n).map(move |l| (k, l)))
            .collect();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for &(k, l) in &pairs {
            let mut m = Matrix::zeros(n, n);
            m[(ket(k), ket(l))] = Complex64::new(h, 0.0);
            m[(ket(l), ket(k))] = Complex64::new(h, 0.0);
            elements.push(m);
            labels.push(BasisLabel::Symmetric { k, l });
        }
        for &(k, l) in &pairs {
            let mut m = Matrix::zeros(n, n);
            m[(ket(k), ket(l))] = Complex64::new(0.0, -h);
            m[(ket(l), ket(k))] = Complex64::new(0.0, h);
            elements.push(m);
            labels.push(BasisLabel::Antisymmetric { k, l });
        }

        Ok(Self { n, elements, labels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, alpha: usize) -> &Matrix {
        &self.elements[alpha]
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn label(&self, alpha: usize) -> BasisLabel {
        self.labels[alpha]
    }

    /// Inverse of [`label`](Self::label).
    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        let n = self.n;
        let pair_count = n * (n - 1) / 2;
        let pair_rank = |k: usize, l: usize| -> Option<usize> {
            if !(1 <= k && k < l && l <= n) {
                return None;
            }
            // pairs with first index < k, then offset within row k
            let before: usize = (1..k).map(|r| n - r).sum();
            Some(before + (l - k - 1))
        };
        match label {
            BasisLabel::Identity => Some(0),
            BasisLabel::Diagonal { l } if (1..n).contains(&l) => Some(l),
            BasisLabel::Diagonal { .. } => None,
            BasisLabel::Symmetric { k, l } => pair_rank(k, l).map(|r| n + r),
            BasisLabel::Antisymmetric { k, l } => pair_rank(k, l).map(|r| n + pair_count + r),
        }
    }

    /// Coefficients `c_α = Tr(f_α X)`.
    pub fn expand(&self, x: &Matrix) -> Result<Vec<Complex64>> {
        if x.rows() != self.n || x.cols() != self.n {
            return Err(Error::Shape(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                self.n,
                x.rows(),
                x.cols()
            )));
        }
        Ok(self.elements.iter().map(|f| f.trace_product(x)).collect())
    }

    /// `Σ_α c_α f_α`.
    pub fn reconstruct(&self, coefficients: &[Complex64]) -> Matrix {
        assert_eq!(coefficients.len(), self.len());
        let mut out = Matrix::zeros(self.n, self.n);
        for (c, f) in coefficients.iter().zip(&self.elements) {
            out = &out + &f.scale_complex(*c);
        }
        out
    }

    /// Largest deviation of `Tr(f_α f_β)` from `δ_αβ`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (a, fa) in self.elements.iter().enumerate() {
            for (b, fb) in self.elements.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((fa.trace_product(fb) - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_small_n() {
        assert!(matches!(GellMannBasis::new(1), Err(Error::Domain(_))));
    }

    #[test]
    fn qubit_basis_is_scaled_pauli() {
        let b = GellMannBasis::new(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(b.len(), 4);
        assert!(b.element(1).distance(&Matrix::diag_real(&[h, -h])) < 1e-15);
        let x = Matrix::from_real(2, 2, &[0.0, h, h, 0.0]).unwrap();
        assert!(b.element(2).distance(&x) < 1e-15);
        let y = Matrix::from_vec(
            2,
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -h),
                Complex64::new(0.0, h),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert!(b.element(3).distance(&y) < 1e-15);
    }

    #[test]
    fn qutrit_second_diagonal() {
        let b = GellMannBasis::new(3).unwrap();
        let s = 1.0 / 6f64.sqrt();
        assert!(b.element(2).distance(&Matrix::diag_real(&[s, s, -2.0 * s])) < 1e-15);
    }

    #[test]
    fn orthonormal_and_traceless() {
        for n in 2..=6 {
            let b = GellMannBasis::new(n).unwrap();
            assert_eq!(b.len(), n * n);
            assert!(b.gram_defect() < 1e-12, "n={n}");
            for f in &b.elements()[1..] {
                assert!(f.trace().norm() < 1e-12);
                assert!(f.is_hermitian(1e-15));
            }
        }
    }

    #[test]
    fn label_index_roundtrip() {
        for n in 2..=6 {
            let b = GellMannBasis::new(n).unwrap();
            for alpha in 0..b.len() {
                assert_eq!(b.index_of(b.label(alpha)), Some(alpha));
            }
        }
        let b = GellMannBasis::new(4).unwrap();
        assert_eq!(b.index_of(BasisLabel::Diagonal { l: 4 }), None);
        assert_eq!(b.index_of(BasisLabel::Symmetric { k: 2, l: 2 }), None);
    }

    #[test]
    fn diagonal_entries_match_elements() {
        for n in 2..=6 {
            let b = GellMannBasis::new(n).unwrap();
            for l in 1..n {
                let d = b.element(b.index_of(BasisLabel::Diagonal { l }).unwrap());
                for i in 1..=n {
                    assert_eq!(d[(ket(i), ket(i))].re, diagonal_entry(i, l));
                    let (neg, num, den) = diagonal_entry_squared(i, l);
                    let v = (num as f64 / den as f64).sqrt() * if neg { -1.0 } else { 1.0 };
                    assert!((v - diagonal_entry(i, l)).abs() < 1e-15);
                }
            }
            // diagonal sector commutes exactly
            for l in 1..n {
                for m in 1..n {
                    let (x, y) = (b.element(l), b.element(m));
                    assert_eq!(&(x * y) - &(y * x), Matrix::zeros(n, n));
                }
            }
        }
    }

    #[test]
    fn expand_identity_and_basis_element() {
        let b = GellMannBasis::new(4).unwrap();
        let c = b.expand(&Matrix::identity(4)).unwrap();
        assert!((c[0].re - 2.0).abs() < 1e-14);
        assert!(c[1..].iter().all(|z| z.norm() < 1e-14));
        let c = b.expand(b.element(3)).unwrap();
        for (alpha, z) in c.iter().enumerate() {
            let want = if alpha == 3 { 1.0 } else { 0.0 };
            assert!((z - want).norm() < 1e-14);
        }
        assert!(matches!(b.expand(&Matrix::identity(3)), Err(Error::Shape(_))));
    }

    #[test]
    fn expansion_is_complete_and_real_for_hermitian() {
        let b = GellMannBasis::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let x = Matrix::from_fn(4, 4, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            let c = b.expand(&x).unwrap();
            assert!(b.reconstruct(&c).distance(&x) < 1e-12);

            let h = (&x + &x.adjoint()).scale(0.5);
            assert!(b.expand(&h).unwrap().iter().all(|z| z.im.abs() < 1e-12));
        }
    }
}
