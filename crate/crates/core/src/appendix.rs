//! The sixteen pre-twirl entries `a_i, b_i, c_i, d_i` of `3Φ` for the `n = 4`
//! family, as a published linear table in the entries `R_mn` of `𝓡`.
//!
//! The table is kept verbatim and audited coefficient by coefficient against
//! the exact value implied by `Φ_ij`: the coefficient of `R_kl` in `3Φ_ij` is
//! `⟨i|d_k|i⟩⟨j|d_l|j⟩`. Both sides are compared as signed squares of
//! rationals, so the audit is exact. Any mismatch becomes an [`Erratum`] and
//! evaluation uses the corrected coefficient.

use std::sync::OnceLock;

use serde::Serialize;

use crate::basis::diagonal_entry_squared;
use crate::errata::Erratum;
use crate::numerics::RealMatrix;

/// `±num / (den·√root)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Coefficient {
    pub negative: bool,
    pub num: u64,
    pub den: u64,
    pub root: u64,
}

impl Coefficient {
    const fn new(negative: bool, num: u64, den: u64, root: u64) -> Self {
        Self {
            negative,
            num,
            den,
            root,
        }
    }

    pub fn value(&self) -> f64 {
        let v = self.num as f64 / (self.den as f64 * (self.root as f64).sqrt());
        if self.negative {
            -v
        } else {
            v
        }
    }

    /// `(negative, p, q)` with `|value|² = p/q` in lowest terms.
    fn signed_square(&self) -> (bool, u64, u64) {
        reduce(self.negative, self.num * self.num, self.den * self.den * self.root)
    }

    /// Finds a `num/(den√root)` form for an exact signed square.
    fn from_signed_square(negative: bool, p: u64, q: u64) -> Option<Self> {
        if p == 0 {
            return Some(Self::new(false, 0, 1, 1));
        }
        [1u64, 2, 3, 6].into_iter().find_map(|root| {
            let (_, pp, qq) = reduce(false, p * root, q);
            let (num, den) = (isqrt(pp)?, isqrt(qq)?);
            Some(Self::new(negative, num, den, root))
        })
    }
}

impl std::fmt::Display for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.num == 0 {
            return write!(f, "0");
        }
        let sign = if self.negative { "-" } else { "+" };
        match (self.den, self.root) {
            (1, 1) => write!(f, "{sign}{}", self.num),
            (den, 1) => write!(f, "{sign}{}/{den}", self.num),
            (1, root) => write!(f, "{sign}{}/√{root}", self.num),
            (den, root) => write!(f, "{sign}{}/({den}√{root})", self.num),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn reduce(negative: bool, p: u64, q: u64) -> (bool, u64, u64) {
    if p == 0 {
        return (false, 0, 1);
    }
    let g = gcd(p, q);
    (negative, p / g, q / g)
}

fn isqrt(x: u64) -> Option<u64> {
    let r = (x as f64).sqrt().round() as u64;
    (r * r == x).then_some(r)
}

/// One `±coef · R_mn` term, 1-based indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coefficient: Coefficient,
    pub m: usize,
    pub n: usize,
}

/// A named entry `3/4 + Σ terms` placed at `(row, col)` of `3Φ` (1-based).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryFormula {
    pub name: &'static str,
    pub row: usize,
    pub col: usize,
    pub terms: Vec<Term>,
}

impl EntryFormula {
    pub fn evaluate(&self, r: &RealMatrix) -> f64 {
        0.75 + self
            .terms
            .iter()
            .map(|t| t.coefficient.value() * r.get(t.m - 1, t.n - 1))
            .sum::<f64>()
    }
}

type RawTerm = (bool, u64, u64, u64, usize, usize);

const P: bool = false;
const M: bool = true;

// (negative, num, den, root, m, n): ±num/(den√root) · R_mn, in printed order
#[rustfmt::skip]
const PRINTED: [(&str, &[RawTerm]); 16] = [
    ("a_1", &[(P,1,2,1,1,1),(P,1,2,3,1,2),(P,1,2,6,1,3),(P,1,2,3,2,1),(P,1,6,1,2,2),(P,1,6,2,2,3),(P,1,2,6,3,1),(P,1,6,2,3,2),(P,1,12,1,3,3)]),
    ("a_2", &[(M,1,2,3,2,1),(P,1,6,1,2,2),(P,1,6,3,2,3),(P,1,2,1,1,1),(M,1,2,3,1,2),(M,1,2,6,1,3),(M,1,2,6,3,1),(P,1,6,2,3,2),(P,1,12,1,3,3)]),
    ("a_3", &[(M,1,3,2,3,2),(P,1,12,1,3,3),(P,2,3,1,2,2),(M,1,3,2,2,3)]),
    ("a_4", &[(P,9,12,1,3,3)]),
    ("b_1", &[(M,1,2,1,1,1),(P,1,2,3,1,2),(P,1,2,6,1,3),(M,1,2,3,2,1),(P,1,6,1,2,2),(P,1,6,2,2,3),(M,1,2,6,3,1),(P,1,6,2,3,2),(P,1,12,1,3,3)]),
    ("b_2", &[(P,1,1,3,1,2),(M,1,2,6,1,3),(M,1,3,1,2,2),(P,1,6,2,2,3),(M,1,3,2,3,2),(P,1,12,1,3,3)]),
    ("b_3", &[(M,3,12,1,3,3),(P,1,1,2,2,3)]),
    ("b_4", &[(M,3,2,6,3,1),(M,1,2,2,3,2),(M,3,12,1,3,3)]),
    ("c_1", &[(M,1,1,3,1,2),(P,1,2,6,1,3),(M,1,3,1,2,2),(P,1,6,2,2,3),(M,1,3,2,3,2),(P,1,12,1,3,3)]),
    ("c_2", &[(M,1,2,2,2,3),(P,3,2,6,1,3),(M,3,12,1,3,3)]),
    ("c_3", &[(P,1,2,6,3,1),(P,1,6,2,3,2),(P,1,12,1,3,3),(M,1,1,3,2,1),(M,1,3,1,2,2),(M,1,3,2,2,3)]),
    ("c_4", &[(P,3,2,6,3,1),(M,1,2,2,3,2),(M,3,12,1,3,3)]),
    ("d_1", &[(M,3,2,6,1,3),(M,1,2,2,2,3),(M,1,4,1,3,3)]),
    ("d_2", &[(P,1,2,3,2,1),(P,1,6,1,2,2),(P,1,6,2,2,3),(M,1,2,1,1,1),(M,1,2,3,1,2),(M,1,2,6,1,3),(P,1,2,6,3,1),(P,1,6,2,3,2),(P,1,12,1,3,3)]),
    ("d_3", &[(M,1,2,6,3,1),(P,1,6,2,3,2),(P,1,12,1,3,3),(P,1,1,3,2,1),(M,1,3,1,2,2),(M,1,3,2,2,3)]),
    ("d_4", &[(P,1,1,2,3,2),(M,3,12,1,3,3)]),
];

/// 1-based `(row, col)` of a named entry: row `i` carries `a_i, b_i, c_i, d_i`
/// at cyclic offsets `0, 1, 2, 3`.
fn position(name: &str) -> (usize, usize) {
    let bytes = name.as_bytes();
    let offset = (bytes[0] - b'a') as usize;
    let row = (bytes[2] - b'0') as usize;
    (row, (row - 1 + offset) % 4 + 1)
}

/// The table exactly as printed.
pub fn printed_table() -> Vec<EntryFormula> {
    PRINTED
        .iter()
        .map(|(name, raw)| {
            let (row, col) = position(name);
            EntryFormula {
                name,
                row,
                col,
                terms: raw
                    .iter()
                    .map(|&(neg, num, den, root, m, n)| Term {
                        coefficient: Coefficient::new(neg, num, den, root),
                        m,
                        n,
                    })
                    .collect(),
            }
        })
        .collect()
}

/// Exact coefficient of `R_kl` in `3Φ_ij`: `⟨i|d_k|i⟩⟨j|d_l|j⟩`.
fn exact_coefficient(i: usize, j: usize, k: usize, l: usize) -> (bool, u64, u64) {
    let (ni, pi, qi) = diagonal_entry_squared(i, k);
    let (nj, pj, qj) = diagonal_entry_squared(j, l);
    reduce(ni ^ nj, pi * pj, qi * qj)
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub errata: Vec<Erratum>,
    pub corrected: Vec<EntryFormula>,
}

/// Audits the printed table and returns the errata plus the corrected table.
pub fn audit() -> &'static AuditReport {
    static REPORT: OnceLock<AuditReport> = OnceLock::new();
    REPORT.get_or_init(run_audit)
}

fn run_audit() -> AuditReport {
    let mut errata = Vec::new();
    let mut corrected = Vec::new();
    for entry in printed_table() {
        let mut fixed = Vec::new();
        for k in 1..=3 {
            for l in 1..=3 {
                let printed: Vec<&Term> = entry.terms.iter().filter(|t| t.m == k && t.n == l).collect();
                let exact = exact_coefficient(entry.row, entry.col, k, l);
                let exact_coef = Coefficient::from_signed_square(exact.0, exact.1, exact.2)
                    .expect("diagonal Gell-Mann products are num/(den√root) with root | 6");
                let matches = match printed.as_slice() {
                    [] => exact.1 == 0,
                    [t] => t.coefficient.signed_square() == exact,
                    _ => false,
                };
                if !matches {
                    let printed_form = if printed.is_empty() {
                        "0".to_string()
                    } else {
                        printed.iter().map(|t| t.coefficient.to_string()).collect::<Vec<_>>().join(" ")
                    };
                    errata.push(Erratum {
                        id: format!("pretwirl-{}-R{k}{l}", entry.name.replace('_', "")),
                        location: format!("{}, coefficient of R_{k}{l}", entry.name),
                        printed: printed_form,
                        corrected: exact_coef.to_string(),
                        reason: "exact value <i|d_k|i><j|d_l|j> of the coefficient in 3*Phi_ij".into(),
                    });
                }
                if exact.1 != 0 {
                    fixed.push(Term {
                        coefficient: exact_coef,
                        m: k,
                        n: l,
                    });
                }
            }
        }
        // keep printed order where the term was printed
        fixed.sort_by_key(|t| {
            entry
                .terms
                .iter()
                .position(|p| p.m == t.m && p.n == t.n)
                .unwrap_or(usize::MAX)
        });
        corrected.push(EntryFormula {
            terms: fixed,
            ..entry
        });
    }
    AuditReport { errata, corrected }
}

/// Pre-twirl entries of `3Φ` for an orthogonal `3×3` block, evaluated from the
/// corrected table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AppendixEntries {
    pub a: [f64; 4],
    pub b: [f64; 4],
    pub c: [f64; 4],
    pub d: [f64; 4],
}

impl AppendixEntries {
    /// The assembled `3Φ` matrix, 0-based row-major.
    pub fn assembled(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for (o, series) in [self.a, self.b, self.c, self.d].iter().enumerate() {
                m[i][(i + o) % 4] = series[i];
            }
        }
        m
    }

    /// `(¼Σa_i, ¼Σb_i, ¼Σc_i, ¼Σd_i)`.
    pub fn averages(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d].map(|s| s.iter().sum::<f64>() / 4.0)
    }
}

pub fn appendix_entries(block: &RealMatrix) -> AppendixEntries {
    evaluate_table(&audit().corrected, block)
}

/// Evaluates the table exactly as printed, errors included.
pub fn printed_entries(block: &RealMatrix) -> AppendixEntries {
    evaluate_table(&printed_table(), block)
}

fn evaluate_table(table: &[EntryFormula], block: &RealMatrix) -> AppendixEntries {
    assert_eq!(block.dim(), 3, "pre-twirl entries need a 3x3 block");
    let mut out = AppendixEntries {
        a: [0.0; 4],
        b: [0.0; 4],
        c: [0.0; 4],
        d: [0.0; 4],
    };
    for entry in table {
        let bytes = entry.name.as_bytes();
        let row = (bytes[2] - b'1') as usize;
        let value = entry.evaluate(block);
        match bytes[0] {
            b'a' => out.a[row] = value,
            b'b' => out.b[row] = value,
            b'c' => out.c[row] = value,
            _ => out.d[row] = value,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{euler_rotation, phi_matrix, EulerAngles, OrthogonalEmbedding, Parity};

    #[test]
    fn positions_follow_circulant_layout() {
        assert_eq!(position("a_1"), (1, 1));
        assert_eq!(position("b_1"), (1, 2));
        assert_eq!(position("d_2"), (2, 1));
        assert_eq!(position("b_4"), (4, 1));
        assert_eq!(position("c_3"), (3, 1));
    }

    #[test]
    fn coefficient_rendering() {
        assert_eq!(Coefficient::new(false, 1, 6, 2).to_string(), "+1/(6√2)");
        assert_eq!(Coefficient::new(true, 9, 12, 1).to_string(), "-9/12");
        assert_eq!(Coefficient::new(false, 1, 1, 3).to_string(), "+1/√3");
        let c = Coefficient::from_signed_square(false, 1, 72).unwrap();
        assert_eq!(c.to_string(), "+1/(6√2)");
    }

    #[test]
    fn audit_flags_only_the_a2_r23_coefficient() {
        let report = audit();
        assert_eq!(report.errata.len(), 1, "{:#?}", report.errata);
        let e = &report.errata[0];
        assert_eq!(e.id, "pretwirl-a2-R23");
        assert_eq!(e.printed, "+1/(6√3)");
        assert_eq!(e.corrected, "+1/(6√2)");
    }

    #[test]
    fn identity_block_values() {
        let e = appendix_entries(&RealMatrix::identity(3));
        assert!((e.a[3] - 1.5).abs() < 1e-15);
        assert!((e.d[3] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn corrected_table_matches_phi_matrix() {
        let block = euler_rotation(EulerAngles::new(0.3, 1.2, 2.5));
        let entries = appendix_entries(&block);
        let phi = phi_matrix(&OrthogonalEmbedding::from_euler(EulerAngles::new(0.3, 1.2, 2.5), Parity::Proper));
        let m = entries.assembled();
        for (i, row) in m.iter().enumerate() {
            assert!((row.iter().sum::<f64>() - 3.0).abs() < 1e-10);
            for (j, x) in row.iter().enumerate() {
                assert!((x - 3.0 * phi.get(i, j)).abs() < 1e-12);
            }
        }
        // the printed a_2 is off for a generic rotation
        assert!((printed_entries(&block).a[1] - m[1][1]).abs() > 1e-3);
    }
}
