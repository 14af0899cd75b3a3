//! Positive maps and entanglement witnesses built from orthogonal rotations of
//! the generalized Gell-Mann basis.
//!
//! The pipeline runs rotation → doubly stochastic matrix → witness → Weyl
//! twirl → circulant parameters `(a, b, c, d)`, then classifies the result on
//! the two quadric cones in `(b, c, d)` space and issues certificates for
//! decomposability and for the structural physical approximation.
//!
//! Indices in formulas are 1-based; [`basis::ket`] is the only place they turn
//! into storage offsets.

pub mod appendix;
pub mod basis;
pub mod certify;
pub mod cones;
pub mod errata;
pub mod error;
pub mod family;
pub mod maps;
pub mod numerics;
pub mod spa;

pub use basis::{BasisLabel, GellMannBasis};
pub use certify::{
    block_positivity_min, certify_decomposability, detect, pairing, probe_state, Certificate,
    Evidence, PptProbe, Verdict,
};
pub use cones::{cone_residuals, ConeId, ConeReport, ConeSelection};
pub use errata::Erratum;
pub use error::{Error, Result};
pub use family::{abcd_from_euler, witness_from_params, N3Params, Provenance, WitnessParams};
pub use maps::{
    build_witness, twirl, EulerAngles, KossakowskiMap, OrthogonalEmbedding, Parity,
    StochasticMatrix, WeylSet, Witness,
};
pub use numerics::{hermitian_eig, partial_transpose, BipartiteShape, EigenResult, Matrix, RealMatrix};
pub use spa::{critical_p, spa_decompose, spa_mix, SpaResult};
