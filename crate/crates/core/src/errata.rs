//! Corrections applied to published formulas.
//!
//! Each [`Erratum`] records where a printed formula was found to disagree with
//! a first-principles computation, what was printed, and what the crate uses.
//! Coefficient errata in the pre-twirl table are discovered by
//! [`crate::appendix::audit`]; the SPA entries are fixed here.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Erratum {
    pub id: String,
    pub location: String,
    pub printed: String,
    pub corrected: String,
    pub reason: String,
}

pub const SPA_CRITICAL_P: &str = "spa-critical-p-sign";
pub const SPA_NORMALIZATION: &str = "spa-normalization-sign";
pub const DUAL_ORIENTATION: &str = "phi-matrix-dual-orientation";

/// The two sign corrections for the structural physical approximation.
pub fn spa_errata() -> Vec<Erratum> {
    vec![
        Erratum {
            id: SPA_CRITICAL_P.into(),
            location: "critical mixing parameter p*".into(),
            printed: "4(a-3)/(3+4(a-3))".into(),
            corrected: "4(3-a)/(3+4(3-a)) = 4(3-a)/(15-4a)".into(),
            reason: "lambda_min(W/12) = (a-3)/12; the printed form exceeds 1 for a < 9/4 (1.6 at a = 1)"
                .into(),
        },
        Erratum {
            id: SPA_NORMALIZATION.into(),
            location: "prefactor of the separable decomposition of W(p*)".into(),
            printed: "1/(4[3+4(a-3)])".into(),
            corrected: "1/(4[3+4(3-a)]) = 1/(4(15-4a))".into(),
            reason: "W + (3-a)I = sum_{i<j} sigma_ij + sigma_d and W(p*) = (1-p*)/12 (W + (3-a)I)".into(),
        },
    ]
}

/// Orientation of the doubly stochastic matrix relative to the map.
pub fn orientation_erratum() -> Erratum {
    Erratum {
        id: DUAL_ORIENTATION.into(),
        location: "diagonal action of the map on |i><i|".into(),
        printed: "Phi_R(|i><i|) = sum_j Phi_ij |j><j|".into(),
        corrected: "Phi_R^#(|i><i|) = sum_j Phi_ij |j><j|, equivalently Phi_R(|i><i|) = sum_j Phi_ji |j><j|"
            .into(),
        reason: "the printed Phi_ij contracts <j|d_l|j> R_kl <i|d_k|i>, which is the transpose of the \
                 action of Phi_R; the twirled closed forms and the pre-twirl table follow Phi_ij as printed"
            .into(),
    }
}
