//! Linearised eigenproblems and the non-degeneracy certificate.
//!
//! Every generalised problem `Lφ = θVφ` (`L = −Δₕ`, `V ≥ 0` diagonal) is
//! solved through the symmetric operator `V^{1/2}L⁻¹V^{1/2}`, whose largest
//! eigenvalues are the `1/θ`. This is inverse iteration at shift 0, it stays
//! well defined where `V` vanishes, and the eigenfunctions are recovered as
//! `φ = L⁻¹V^{1/2}y`.

mod certificate;
mod coupled;
mod density;
mod lemma;
mod ops;
mod scalar;

use serde::{Deserialize, Serialize};

pub use certificate::{nondegeneracy_certificate, CertificateOptions, Check, EigenReport};
pub use coupled::{coupled_form_min, coupled_form_min_boundary, CoupledEigen};
pub use density::{assemble_densities, DensityField};
pub use lemma::{lemma_certificate, subsolution_check, LemmaReport, SubsolutionCheck};
pub use ops::{top_pairs, EigenMethod};
pub use scalar::{scalar_eigen_constrained, scalar_eigen_dirichlet, ScalarEigen};

/// Eigenvalues within this distance of zero are neither positive nor negative.
pub const POSITIVITY_MARGIN: f64 = 1e-10;

/// Subsolution margins must not exceed this.
pub const MARGIN_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Within [`POSITIVITY_MARGIN`] of zero.
    Inconclusive,
    /// Outside the hypotheses under which the check is meaningful; reported only.
    NotRequired,
}

impl Verdict {
    pub fn positivity(x: f64) -> Verdict {
        if x > POSITIVITY_MARGIN {
            Verdict::Pass
        } else if x.abs() <= POSITIVITY_MARGIN {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    }

    /// `Some(x)` is checked for positivity, `None` (a vacuous form) passes.
    pub fn positivity_opt(x: Option<f64>) -> Verdict {
        x.map_or(Verdict::Pass, Verdict::positivity)
    }

    pub fn is_blocking(self) -> bool {
        matches!(self, Verdict::Fail | Verdict::Inconclusive)
    }
}

#[cfg(test)]
mod tests;
