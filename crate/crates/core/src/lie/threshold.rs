use std::f64::consts::PI;

use serde::Serialize;

use super::cartan::{build_cartan, symmetric_decomposition};
use super::family::{Family, LieFamily};
use super::spectrum::{spectral_radius, SpectrumMethod};
use crate::error::Result;

/// Universal sufficient bound `λᵢˢ ≤ 2π`, valid because `ρ(Aˢ) ≤ 4`.
pub const SAFE_BOUND: f64 = 2.0 * PI;

/// Uniqueness/non-degeneracy box `λᵢˢ = dᵢλᵢ ≤ 8π/ρ(Aˢ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub algebra: LieFamily,
    pub rho: f64,
    pub eigenvalues: Vec<f64>,
    /// `8π/ρ(Aˢ)`, the bound on every `λᵢˢ`.
    pub lambda_s_max: f64,
    /// `8π/(dᵢ ρ(Aˢ))`, the bound on the original `λᵢ`.
    pub lambda_max: Vec<f64>,
    pub d: Vec<f64>,
    pub safe_bound: f64,
}

impl ThresholdReport {
    /// `s · λ_max`, the point at fraction `s` of the box diagonal.
    pub fn lambda_at(&self, s: f64) -> Vec<f64> {
        self.lambda_max.iter().map(|l| s * l).collect()
    }
}

pub fn uniqueness_thresholds(algebra: LieFamily) -> Result<ThresholdReport> {
    let decomp = symmetric_decomposition(&build_cartan(algebra)?);
    let method = if algebra.family() == Family::A {
        SpectrumMethod::ClosedForm
    } else {
        SpectrumMethod::DenseEig
    };
    let spectrum = spectral_radius(&decomp, method)?;
    let lambda_s_max = 8.0 * PI / spectrum.rho;
    let d = decomp.d_f64();
    Ok(ThresholdReport {
        algebra,
        rho: spectrum.rho,
        eigenvalues: spectrum.eigenvalues,
        lambda_s_max,
        lambda_max: d.iter().map(|di| lambda_s_max / di).collect(),
        d,
        safe_bound: SAFE_BOUND,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn a1_a2_g2() {
        let a1 = uniqueness_thresholds(LieFamily::new(Family::A, 1).unwrap()).unwrap();
        assert_relative_eq!(a1.lambda_s_max, 4.0 * PI, epsilon = 1e-12);

        let a2 = uniqueness_thresholds(LieFamily::new(Family::A, 2).unwrap()).unwrap();
        assert_relative_eq!(a2.lambda_max[0], 8.0 * PI / 3.0, epsilon = 1e-12);
        assert_relative_eq!(a2.lambda_max[1], 8.377_580_409_572_781, epsilon = 1e-10);

        let g2 = uniqueness_thresholds(LieFamily::new(Family::G, 2).unwrap()).unwrap();
        let expected = 8.0 * PI * 3.0 / (4.0 + 13f64.sqrt());
        assert_relative_eq!(g2.lambda_max[0], expected, epsilon = 1e-12);
        assert_relative_eq!(g2.lambda_max[1], expected / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn box_contains_safe_bound() {
        for f in Family::ALL {
            for a in LieFamily::enumerate(f, 12) {
                let t = uniqueness_thresholds(a).unwrap();
                assert!(t.lambda_s_max >= SAFE_BOUND - 1e-12, "{a}");
            }
        }
    }
}
