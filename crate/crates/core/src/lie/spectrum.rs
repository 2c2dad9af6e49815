use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cartan::{build_cartan, symmetric_decomposition, CartanMatrix, SymmetricDecomposition};
use super::family::{Family, LieFamily};
use crate::error::{Result, TodaError};

/// `ρ(G₂ˢ) = (4 + √13)/3`.
pub const RHO_G2_S: f64 = 2.535_183_758_487_996_4;
/// Largest eigenvalue of `F₄ˢ` (no closed form used).
pub const RHO_F4_S: f64 = 3.259_408_346_636_148_8;
/// `2 + 2cos(π/12)`.
pub const RHO_E6: f64 = 3.931_851_652_578_136_4;
/// `2 + 2cos(π/18)`.
pub const RHO_E7: f64 = 3.969_615_506_024_416_3;
/// `2 + 2cos(π/30)`.
pub const RHO_E8: f64 = 3.989_043_790_736_546_6;

/// Residual bound `‖Aˢv − ξv‖ ≤ tol·‖v‖` accepted from the dense solver.
const EIG_RESIDUAL_TOL: f64 = 1e-10;
const ENDPOINT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMethod {
    /// `ξᵢ = 4 sin²(iπ / 2(n+1))`, only for `Aₙ`.
    ClosedForm,
    /// Dense symmetric QR iteration.
    DenseEig,
    /// Sturm bisection on the characteristic-polynomial recursion,
    /// available for the tridiagonal families `A`, `B`, `C`.
    RecursionBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub algebra: LieFamily,
    pub rho: f64,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub method: SpectrumMethod,
}

/// Sorted eigenvalues of a symmetric matrix, with each pair residual-checked.
pub fn dense_symmetric_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| TodaError::Eigen("dense symmetric QR did not converge".into()))?;
    for (k, &xi) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let r = (m * v - v * xi).norm();
        if r > EIG_RESIDUAL_TOL * v.norm() {
            return Err(TodaError::Eigen(format!(
                "eigenpair {k} residual {r:e} exceeds tolerance"
            )));
        }
    }
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn closed_form_a(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| {
            let s = (i as f64 * PI / (2.0 * (n as f64 + 1.0))).sin();
            4.0 * s * s
        })
        .collect()
}

/// Spectrum of `Aˢ` by the requested method.
pub fn spectral_radius(
    decomp: &SymmetricDecomposition,
    method: SpectrumMethod,
) -> Result<SpectrumReport> {
    let algebra = decomp.algebra();
    let eigenvalues = match method {
        SpectrumMethod::ClosedForm => {
            if algebra.family() != Family::A {
                return Err(TodaError::Precondition(format!(
                    "closed-form spectrum is only available for A_n, not {algebra}"
                )));
            }
            closed_form_a(algebra.rank())
        }
        SpectrumMethod::DenseEig => dense_symmetric_spectrum(&decomp.a_s_f64())?,
        SpectrumMethod::RecursionBound => {
            let (diag, off) = tridiagonal_parts(decomp)?;
            sturm_spectrum(&diag, &off)
        }
    };
    if let Some(bad) = eigenvalues.iter().find(|&&x| x <= 0.0) {
        return Err(TodaError::Eigen(format!(
            "{algebra}: non-positive eigenvalue {bad} of a positive definite matrix"
        )));
    }
    let rho = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(SpectrumReport {
        algebra,
        rho,
        eigenvalues,
        method,
    })
}

/// `ρ(A)` of the (generally non-symmetric) Cartan matrix itself, from the
/// real Schur form.
pub fn nonsymmetric_spectral_radius(a: &CartanMatrix) -> f64 {
    a.to_f64()
        .complex_eigenvalues()
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()))
}

fn tridiagonal_parts(decomp: &SymmetricDecomposition) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = decomp.a_s_f64();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && m[(i, j)] != 0.0 {
                return Err(TodaError::Precondition(format!(
                    "{} is not tridiagonal; use dense_eig",
                    decomp.algebra()
                )));
            }
        }
    }
    let diag = (0..n).map(|i| m[(i, i)]).collect();
    let off = (0..n.saturating_sub(1)).map(|i| m[(i, i + 1)]).collect();
    Ok((diag, off))
}

/// Number of eigenvalues strictly greater than `x` (Sturm count via the
/// ratio form of the minor recursion).
fn count_above(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for k in 0..diag.len() {
        let coupling = if k == 0 { 0.0 } else { off[k - 1] * off[k - 1] / q };
        q = (x - diag[k]) - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn sturm_spectrum(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // Gershgorin interval.
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut values: Vec<f64> = (0..n)
        .map(|k| {
            // k-th eigenvalue from the top: the point where count_above drops to k.
            let (mut a, mut b) = (lo - 1.0, hi + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid == a || mid == b {
                    break;
                }
                if count_above(diag, off, mid) > k {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// The two symmetrised tridiagonal families with a printed recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecursionKind {
    Bs,
    Cs,
}

impl RecursionKind {
    /// `(c, w)` in `Xₙ = (λ − c)Xₙ₋₁ − w·Xₙ₋₂`.
    fn coefficients(self) -> (f64, f64) {
        match self {
            RecursionKind::Bs => (1.0, 0.25),
            RecursionKind::Cs => (2.0, 1.0),
        }
    }

    /// Trailing 1×1 and 2×2 determinants of `λE − Aˢ`.
    fn base(self, lambda: f64) -> (f64, f64) {
        match self {
            // trailing block of Bₙˢ is [[1, −1], [−1, 2]]
            RecursionKind::Bs => (lambda - 2.0, (lambda - 1.0) * (lambda - 2.0) - 1.0),
            // trailing block of Cₙˢ is [[2, −1], [−1, 1]]
            RecursionKind::Cs => (lambda - 1.0, (lambda - 2.0) * (lambda - 1.0) - 1.0),
        }
    }

    pub fn family(self) -> Family {
        match self {
            RecursionKind::Bs => Family::B,
            RecursionKind::Cs => Family::C,
        }
    }
}

/// `Xₙ = det(λEₙ − Aˢ)` by expansion along the first row.
///
/// `X₁`, `X₂` are the trailing 1×1 and 2×2 minors; `X₀ = 1` by convention.
pub fn char_recursion(kind: RecursionKind, n: usize, lambda: f64) -> f64 {
    let (x1, x2) = kind.base(lambda);
    match n {
        0 => 1.0,
        1 => x1,
        2 => x2,
        _ => {
            let (c, w) = kind.coefficients();
            let (mut prev, mut cur) = (x1, x2);
            for _ in 3..=n {
                let next = (lambda - c) * cur - w * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Root `a` of `a(λ − c − a) = w` used to telescope the recursion:
/// `Xₙ − aXₙ₋₁ = (λ − c − a)(Xₙ₋₁ − aXₙ₋₂)`.
///
/// Real for `λ ≥ 2` (`Bˢ`) and `λ ≥ 4` (`Cˢ`); `None` below.
pub fn recursion_root(kind: RecursionKind, lambda: f64) -> Option<f64> {
    let disc = match kind {
        RecursionKind::Bs => (lambda - 1.0).powi(2) - 1.0,
        RecursionKind::Cs => lambda * lambda - 4.0 * lambda,
    };
    if disc < 0.0 {
        return None;
    }
    let (c, _) = kind.coefficients();
    Some((lambda - c - disc.sqrt()) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusRow {
    pub algebra: LieFamily,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusBoundsReport {
    pub family: Family,
    pub max_rank: usize,
    pub rows: Vec<RadiusRow>,
}

/// Checks `2 ≤ ρ(Aˢ) ≤ 4` for every admissible rank up to `max_rank`, plus
/// the sharper family statements `2 < ρ(Bₙˢ) < 3`, `2 < ρ(Cₙˢ) ≤ 4` and
/// monotonicity of `ρ(Aₙ)` (cross-checked against the closed form).
pub fn verify_radius_bounds(family: Family, max_rank: usize) -> Result<RadiusBoundsReport> {
    if max_rank < 2 {
        return Err(TodaError::Precondition(format!(
            "max_rank must be at least 2, got {max_rank}"
        )));
    }
    let mut rows: Vec<RadiusRow> = Vec::new();
    for algebra in LieFamily::enumerate(family, max_rank) {
        let decomp = symmetric_decomposition(&build_cartan(algebra)?);
        let report = spectral_radius(&decomp, SpectrumMethod::DenseEig)?;
        let rho = report.rho;
        let violation = |bound: &str| TodaError::BoundViolation {
            algebra: algebra.to_string(),
            rho,
            bound: bound.to_string(),
        };
        if !(2.0 - ENDPOINT_TOL..=4.0 + ENDPOINT_TOL).contains(&rho) {
            return Err(violation("2 <= rho <= 4"));
        }
        match family {
            Family::B if !(rho > 2.0 && rho < 3.0) => return Err(violation("2 < rho < 3")),
            Family::C if !(rho > 2.0 && rho <= 4.0 + ENDPOINT_TOL) => {
                return Err(violation("2 < rho <= 4"))
            }
            Family::A => {
                let closed = closed_form_a(algebra.rank());
                let top = closed[closed.len() - 1];
                if (top - rho).abs() > 1e-10 {
                    return Err(violation("agreement with 4 sin^2(n pi / 2(n+1))"));
                }
                if rows.last().is_some_and(|prev| rho <= prev.rho) {
                    return Err(violation("strictly increasing in n"));
                }
            }
            _ => {}
        }
        rows.push(RadiusRow { algebra, rho });
    }
    Ok(RadiusBoundsReport {
        family,
        max_rank,
        rows,
    })
}
