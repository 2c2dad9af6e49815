use std::f64::consts::PI;

use serde::Serialize;

use super::density::DensityField;
use super::ops::EigenMethod;
use super::scalar::scalar_dirichlet_pairs;
use super::{Verdict, MARGIN_TOL};
use crate::error::{Result, TodaError};
use crate::grid::{DomainGrid, GridField};
use crate::linalg::norm_inf;
use crate::solver::{TodaProblem, TodaState};

/// The two smallest Dirichlet eigenvalues of `−Δφ − Keᵛφ = νKeᵛφ`.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub nu1: f64,
    pub nu2: f64,
    /// `∫Keᵛ`.
    pub mass: f64,
    /// `max(−Δₕv − Keᵛ)`.
    pub max_margin: f64,
    /// Positivity of `ν₁`, required when `∫Keᵛ ≤ 4π`.
    pub nu1_verdict: Verdict,
    /// Positivity of `ν₂`, required when `∫Keᵛ ≤ 8π`.
    pub nu2_verdict: Verdict,
}

/// Checks that `v` is a discrete subsolution and computes `ν₁ ≤ ν₂`.
pub fn lemma_certificate(
    grid: &DomainGrid,
    k: &[f64],
    v: &GridField,
    method: EigenMethod,
) -> Result<LemmaReport> {
    if k.len() != grid.len() || v.len() != grid.len() {
        return Err(TodaError::Dimension("coefficient does not match the grid".into()));
    }
    if v.boundary_constant != 0.0 {
        return Err(TodaError::Precondition("v must vanish on the boundary".into()));
    }
    let w: Vec<f64> = k.iter().zip(&v.values).map(|(k, v)| k * v.exp()).collect();
    let lap = grid.laplacian(v);
    let max_margin = lap
        .values
        .iter()
        .zip(&w)
        .map(|(l, w)| l - w)
        .fold(f64::NEG_INFINITY, f64::max);
    if max_margin > MARGIN_TOL * norm_inf(&w).max(1.0) {
        return Err(TodaError::NotSubsolution(max_margin));
    }
    let mass = grid.integrate(&w);
    let pairs = scalar_dirichlet_pairs(grid, &w, 1.0, 2, method)?;
    let (nu1, nu2) = (pairs[0].mu, pairs[1].mu);
    let verdict = |nu: f64, bound: f64| {
        if mass <= bound {
            Verdict::positivity(nu)
        } else {
            Verdict::NotRequired
        }
    };
    Ok(LemmaReport {
        nu1,
        nu2,
        mass,
        max_margin,
        nu1_verdict: verdict(nu1, 4.0 * PI),
        nu2_verdict: verdict(nu2, 8.0 * PI),
    })
}

/// Nodewise margins of `−Δuᵢ − ρ·dᵢVᵢ ≤ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct SubsolutionCheck {
    pub rho: f64,
    #[serde(skip)]
    pub margins: Vec<GridField>,
    pub max_margin: f64,
    /// `max(−Δuᵢ − 2Vᵢ)`, the row check using only `aᵢᵢ = 2`.
    pub row_max_margin: f64,
    /// `ρ∫dᵢVᵢ`, to be compared with `ρλᵢˢ`.
    pub masses: Vec<f64>,
    pub mass_identity_error: f64,
    pub verdict: Verdict,
}

pub fn subsolution_check(
    problem: &TodaProblem,
    state: &TodaState,
    densities: &[DensityField],
    rho: f64,
) -> Result<SubsolutionCheck> {
    if !(rho >= 2.0 - 1e-12) {
        return Err(TodaError::Precondition(format!("rho must be at least 2, got {rho}")));
    }
    let grid = problem.grid();
    let d = problem.d();
    let mut margins = Vec::with_capacity(densities.len());
    let mut max_margin = f64::NEG_INFINITY;
    let mut row_max_margin = f64::NEG_INFINITY;
    let mut masses = Vec::with_capacity(densities.len());
    let mut mass_identity_error: f64 = 0.0;
    for (i, dens) in densities.iter().enumerate() {
        let lap = grid.laplacian(&state.u[i]);
        let vi = &dens.v.values;
        let m: Vec<f64> = lap
            .values
            .iter()
            .zip(vi)
            .map(|(l, v)| l - rho * d[i] * v)
            .collect();
        max_margin = m.iter().copied().fold(max_margin, f64::max);
        row_max_margin = lap
            .values
            .iter()
            .zip(vi)
            .map(|(l, v)| l - 2.0 * v)
            .fold(row_max_margin, f64::max);
        margins.push(GridField::dirichlet(m));
        let mass = rho * d[i] * grid.integrate(vi);
        let target = rho * d[i] * dens.lambda;
        mass_identity_error = mass_identity_error.max((mass - target).abs() / target.max(1.0));
        masses.push(mass);
    }
    let verdict = if max_margin <= MARGIN_TOL && row_max_margin <= MARGIN_TOL {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(SubsolutionCheck {
        rho,
        margins,
        max_margin,
        row_max_margin,
        masses,
        mass_identity_error,
        verdict,
    })
}
