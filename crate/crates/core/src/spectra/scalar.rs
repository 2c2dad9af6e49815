use serde::Serialize;

use super::ops::{ensure_factor, top_pairs, EigenMethod, ScalarOp};
use crate::error::{Result, TodaError};
use crate::grid::{DomainGrid, GridField};
use crate::linalg::norm_inf;

/// One eigenpair of `−ΔₕΦ − ρVΦ = μVΦ`.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarEigen {
    pub mu: f64,
    /// `θ = μ + ρ`, the eigenvalue of `−ΔₕΦ = θVΦ`.
    pub theta: f64,
    pub rho: f64,
    /// Normalised by `∫VΦ² = 1`; carries the boundary constant `c`.
    #[serde(skip)]
    pub eigenfunction: GridField,
    pub boundary_constant: f64,
    /// `|∫VΦ| / (∫V·‖Φ‖∞)`; zero for Dirichlet problems, where it is not imposed.
    pub constraint_residual: f64,
    /// `‖−ΔₕΦ − θVΦ‖∞ / (θ‖VΦ‖∞)`.
    pub equation_residual: f64,
    pub method: EigenMethod,
}

fn check_inputs(grid: &DomainGrid, v: &[f64], rho: f64) -> Result<f64> {
    if v.len() != grid.len() {
        return Err(TodaError::Dimension(format!(
            "potential has {} values, grid has {}",
            v.len(),
            grid.len()
        )));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(TodaError::Precondition(format!("rho must be positive, got {rho}")));
    }
    if v.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        return Err(TodaError::Precondition("potential must be finite and nonnegative".into()));
    }
    let mass = grid.integrate(v);
    if !(mass > 0.0) {
        return Err(TodaError::Precondition(
            "potential vanishes identically; the eigenvalue is undefined".into(),
        ));
    }
    ensure_factor(grid)?;
    Ok(mass)
}

fn finish(
    grid: &DomainGrid,
    v: &[f64],
    rho: f64,
    beta: f64,
    mut phi: GridField,
    method: EigenMethod,
) -> Result<ScalarEigen> {
    if !(beta > 0.0) {
        return Err(TodaError::Eigen(format!("non-positive top eigenvalue {beta:e}")));
    }
    let theta = 1.0 / beta;
    let c = phi.boundary_constant;
    let norm = grid
        .inner(v, &phi.values.iter().map(|x| x * x).collect::<Vec<_>>())
        .sqrt();
    if !(norm > 0.0) {
        return Err(TodaError::Eigen("eigenfunction has zero weighted norm".into()));
    }
    phi.values.iter_mut().for_each(|x| *x /= norm);
    phi.boundary_constant = c / norm;
    let lap = grid.laplacian(&phi);
    let vphi: Vec<f64> = v.iter().zip(&phi.values).map(|(a, b)| a * b).collect();
    let eq = lap
        .values
        .iter()
        .zip(&vphi)
        .fold(0.0f64, |m, (l, w)| m.max((l - theta * w).abs()));
    Ok(ScalarEigen {
        mu: theta - rho,
        theta,
        rho,
        boundary_constant: phi.boundary_constant,
        constraint_residual: 0.0,
        equation_residual: eq / (theta * norm_inf(&vphi)).max(f64::MIN_POSITIVE),
        eigenfunction: phi,
        method,
    })
}

/// The `k` smallest Dirichlet eigenpairs of `−ΔₕΦ − ρVΦ = μVΦ`, ascending.
pub fn scalar_dirichlet_pairs(
    grid: &DomainGrid,
    v: &[f64],
    rho: f64,
    k: usize,
    method: EigenMethod,
) -> Result<Vec<ScalarEigen>> {
    check_inputs(grid, v, rho)?;
    let method = method.resolve(grid);
    let op = ScalarOp {
        grid,
        sqrt_v: v.iter().map(|x| x.sqrt()).collect(),
        project: None,
    };
    let pairs = top_pairs(&op, k, method)?;
    pairs
        .into_iter()
        .map(|p| {
            let mut w: Vec<f64> = p.vector.iter().zip(&op.sqrt_v).map(|(y, s)| y * s).collect();
            grid.solve_in_place(&mut w)?;
            finish(grid, v, rho, p.value, GridField::dirichlet(w), method)
        })
        .collect()
}

/// `μ̂₁ = min (∫|∇φ|² − ρ∫Vφ²)/∫Vφ²` over `φ = 0` on the boundary.
pub fn scalar_eigen_dirichlet(
    grid: &DomainGrid,
    v: &[f64],
    rho: f64,
    method: EigenMethod,
) -> Result<ScalarEigen> {
    Ok(scalar_dirichlet_pairs(grid, v, rho, 1, method)?.remove(0))
}

/// `μ̂₂`: the same quotient over `Φ` with a free constant boundary value `c`
/// and `∫VΦ = 0`.
///
/// With `q ∝ V^{1/2}1`, the top eigenvector `y` of `(I−qqᵀ)V^{1/2}L⁻¹V^{1/2}(I−qqᵀ)`
/// gives `w = L⁻¹V^{1/2}y + t·1` with `t` fixing `∫Vw = 0`, and then
/// `c = 1ᵀLw / 1ᵀL1`, where `L1` is the boundary-adjacent stencil sum.
pub fn scalar_eigen_constrained(
    grid: &DomainGrid,
    v: &[f64],
    rho: f64,
    method: EigenMethod,
) -> Result<ScalarEigen> {
    let mass = check_inputs(grid, v, rho)?;
    let method = method.resolve(grid);
    let sqrt_v: Vec<f64> = v.iter().map(|x| x.sqrt()).collect();
    let q_norm = sqrt_v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let q: Vec<f64> = sqrt_v.iter().map(|x| x / q_norm).collect();
    let op = ScalarOp {
        grid,
        sqrt_v,
        project: Some(q),
    };
    let pair = top_pairs(&op, 1, method)?.remove(0);
    let mut w: Vec<f64> = pair.vector.iter().zip(&op.sqrt_v).map(|(y, s)| y * s).collect();
    grid.solve_in_place(&mut w)?;
    let t = -grid.inner(v, &w) / mass;
    w.iter_mut().for_each(|x| *x += t);
    let ones = vec![1.0; grid.len()];
    let mut l1 = vec![0.0; grid.len()];
    grid.laplacian_apply(&ones, &mut l1);
    let mut lw = vec![0.0; grid.len()];
    grid.laplacian_apply(&w, &mut lw);
    let c = lw.iter().sum::<f64>() / l1.iter().sum::<f64>();
    let phi = GridField {
        values: w,
        boundary_constant: c,
    };
    let mut out = finish(grid, v, rho, pair.value, phi, method)?;
    let phi = &out.eigenfunction;
    let sup = norm_inf(&phi.values).max(phi.boundary_constant.abs());
    out.constraint_residual = grid.inner(v, &phi.values).abs() / (mass * sup);
    Ok(out)
}
