use std::sync::Arc;

use serde::Serialize;

use super::problem::TodaProblem;
use crate::error::{Result, TodaError};
use crate::grid::{GridField, WeightField};

/// A (converged) solution of the mean-field Toda system.
#[derive(Clone, Debug, Serialize)]
pub struct TodaState {
    pub u: Vec<GridField>,
    pub lambda: Vec<f64>,
    #[serde(skip)]
    pub weights: Arc<Vec<WeightField>>,
    /// `mᵢ = ∫hᵢe^{uᵢ}`.
    pub masses: Vec<f64>,
    /// Sup norm of the discrete residual in the original variables.
    pub residual_norm: f64,
    pub iterations: usize,
}

impl TodaState {
    /// The trivial solution `u = 0` at `λ = 0`.
    pub fn trivial(problem: &TodaProblem) -> Result<Self> {
        let n = problem.rank();
        let grid = problem.grid();
        let masses = (0..n)
            .map(|i| Ok(grid.integrate(problem.weights()[i].values())))
            .collect::<Result<Vec<f64>>>()?;
        Ok(TodaState {
            u: vec![GridField::zeros(grid); n],
            lambda: vec![0.0; n],
            weights: problem.weights().clone(),
            masses,
            residual_norm: 0.0,
            iterations: 0,
        })
    }

    pub fn rank(&self) -> usize {
        self.u.len()
    }

    /// `max_i ‖uᵢ − wᵢ‖∞`.
    pub fn sup_distance(&self, other: &TodaState) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .map(|(a, b)| {
                a.values
                    .iter()
                    .zip(&b.values)
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            })
            .fold(0.0, f64::max)
    }
}

/// `Rᵢ = −Δₕuᵢ − Σⱼ aᵢⱼ λⱼ hⱼe^{uⱼ}/∫hⱼe^{uⱼ}`, evaluated directly from the
/// state in the original variables.
pub fn residual(problem: &TodaProblem, state: &TodaState) -> Result<Vec<GridField>> {
    let n = problem.rank();
    if state.rank() != n || state.lambda.len() != n {
        return Err(TodaError::Dimension(format!(
            "state of rank {} for a rank-{n} problem",
            state.rank()
        )));
    }
    let grid = problem.grid();
    let mut g = Vec::with_capacity(n);
    for (j, uj) in state.u.iter().enumerate() {
        g.push(problem.density(j, &uj.values)?.0);
    }
    let a = problem.a();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = vec![0.0; grid.len()];
        grid.laplacian_apply(&state.u[i].values, &mut r);
        for j in 0..n {
            let c = a[(i, j)] * state.lambda[j];
            if c != 0.0 {
                for (rk, gk) in r.iter_mut().zip(&g[j]) {
                    *rk -= c * gk;
                }
            }
        }
        out.push(GridField::dirichlet(r));
    }
    Ok(out)
}

#[cfg(test)]
pub(crate) fn residual_sup(fields: &[GridField]) -> f64 {
    fields.iter().map(|f| crate::linalg::norm_inf(&f.values)).fold(0.0, f64::max)
}
