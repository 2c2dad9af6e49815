use serde::Serialize;

use crate::error::{Result, TodaError};
use crate::grid::GridField;
use crate::solver::{TodaProblem, TodaState};

/// `Vᵢ = λᵢhᵢe^{uᵢ}/∫hᵢe^{uᵢ}`, so that `∫Vᵢ = λᵢ`.
#[derive(Clone, Debug, Serialize)]
pub struct DensityField {
    #[serde(skip)]
    pub v: GridField,
    pub lambda: f64,
    /// `∫Vᵢ`, equal to `λᵢ` up to rounding.
    pub integral: f64,
}

impl DensityField {
    /// Scaled copy, `c·Vᵢ`.
    pub fn scaled(&self, c: f64) -> Vec<f64> {
        self.v.values.iter().map(|x| c * x).collect()
    }

    pub fn is_active(&self) -> bool {
        self.lambda > 0.0
    }
}

pub fn assemble_densities(problem: &TodaProblem, state: &TodaState) -> Result<Vec<DensityField>> {
    let n = problem.rank();
    if state.rank() != n || state.lambda.len() != n {
        return Err(TodaError::Dimension(format!(
            "state of rank {} for a rank-{n} problem",
            state.rank()
        )));
    }
    let grid = problem.grid();
    (0..n)
        .map(|i| {
            let lambda = state.lambda[i];
            let (g, _) = problem.density(i, &state.u[i].values)?;
            let v: Vec<f64> = g.into_iter().map(|x| lambda * x).collect();
            let integral = grid.integrate(&v);
            if (integral - lambda).abs() > 1e-10 * lambda.max(1.0) {
                return Err(TodaError::Precondition(format!(
                    "density {i} integrates to {integral}, expected {lambda}"
                )));
            }
            Ok(DensityField {
                v: GridField::dirichlet(v),
                lambda,
                integral,
            })
        })
        .collect()
}
