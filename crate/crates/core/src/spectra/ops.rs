use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TodaError};
use crate::grid::DomainGrid;
use crate::linalg::{lanczos_top, LanczosOptions, RitzPair, SymOp};

/// Largest size at which `Auto` picks the dense solver.
pub const DENSE_MAX_NODES: usize = 15;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    /// Dense for `N ≤ 15`, Lanczos otherwise.
    #[default]
    Auto,
    Lanczos,
    Dense,
}

impl EigenMethod {
    pub(crate) fn resolve(self, grid: &DomainGrid) -> EigenMethod {
        match self {
            EigenMethod::Auto if grid.n() <= DENSE_MAX_NODES => EigenMethod::Dense,
            EigenMethod::Auto => EigenMethod::Lanczos,
            m => m,
        }
    }
}

/// The `k` largest eigenpairs of a symmetric operator, descending.
pub fn top_pairs(op: &dyn SymOp, k: usize, method: EigenMethod) -> Result<Vec<RitzPair>> {
    match method {
        EigenMethod::Dense => dense_top(op, k),
        _ => lanczos_top(op, k, LanczosOptions::default()),
    }
}

fn dense_top(op: &dyn SymOp, k: usize) -> Result<Vec<RitzPair>> {
    let m = op.dim();
    let mut mat = DMatrix::zeros(m, m);
    let mut e = vec![0.0; m];
    let mut col = vec![0.0; m];
    for j in 0..m {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..m {
            mat[(i, j)] = col[i];
        }
    }
    let sym = (&mat + mat.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 0)
        .ok_or_else(|| TodaError::Eigen("dense eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    Ok(order
        .into_iter()
        .take(k)
        .map(|i| {
            let vector: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let mut av = vec![0.0; m];
            op.apply(&vector, &mut av);
            let value = eig.eigenvalues[i];
            let residual = av
                .iter()
                .zip(&vector)
                .map(|(a, v)| (a - value * v).powi(2))
                .sum::<f64>()
                .sqrt();
            RitzPair {
                value,
                vector,
                residual,
            }
        })
        .collect())
}

/// `x ↦ V^{1/2} L⁻¹ V^{1/2} x`, optionally sandwiched by `I − qqᵀ`.
pub(crate) struct ScalarOp<'a> {
    pub grid: &'a DomainGrid,
    pub sqrt_v: Vec<f64>,
    pub project: Option<Vec<f64>>,
}

impl ScalarOp<'_> {
    fn project(&self, x: &mut [f64]) {
        if let Some(q) = &self.project {
            let c: f64 = q.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= c * qi;
            }
        }
    }
}

impl SymOp for ScalarOp<'_> {
    fn dim(&self) -> usize {
        self.sqrt_v.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut t = x.to_vec();
        self.project(&mut t);
        for (ti, s) in t.iter_mut().zip(&self.sqrt_v) {
            *ti *= s;
        }
        // The factor exists: callers solve once before building the operator.
        if self.grid.solve_in_place(&mut t).is_err() {
            t.iter_mut().for_each(|v| *v = f64::NAN);
        }
        for (ti, s) in t.iter_mut().zip(&self.sqrt_v) {
            *ti *= s;
        }
        self.project(&mut t);
        y.copy_from_slice(&t);
    }
}

pub(crate) fn ensure_factor(grid: &DomainGrid) -> Result<()> {
    let mut probe = vec![0.0; grid.len()];
    grid.solve_in_place(&mut probe)
}
