use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::ops::{ensure_factor, top_pairs, EigenMethod};
use crate::error::{Result, TodaError};
use crate::grid::{DomainGrid, GridField};
use crate::linalg::{norm_inf, SymOp};

/// Minimum of `Q(φ)/B(φ)` with
/// `Q = Σᵢⱼ aⁱʲ∫∇φᵢ·∇φⱼ − Σᵢ∫Vᵢφᵢ²`, `B = Σᵢ∫Vᵢφᵢ²`, `(aⁱʲ) = (Aˢ)⁻¹`.
#[derive(Clone, Debug, Serialize)]
pub struct CoupledEigen {
    /// `min Q/B = θ − 1`.
    pub min: f64,
    pub theta: f64,
    /// Whether `∫Vᵢφᵢ = 0` was imposed for every active component.
    pub constrained: bool,
    /// Whether each `φᵢ` carried a free constant boundary value.
    pub boundary_constants: bool,
    /// Components with `Vᵢ ≢ 0`; the others do not enter `B`.
    pub active: Vec<usize>,
    /// Normalised by `B(φ) = 1`.
    #[serde(skip)]
    pub eigenfunction: Vec<GridField>,
    /// `maxᵢ |∫Vᵢφᵢ| / (∫Vᵢ·‖φ‖∞)`.
    pub constraint_residual: f64,
    /// `|Q(φ)/B(φ) − min| / max(1, |min|)` at the returned eigenfunction.
    pub rayleigh_residual: f64,
    /// `(Σ aⁱʲ∫∇φᵢ∇φⱼ − ρ⁻¹Σ∫|∇φᵢ|²) / Σ aⁱʲ∫∇φᵢ∇φⱼ`, nonnegative since
    /// the smallest eigenvalue of `(Aˢ)⁻¹` is `1/ρ(Aˢ)`.
    pub chain_gap: f64,
    pub method: EigenMethod,
}

struct CoupledOp<'a> {
    grid: &'a DomainGrid,
    a: &'a DMatrix<f64>,
    sqrt_v: Vec<Vec<f64>>,
    /// `(Vₖ, Zₖ = (Aˢ⊗L⁻¹)(eₖ⊗Vₖ))` for active `k`, and `G⁻¹`.
    constraint: Option<(Vec<usize>, Vec<Vec<f64>>, DMatrix<f64>)>,
    /// Per-component `q ∝ Vᵢ^{1/2}1`, projected out on both sides.
    project: Option<Vec<Option<Vec<f64>>>>,
}

impl CoupledOp<'_> {
    fn m(&self) -> usize {
        self.grid.len()
    }

    fn project(&self, x: &mut [f64]) {
        let Some(qs) = &self.project else { return };
        let m = self.m();
        for (i, q) in qs.iter().enumerate() {
            if let Some(q) = q {
                let xi = &mut x[i * m..(i + 1) * m];
                let c: f64 = q.iter().zip(xi.iter()).map(|(a, b)| a * b).sum();
                xi.iter_mut().zip(q).for_each(|(x, q)| *x -= c * q);
            }
        }
    }

    /// `(Aˢ⊗L⁻¹) r`, blockwise.
    fn k_inv(&self, r: &[f64]) -> Vec<f64> {
        let m = self.m();
        let n = self.sqrt_v.len();
        let mut s = r.to_vec();
        for block in s.chunks_mut(m) {
            if self.grid.solve_in_place(block).is_err() {
                block.iter_mut().for_each(|v| *v = f64::NAN);
            }
        }
        let mut x = vec![0.0; n * m];
        for i in 0..n {
            for j in 0..n {
                let c = self.a[(i, j)];
                if c != 0.0 {
                    for k in 0..m {
                        x[i * m + k] += c * s[j * m + k];
                    }
                }
            }
        }
        x
    }

    /// `φ = T M^{1/2} y` before the final `M^{1/2}`.
    fn solve_part(&self, y: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut t = y.to_vec();
        self.project(&mut t);
        for (i, s) in self.sqrt_v.iter().enumerate() {
            for k in 0..m {
                t[i * m + k] *= s[k];
            }
        }
        let mut x = self.k_inv(&t);
        if let Some((active, z, g_inv)) = &self.constraint {
            let b: Vec<f64> = active
                .iter()
                .map(|&k| {
                    let vk = &self.sqrt_v[k];
                    (0..m).map(|p| vk[p] * vk[p] * x[k * m + p]).sum()
                })
                .collect();
            for (l, zl) in z.iter().enumerate() {
                let coef: f64 = (0..active.len()).map(|r| g_inv[(l, r)] * b[r]).sum();
                for (xv, zv) in x.iter_mut().zip(zl) {
                    *xv -= coef * zv;
                }
            }
        }
        x
    }
}

impl SymOp for CoupledOp<'_> {
    fn dim(&self) -> usize {
        self.sqrt_v.len() * self.m()
    }

    fn apply(&self, y: &[f64], out: &mut [f64]) {
        let m = self.m();
        let mut x = self.solve_part(y);
        for (i, s) in self.sqrt_v.iter().enumerate() {
            for k in 0..m {
                x[i * m + k] *= s[k];
            }
        }
        self.project(&mut x);
        out.copy_from_slice(&x);
    }
}

fn check(grid: &DomainGrid, v: &[Vec<f64>], a_s: &DMatrix<f64>) -> Result<(Vec<usize>, f64)> {
    let n = v.len();
    if a_s.nrows() != n || a_s.ncols() != n {
        return Err(TodaError::Dimension(format!(
            "{n} potentials for a {}x{} matrix",
            a_s.nrows(),
            a_s.ncols()
        )));
    }
    if (a_s - a_s.transpose()).amax() > 1e-12 * a_s.amax() {
        return Err(TodaError::Precondition("the coupling matrix must be symmetric".into()));
    }
    let eig = SymmetricEigen::new(a_s.clone());
    if eig.eigenvalues.min() <= 0.0 {
        return Err(TodaError::Precondition("the coupling matrix must be positive definite".into()));
    }
    let rho = eig.eigenvalues.max();
    let mut active = Vec::new();
    for (i, vi) in v.iter().enumerate() {
        if vi.len() != grid.len() {
            return Err(TodaError::Dimension("potential does not match the grid".into()));
        }
        if vi.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(TodaError::Precondition("potentials must be finite and nonnegative".into()));
        }
        if grid.integrate(vi) > 0.0 {
            active.push(i);
        }
    }
    ensure_factor(grid)?;
    Ok((active, rho))
}

/// Minimum of the coupled quotient over zero-boundary blocks.
///
/// `v` are the symmetrised potentials `Vᵢˢ` and `a_s` the symmetric factor
/// of the Cartan matrix. With `constrained`, every active block is also
/// required to satisfy `∫Vᵢφᵢ = 0`. Returns `None` when every `Vᵢ ≡ 0`, in
/// which case the form is coercive and the minimum is `+∞`.
pub fn coupled_form_min(
    grid: &DomainGrid,
    v: &[Vec<f64>],
    a_s: &DMatrix<f64>,
    constrained: bool,
    method: EigenMethod,
) -> Result<Option<CoupledEigen>> {
    let (active, rho) = check(grid, v, a_s)?;
    if active.is_empty() {
        return Ok(None);
    }
    let mut op = CoupledOp {
        grid,
        a: a_s,
        sqrt_v: v.iter().map(|vi| vi.iter().map(|x| x.sqrt()).collect()).collect(),
        constraint: None,
        project: None,
    };
    if constrained {
        let m = grid.len();
        let n = v.len();
        let z: Vec<Vec<f64>> = active
            .iter()
            .map(|&l| {
                let mut e = vec![0.0; n * m];
                e[l * m..(l + 1) * m].copy_from_slice(&v[l]);
                op.k_inv(&e)
            })
            .collect();
        let g = DMatrix::from_fn(active.len(), active.len(), |r, c| {
            let k = active[r];
            (0..m).map(|p| v[k][p] * z[c][k * m + p]).sum()
        });
        let g_inv = g
            .cholesky()
            .ok_or_else(|| TodaError::Eigen("constraint Gram matrix is singular".into()))?
            .inverse();
        op.constraint = Some((active.clone(), z, g_inv));
    }
    solve(grid, v, a_s, rho, op, active, constrained, false, method).map(Some)
}

/// Diagnostic variant: each block has a free constant boundary value and
/// satisfies `∫Vᵢφᵢ = 0`. Reported only.
pub fn coupled_form_min_boundary(
    grid: &DomainGrid,
    v: &[Vec<f64>],
    a_s: &DMatrix<f64>,
    method: EigenMethod,
) -> Result<Option<CoupledEigen>> {
    let (active, rho) = check(grid, v, a_s)?;
    if active.is_empty() {
        return Ok(None);
    }
    let sqrt_v: Vec<Vec<f64>> = v.iter().map(|vi| vi.iter().map(|x| x.sqrt()).collect()).collect();
    let project = sqrt_v
        .iter()
        .map(|s| {
            let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
            (norm > 0.0).then(|| s.iter().map(|x| x / norm).collect())
        })
        .collect();
    let op = CoupledOp {
        grid,
        a: a_s,
        sqrt_v,
        constraint: None,
        project: Some(project),
    };
    solve(grid, v, a_s, rho, op, active, true, true, method).map(Some)
}

#[allow(clippy::too_many_arguments)]
fn solve(
    grid: &DomainGrid,
    v: &[Vec<f64>],
    a_s: &DMatrix<f64>,
    rho: f64,
    op: CoupledOp<'_>,
    active: Vec<usize>,
    constrained: bool,
    boundary: bool,
    method: EigenMethod,
) -> Result<CoupledEigen> {
    let method = method.resolve(grid);
    let pair = top_pairs(&op, 1, method)?.remove(0);
    if !(pair.value > 0.0) {
        return Err(TodaError::Eigen(format!("non-positive top eigenvalue {:e}", pair.value)));
    }
    let theta = 1.0 / pair.value;
    let m = grid.len();
    let n = v.len();
    let x = op.solve_part(&pair.vector);
    let mut phi: Vec<GridField> = (0..n)
        .map(|i| GridField::dirichlet(x[i * m..(i + 1) * m].to_vec()))
        .collect();
    if boundary {
        let ones = vec![1.0; m];
        let mut l1 = vec![0.0; m];
        grid.laplacian_apply(&ones, &mut l1);
        let l1_sum: f64 = l1.iter().sum();
        for (i, f) in phi.iter_mut().enumerate() {
            let mass = grid.integrate(&v[i]);
            if mass > 0.0 {
                let t = -grid.inner(&v[i], &f.values) / mass;
                f.values.iter_mut().for_each(|x| *x += t);
            }
            let mut lw = vec![0.0; m];
            grid.laplacian_apply(&f.values, &mut lw);
            f.boundary_constant = lw.iter().sum::<f64>() / l1_sum;
        }
    }
    let b: f64 = (0..n)
        .map(|i| grid.inner(&v[i], &phi[i].values.iter().map(|x| x * x).collect::<Vec<_>>()))
        .sum();
    if !(b > 0.0) {
        return Err(TodaError::Eigen("coupled eigenfunction has zero weighted norm".into()));
    }
    let scale = b.sqrt();
    for f in &mut phi {
        f.values.iter_mut().for_each(|x| *x /= scale);
        f.boundary_constant /= scale;
    }
    // Stiffness in the original variables: ∫∇φᵢ·∇φⱼ with boundary constants.
    let lap: Vec<GridField> = phi.iter().map(|f| grid.laplacian(f)).collect();
    let shifted: Vec<Vec<f64>> = phi
        .iter()
        .map(|f| f.values.iter().map(|x| x - f.boundary_constant).collect())
        .collect();
    let a_inv = a_s
        .clone()
        .try_inverse()
        .ok_or_else(|| TodaError::Precondition("coupling matrix is singular".into()))?;
    let mut stiffness = 0.0;
    let mut diag = 0.0;
    for i in 0..n {
        diag += grid.inner(&shifted[i], &lap[i].values);
        for j in 0..n {
            stiffness += a_inv[(i, j)] * grid.inner(&shifted[i], &lap[j].values);
        }
    }
    let min = theta - 1.0;
    let quotient = stiffness - 1.0;
    let sup = phi
        .iter()
        .map(|f| norm_inf(&f.values).max(f.boundary_constant.abs()))
        .fold(0.0, f64::max);
    let constraint_residual = if constrained {
        active
            .iter()
            .map(|&i| grid.inner(&v[i], &phi[i].values).abs() / (grid.integrate(&v[i]) * sup))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(CoupledEigen {
        min,
        theta,
        constrained,
        boundary_constants: boundary,
        active,
        eigenfunction: phi,
        constraint_residual,
        rayleigh_residual: (quotient - min).abs() / min.abs().max(1.0),
        chain_gap: (stiffness - diag / rho) / stiffness,
        method,
    })
}
