use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Result, TodaError};
use crate::grid::{DomainGrid, WeightField};
use crate::linalg::{gmres, GmresOptions};
use crate::lie::{build_cartan, symmetric_decomposition, CartanMatrix, LieFamily, SymmetricDecomposition};

/// Grid, algebra and weights: everything except `λ`.
#[derive(Clone, Debug)]
pub struct TodaProblem {
    grid: DomainGrid,
    cartan: CartanMatrix,
    decomp: SymmetricDecomposition,
    weights: Arc<Vec<WeightField>>,
    a: DMatrix<f64>,
    a_s: DMatrix<f64>,
    a_s_inv: DMatrix<f64>,
    d: Vec<f64>,
}

impl TodaProblem {
    pub fn new(grid: DomainGrid, cartan: CartanMatrix, weights: Vec<WeightField>) -> Result<Self> {
        let n = cartan.rank();
        if weights.len() != n {
            return Err(TodaError::Dimension(format!(
                "{} weights for a rank-{n} system",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.h_values.len() != grid.len()) {
            return Err(TodaError::Dimension(format!(
                "weight has {} nodes, grid has {}",
                w.h_values.len(),
                grid.len()
            )));
        }
        let decomp = symmetric_decomposition(&cartan);
        Ok(TodaProblem {
            a: cartan.to_f64(),
            a_s: decomp.a_s_f64(),
            a_s_inv: decomp.a_s_inverse_f64(),
            d: decomp.d_f64(),
            grid,
            cartan,
            decomp,
            weights: Arc::new(weights),
        })
    }

    /// `hᵢ ≡ 1` for every component.
    pub fn uniform(grid: DomainGrid, algebra: LieFamily) -> Result<Self> {
        let cartan = build_cartan(algebra)?;
        let weights = vec![WeightField::uniform(&grid); algebra.rank()];
        TodaProblem::new(grid, cartan, weights)
    }

    pub fn grid(&self) -> &DomainGrid {
        &self.grid
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.cartan
    }

    pub fn decomposition(&self) -> &SymmetricDecomposition {
        &self.decomp
    }

    pub fn weights(&self) -> &Arc<Vec<WeightField>> {
        &self.weights
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn a_s(&self) -> &DMatrix<f64> {
        &self.a_s
    }

    pub fn a_s_inv(&self) -> &DMatrix<f64> {
        &self.a_s_inv
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Number of unknowns, `rank·N²`.
    pub fn dim(&self) -> usize {
        self.rank() * self.grid.len()
    }

    pub(crate) fn check_lambda(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.rank() {
            return Err(TodaError::Dimension(format!(
                "{} parameters for a rank-{} system",
                lambda.len(),
                self.rank()
            )));
        }
        if let Some(l) = lambda.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
            return Err(TodaError::Precondition(format!(
                "parameters must be finite and nonnegative, got {l}"
            )));
        }
        Ok(())
    }

    /// Normalised density `g = h eᵘ / ∫h eᵘ` and the mass `∫h eᵘ`.
    ///
    /// Exponentials are shifted by `max u` so large fields do not overflow.
    pub fn density(&self, component: usize, u: &[f64]) -> Result<(Vec<f64>, f64)> {
        let h = self.weights[component].values();
        let shift = u.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        let shift = if shift.is_finite() { shift } else { 0.0 };
        let e: Vec<f64> = h.iter().zip(u).map(|(hv, uv)| hv * (uv - shift).exp()).collect();
        let scaled_mass = self.grid.integrate(&e);
        let mass = scaled_mass * shift.exp();
        if !(scaled_mass > 0.0 && scaled_mass.is_finite()) {
            return Err(TodaError::NonPositiveMass {
                component,
                mass,
            });
        }
        let g = e.into_iter().map(|x| x / scaled_mass).collect();
        Ok((g, mass))
    }

    /// Converts block `v` (flat, component-major) to `u = d·v` fields.
    pub(crate) fn v_to_u(&self, v: &[f64]) -> Vec<Vec<f64>> {
        let m = self.grid.len();
        (0..self.rank())
            .map(|i| v[i * m..(i + 1) * m].iter().map(|x| x * self.d[i]).collect())
            .collect()
    }

    pub(crate) fn u_to_v(&self, u: &[Vec<f64>]) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        for (i, ui) in u.iter().enumerate() {
            v.extend(ui.iter().map(|x| x / self.d[i]));
        }
        v
    }

    /// Symmetrised residual `Fᵢ(v) = −Δₕvᵢ − Σⱼ aˢᵢⱼ λⱼ gⱼ(dⱼvⱼ)` and the
    /// linearisation at `v`.
    pub fn evaluate(&self, v: &[f64], lambda: &[f64]) -> Result<(Vec<f64>, Linearization)> {
        let m = self.grid.len();
        let n = self.rank();
        let u = self.v_to_u(v);
        let mut g = Vec::with_capacity(n);
        let mut masses = Vec::with_capacity(n);
        for (j, uj) in u.iter().enumerate() {
            let (gj, mj) = self.density(j, uj)?;
            g.push(gj);
            masses.push(mj);
        }
        let mut f = vec![0.0; n * m];
        for i in 0..n {
            let block = &mut f[i * m..(i + 1) * m];
            self.grid.laplacian_apply(&v[i * m..(i + 1) * m], block);
            for j in 0..n {
                let c = self.a_s[(i, j)] * lambda[j];
                if c != 0.0 {
                    for (fk, gk) in block.iter_mut().zip(&g[j]) {
                        *fk -= c * gk;
                    }
                }
            }
        }
        let lambda_s: Vec<f64> = lambda.iter().zip(&self.d).map(|(l, d)| l * d).collect();
        Ok((
            f,
            Linearization {
                grid: self.grid.clone(),
                a_s: self.a_s.clone(),
                lambda_s,
                g,
                masses,
            },
        ))
    }

    /// `max |Fᵢ|·dᵢ`, the sup norm of the residual in the original variables.
    pub(crate) fn u_residual_norm(&self, f: &[f64]) -> f64 {
        let m = self.grid.len();
        (0..self.rank())
            .map(|i| self.d[i] * crate::linalg::norm_inf(&f[i * m..(i + 1) * m]))
            .fold(0.0, f64::max)
    }
}

/// Linearisation of the symmetrised system at a point:
/// `J·δ = −Δₕδᵢ − Σⱼ aˢᵢⱼ Vˢⱼ (δⱼ − ∫gⱼδⱼ)`, `Vˢⱼ = λⱼˢgⱼ`.
#[derive(Clone, Debug)]
pub struct Linearization {
    grid: DomainGrid,
    a_s: DMatrix<f64>,
    lambda_s: Vec<f64>,
    g: Vec<Vec<f64>>,
    masses: Vec<f64>,
}

impl Linearization {
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn densities(&self) -> &[Vec<f64>] {
        &self.g
    }

    /// `Vˢⱼ = λⱼˢ gⱼ`.
    pub fn symmetric_potential(&self, j: usize) -> Vec<f64> {
        self.g[j].iter().map(|x| x * self.lambda_s[j]).collect()
    }

    pub fn apply(&self, delta: &[f64], out: &mut [f64]) {
        let m = self.grid.len();
        let n = self.g.len();
        let means: Vec<f64> = (0..n)
            .map(|j| self.grid.inner(&self.g[j], &delta[j * m..(j + 1) * m]))
            .collect();
        for i in 0..n {
            let block = &mut out[i * m..(i + 1) * m];
            self.grid.laplacian_apply(&delta[i * m..(i + 1) * m], block);
            for j in 0..n {
                let c = self.a_s[(i, j)] * self.lambda_s[j];
                if c == 0.0 {
                    continue;
                }
                let dj = &delta[j * m..(j + 1) * m];
                for k in 0..m {
                    block[k] -= c * self.g[j][k] * (dj[k] - means[j]);
                }
            }
        }
    }

    /// Blockwise `(−Δₕ)⁻¹`, the preconditioner.
    pub fn precondition(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        let m = self.grid.len();
        z.copy_from_slice(r);
        for block in z.chunks_mut(m) {
            self.grid.solve_in_place(block)?;
        }
        Ok(())
    }

    /// Solves `J·δ = rhs` by GMRES right-preconditioned with `(−Δₕ)⁻¹`.
    pub fn solve(&self, rhs: &[f64], opts: GmresOptions) -> Result<Vec<f64>> {
        // Factor once up front so the preconditioner below cannot fail.
        let mut probe = vec![0.0; self.grid.len()];
        self.grid.solve_in_place(&mut probe)?;
        let mut delta = vec![0.0; rhs.len()];
        let stats = gmres(
            |x, y| self.apply(x, y),
            |r, z| {
                if self.precondition(r, z).is_err() {
                    z.iter_mut().for_each(|v| *v = f64::NAN);
                }
            },
            rhs,
            &mut delta,
            opts,
        )?;
        if !(stats.rel_residual <= opts.rel_tol.max(1e-8)) {
            return Err(TodaError::LinearSolver(format!(
                "GMRES stalled at relative residual {:e} after {} iterations",
                stats.rel_residual, stats.iterations
            )));
        }
        Ok(delta)
    }
}
