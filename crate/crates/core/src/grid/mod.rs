//! Uniform five-point discretisation of the unit square with Dirichlet data.
//!
//! Interior node `(i, j)`, `0 ≤ i, j < N`, sits at `((i+1)h, (j+1)h)` with
//! `h = 1/(N+1)` and has flat index `j·N + i`. Boundary nodes are not stored:
//! a field carries a single `boundary_constant` (zero for Dirichlet fields).

mod cache;
mod green;
mod weight;

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

pub use cache::{read_field, write_field, CacheHeader};
pub use green::greens_function;
pub use weight::{assemble_weight, FPreset, SingularSource, WeightField};

use crate::error::{Result, TodaError};
use crate::linalg::{norm_inf, BandCholesky};

pub const MIN_NODES: usize = 7;
/// Beyond this the banded factor (N³ doubles) stops being desk-sized.
pub const MAX_NODES: usize = 511;

#[derive(Debug)]
struct GridInner {
    n: usize,
    h: f64,
    factor: OnceLock<std::result::Result<BandCholesky, String>>,
}

/// Interior grid of `(0,1)²`; cheap to clone, the Laplacian factor is shared.
#[derive(Clone, Debug)]
pub struct DomainGrid {
    inner: Arc<GridInner>,
}

impl PartialEq for DomainGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n
    }
}

impl DomainGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(TodaError::GridTooSmall(n));
        }
        if n > MAX_NODES {
            return Err(TodaError::Precondition(format!(
                "N = {n} exceeds the supported maximum {MAX_NODES}"
            )));
        }
        Ok(DomainGrid {
            inner: Arc::new(GridInner {
                n,
                h: 1.0 / (n as f64 + 1.0),
                factor: OnceLock::new(),
            }),
        })
    }

    /// Interior nodes per axis.
    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn h(&self) -> f64 {
        self.inner.h
    }

    /// Total number of interior nodes, `N²`.
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.inner.n + i
    }

    pub fn coords(&self, k: usize) -> (f64, f64) {
        let n = self.inner.n;
        let h = self.inner.h;
        ((k % n + 1) as f64 * h, (k / n + 1) as f64 * h)
    }

    /// True when the node has at least one boundary neighbour.
    pub fn touches_boundary(&self, k: usize) -> bool {
        let n = self.inner.n;
        let (i, j) = (k % n, k / n);
        i == 0 || j == 0 || i == n - 1 || j == n - 1
    }

    /// Index of the interior node nearest to `(x, y)`.
    pub fn nearest_node(&self, x: f64, y: f64) -> Result<usize> {
        if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
            return Err(TodaError::PointOutside(x, y));
        }
        let n = self.inner.n as f64;
        let snap = |t: f64| ((t / self.inner.h).round().clamp(1.0, n) as usize) - 1;
        Ok(self.index(snap(x), snap(y)))
    }

    /// `out = −Δₕu` for `u` vanishing on the boundary.
    pub fn laplacian_apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.inner.n;
        let inv_h2 = 1.0 / (self.inner.h * self.inner.h);
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                let mut s = 4.0 * u[k];
                if i > 0 {
                    s -= u[k - 1];
                }
                if i + 1 < n {
                    s -= u[k + 1];
                }
                if j > 0 {
                    s -= u[k - n];
                }
                if j + 1 < n {
                    s -= u[k + n];
                }
                out[k] = s * inv_h2;
            }
        }
    }

    /// `−Δₕ` of a field, honouring its boundary constant.
    pub fn laplacian(&self, field: &GridField) -> GridField {
        let mut shifted = field.values.clone();
        if field.boundary_constant != 0.0 {
            shifted.iter_mut().for_each(|v| *v -= field.boundary_constant);
        }
        let mut out = vec![0.0; self.len()];
        self.laplacian_apply(&shifted, &mut out);
        GridField::dirichlet(out)
    }

    fn factor(&self) -> Result<&BandCholesky> {
        let n = self.inner.n;
        let inv_h2 = 1.0 / (self.inner.h * self.inner.h);
        self.inner
            .factor
            .get_or_init(|| {
                BandCholesky::factor(n * n, n, |r, c| {
                    if r == c {
                        4.0 * inv_h2
                    } else if r - c == n || (r - c == 1 && r % n != 0) {
                        -inv_h2
                    } else {
                        0.0
                    }
                })
                .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| TodaError::LinearSolver(e.clone()))
    }

    /// Overwrites `x` with `(−Δₕ)⁻¹x`, no residual check.
    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        self.factor()?.solve_in_place(x);
        Ok(())
    }

    /// Solves `−Δₕu = rhs`, `u = 0` on the boundary, and verifies
    /// `‖−Δₕu − rhs‖∞ ≤ 1e−10 ‖rhs‖∞`.
    pub fn poisson_solve(&self, rhs: &[f64]) -> Result<GridField> {
        if rhs.len() != self.len() {
            return Err(TodaError::Dimension(format!(
                "rhs has {} values, grid has {}",
                rhs.len(),
                self.len()
            )));
        }
        let mut u = rhs.to_vec();
        self.solve_in_place(&mut u)?;
        let mut check = vec![0.0; self.len()];
        self.laplacian_apply(&u, &mut check);
        let err = check
            .iter()
            .zip(rhs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = norm_inf(rhs);
        if err > 1e-10 * scale {
            return Err(TodaError::LinearSolver(format!(
                "Poisson residual {err:e} exceeds 1e-10 x {scale:e}"
            )));
        }
        Ok(GridField::dirichlet(u))
    }

    /// `Σ h²·value` over interior nodes.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let h2 = self.inner.h * self.inner.h;
        values.iter().sum::<f64>() * h2
    }

    /// `∫φψ` in the same quadrature.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let h2 = self.inner.h * self.inner.h;
        a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h2
    }

    /// Discrete Dirichlet energy `∫∇φ·∇ψ = h²·φᵀ(−Δₕ)ψ`.
    pub fn dirichlet_form(&self, phi: &[f64], psi: &[f64]) -> f64 {
        let mut lp = vec![0.0; self.len()];
        self.laplacian_apply(psi, &mut lp);
        self.inner(phi, &lp)
    }

    /// Analytic first eigenvalue of `−Δₕ`: `8 sin²(πh/2)/h²`.
    pub fn first_dirichlet_eigenvalue(&self) -> f64 {
        let h = self.inner.h;
        let s = (std::f64::consts::PI * h / 2.0).sin();
        8.0 * s * s / (h * h)
    }
}

/// Values at interior nodes plus the (constant) boundary trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub values: Vec<f64>,
    pub boundary_constant: f64,
}

impl GridField {
    pub fn dirichlet(values: Vec<f64>) -> Self {
        GridField {
            values,
            boundary_constant: 0.0,
        }
    }

    pub fn zeros(grid: &DomainGrid) -> Self {
        GridField::dirichlet(vec![0.0; grid.len()])
    }

    pub fn constant(grid: &DomainGrid, c: f64) -> Self {
        GridField::dirichlet(vec![c; grid.len()])
    }

    pub fn from_fn(grid: &DomainGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        GridField::dirichlet(
            (0..grid.len())
                .map(|k| {
                    let (x, y) = grid.coords(k);
                    f(x, y)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.boundary_constant.is_finite() && self.values.iter().all(|v| v.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        norm_inf(&self.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_sizes() {
        let g = DomainGrid::new(63).unwrap();
        assert_eq!(g.h(), 1.0 / 64.0);
        assert_eq!(g.len(), 3969);
        let g = DomainGrid::new(7).unwrap();
        assert_eq!(g.h(), 0.125);
        assert_eq!(g.len(), 49);
        assert!(matches!(DomainGrid::new(3), Err(TodaError::GridTooSmall(3))));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let g = DomainGrid::new(15).unwrap();
        let u = g.poisson_solve(&vec![0.0; g.len()]).unwrap();
        assert!(u.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sine_mode_second_order() {
        let mut errs = Vec::new();
        for n in [15, 31, 63] {
            let g = DomainGrid::new(n).unwrap();
            let exact = GridField::from_fn(&g, |x, y| (PI * x).sin() * (PI * y).sin());
            let rhs: Vec<f64> = exact.values.iter().map(|v| 2.0 * PI * PI * v).collect();
            let u = g.poisson_solve(&rhs).unwrap();
            let err = u
                .values
                .iter()
                .zip(&exact.values)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            errs.push(err);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order > 1.9, "observed order {order}");
        }
    }

    #[test]
    fn quadrature() {
        let g = DomainGrid::new(63).unwrap();
        let one = g.integrate(&vec![1.0; g.len()]);
        assert!((one - 1.0).abs() <= 2.0 * g.h());
        let s = GridField::from_fn(&g, |x, y| (PI * x).sin() * (PI * y).sin());
        assert!((g.integrate(&s.values) - 4.0 / (PI * PI)).abs() < 1e-3);
    }

    #[test]
    fn snapping() {
        let g = DomainGrid::new(7).unwrap();
        let k = g.nearest_node(0.5, 0.5).unwrap();
        assert_eq!(g.coords(k), (0.5, 0.5));
        let k = g.nearest_node(0.01, 0.99).unwrap();
        assert_eq!(g.coords(k), (0.125, 0.875));
        assert!(g.nearest_node(0.0, 0.5).is_err());
        assert!(g.nearest_node(0.5, 1.2).is_err());
    }

    #[test]
    fn boundary_constant_is_invisible_to_laplacian() {
        let g = DomainGrid::new(9).unwrap();
        let mut f = GridField::constant(&g, 2.5);
        f.boundary_constant = 2.5;
        assert!(g.laplacian(&f).sup_norm() < 1e-12);
    }
}
