use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{axpy, dot, norm2, scale};
use crate::error::{Result, TodaError};

/// A symmetric linear operator on `ℝᵐ`.
pub trait SymOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    pub max_steps: usize,
    /// Ritz pairs are accepted once `‖Op·y − θy‖ ≤ tol·|θ_max|`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            max_steps: 300,
            tol: 1e-11,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RitzPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// The `k` algebraically largest eigenpairs of `op`, in descending order.
///
/// Lanczos with full reorthogonalisation. The start vector is `op` applied
/// to a seeded random vector so that it lies in the range of `op`.
pub fn lanczos_top(op: &dyn SymOp, k: usize, opts: LanczosOptions) -> Result<Vec<RitzPair>> {
    let m = op.dim();
    if k == 0 || m == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let seed_vec: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut q = vec![0.0; m];
    op.apply(&seed_vec, &mut q);
    let q_norm = norm2(&q);
    if q_norm == 0.0 {
        return Err(TodaError::Eigen("operator annihilates the start vector".into()));
    }
    scale(1.0 / q_norm, &mut q);

    let max_steps = opts.max_steps.min(m);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; m];
    let mut last_check: Option<(nalgebra::DVector<f64>, nalgebra::DMatrix<f64>)> = None;

    for j in 0..max_steps {
        op.apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                axpy(-c, v, &mut w);
            }
        }
        let b = norm2(&w);
        let steps = j + 1;
        let invariant = b <= 1e-14 * alpha.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        let check_now = invariant || steps == max_steps || (steps >= k && steps % 5 == 0);
        if check_now {
            let t = nalgebra::DMatrix::from_fn(steps, steps, |r, c| {
                if r == c {
                    alpha[r]
                } else if r.abs_diff(c) == 1 {
                    beta[r.min(c)]
                } else {
                    0.0
                }
            });
            let eig = nalgebra::SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..steps).collect();
            order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
            let scale_ref = eig.eigenvalues[order[0]].abs().max(f64::MIN_POSITIVE);
            let kk = k.min(steps);
            let converged = order[..kk]
                .iter()
                .all(|&i| (b * eig.eigenvectors[(steps - 1, i)]).abs() <= opts.tol * scale_ref);
            if converged && (kk == k || invariant) {
                return Ok(assemble(&basis, &eig, &order[..kk], b));
            }
            if invariant || steps == max_steps {
                if steps == m || invariant {
                    return Ok(assemble(&basis, &eig, &order[..kk], b));
                }
                last_check = Some((eig.eigenvalues.clone(), eig.eigenvectors.clone()));
                break;
            }
        }
        beta.push(b);
        let mut next = w.clone();
        scale(1.0 / b, &mut next);
        basis.push(next);
    }
    let detail = last_check
        .map(|(vals, _)| format!("; top Ritz value {:e}", vals.max()))
        .unwrap_or_default();
    Err(TodaError::Eigen(format!(
        "Lanczos did not converge in {max_steps} steps{detail}"
    )))
}

fn assemble(
    basis: &[Vec<f64>],
    eig: &nalgebra::SymmetricEigen<f64, nalgebra::Dyn>,
    picked: &[usize],
    last_beta: f64,
) -> Vec<RitzPair> {
    let steps = eig.eigenvalues.len();
    let m = basis[0].len();
    picked
        .iter()
        .map(|&i| {
            let mut v = vec![0.0; m];
            for (r, q) in basis.iter().take(steps).enumerate() {
                axpy(eig.eigenvectors[(r, i)], q, &mut v);
            }
            let nv = norm2(&v);
            scale(1.0 / nv, &mut v);
            RitzPair {
                value: eig.eigenvalues[i],
                vector: v,
                residual: (last_beta * eig.eigenvectors[(steps - 1, i)]).abs(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag(Vec<f64>);
    impl SymOp for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    #[test]
    fn finds_top_of_diagonal() {
        let op = Diag((1..=400).map(|i| 1.0 / i as f64).collect());
        let pairs = lanczos_top(&op, 3, LanczosOptions::default()).unwrap();
        assert!((pairs[0].value - 1.0).abs() < 1e-12);
        assert!((pairs[1].value - 0.5).abs() < 1e-12);
        assert!((pairs[2].value - 1.0 / 3.0).abs() < 1e-12);
        assert!(pairs[0].vector[0].abs() > 1.0 - 1e-10);
    }

    #[test]
    fn small_dimension_exhausts_space() {
        let op = Diag(vec![3.0, 1.0, 2.0]);
        let pairs = lanczos_top(&op, 2, LanczosOptions::default()).unwrap();
        assert!((pairs[0].value - 3.0).abs() < 1e-13);
        assert!((pairs[1].value - 2.0).abs() < 1e-13);
    }
}
