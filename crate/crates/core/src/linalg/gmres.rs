use super::{axpy, dot, norm2};
use crate::error::{Result, TodaError};

#[derive(Clone, Copy, Debug)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_iter: usize,
    pub rel_tol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            restart: 60,
            max_iter: 600,
            rel_tol: 1e-13,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmresStats {
    pub iterations: usize,
    pub rel_residual: f64,
}

/// Restarted GMRES with right preconditioning, `A M⁻¹ z = b`, `x = M⁻¹ z`.
///
/// `x` holds the initial guess on entry and the solution on exit. Running
/// out of iterations is not an error; the caller decides whether the
/// returned relative residual is good enough.
pub fn gmres(
    apply: impl Fn(&[f64], &mut [f64]),
    precond: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x: &mut [f64],
    opts: GmresOptions,
) -> Result<GmresStats> {
    let n = b.len();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(GmresStats {
            iterations: 0,
            rel_residual: 0.0,
        });
    }
    let m = opts.restart.max(1);
    let mut total = 0;
    let mut r = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut w = vec![0.0; n];
    loop {
        apply(x, &mut tmp);
        for i in 0..n {
            r[i] = b[i] - tmp[i];
        }
        let beta = norm2(&r);
        let rel = beta / b_norm;
        if rel <= opts.rel_tol || total >= opts.max_iter || !rel.is_finite() {
            return Ok(GmresStats {
                iterations: total,
                rel_residual: rel,
            });
        }
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        let mut hess = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            precond(&basis[k], &mut tmp);
            apply(&tmp, &mut w);
            // modified Gram–Schmidt, twice for stability
            for _ in 0..2 {
                for (j, q) in basis.iter().enumerate() {
                    let h = dot(&w, q);
                    hess[j][k] += h;
                    axpy(-h, q, &mut w);
                }
            }
            let h_next = norm2(&w);
            hess[k + 1][k] = h_next;
            for j in 0..k {
                let t = cs[j] * hess[j][k] + sn[j] * hess[j + 1][k];
                hess[j + 1][k] = -sn[j] * hess[j][k] + cs[j] * hess[j + 1][k];
                hess[j][k] = t;
            }
            let denom = hess[k][k].hypot(hess[k + 1][k]);
            if denom == 0.0 {
                return Err(TodaError::LinearSolver("GMRES breakdown".into()));
            }
            cs[k] = hess[k][k] / denom;
            sn[k] = hess[k + 1][k] / denom;
            hess[k][k] = denom;
            hess[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            let converged = g[k + 1].abs() / b_norm <= opts.rel_tol;
            if converged || h_next == 0.0 || total >= opts.max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / h_next).collect());
        }
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= hess[i][j] * y[j];
            }
            y[i] = s / hess[i][i];
        }
        let mut z = vec![0.0; n];
        for (j, yj) in y.iter().enumerate() {
            axpy(*yj, &basis[j], &mut z);
        }
        precond(&z, &mut tmp);
        axpy(1.0, &tmp, x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_nonsymmetric_system() {
        let n = 40;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..n {
                let mut s = 3.0 * x[i];
                if i > 0 {
                    s -= 1.5 * x[i - 1];
                }
                if i + 1 < n {
                    s -= 0.5 * x[i + 1];
                }
                y[i] = s;
            }
        };
        let b: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut x = vec![0.0; n];
        let opts = GmresOptions {
            restart: 7,
            ..Default::default()
        };
        let stats = gmres(apply, |r, z| z.copy_from_slice(r), &b, &mut x, opts).unwrap();
        assert!(stats.rel_residual <= 1e-13);
        let mut check = vec![0.0; n];
        apply(&x, &mut check);
        for i in 0..n {
            assert!((check[i] - b[i]).abs() < 1e-10);
        }
    }
}
