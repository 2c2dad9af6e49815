use crate::error::{Result, TodaError};

/// Cholesky factor `A = L·Lᵀ` of a symmetric positive definite band matrix.
///
/// Row `i` of `L` stores columns `i−b ..= i` contiguously.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    b: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    /// Factors the matrix whose lower band is given by `entry(i, j)` for
    /// `i − b ≤ j ≤ i`.
    pub fn factor(n: usize, b: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let w = b + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let i0 = i.saturating_sub(b);
            for j in i0..=i {
                let j0 = j.saturating_sub(b).max(i0);
                let mut sum = entry(i, j);
                let row_i = &l[i * w..(i + 1) * w];
                let row_j = &l[j * w..(j + 1) * w];
                for k in j0..j {
                    sum -= row_i[k + b - i] * row_j[k + b - j];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(TodaError::LinearSolver(format!(
                            "band Cholesky: non-positive pivot {sum:e} at row {i}"
                        )));
                    }
                    l[i * w + b] = sum.sqrt();
                } else {
                    l[i * w + (j + b - i)] = sum / l[j * w + b];
                }
            }
        }
        Ok(BandCholesky { n, b, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Overwrites `x` with `A⁻¹x`.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        debug_assert_eq!(x.len(), n);
        for i in 0..n {
            let row = &self.l[i * w..(i + 1) * w];
            let i0 = i.saturating_sub(b);
            let mut s = x[i];
            for k in i0..i {
                s -= row[k + b - i] * x[k];
            }
            x[i] = s / row[b];
        }
        for i in (0..n).rev() {
            x[i] /= self.l[i * w + b];
            let xi = x[i];
            let row = &self.l[i * w..(i + 1) * w];
            for k in i.saturating_sub(b)..i {
                x[k] -= row[k + b - i] * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solve() {
        // [[2,-1,0],[-1,2,-1],[0,-1,2]] x = [1,0,1] → x = [1,1,1]
        let f = BandCholesky::factor(3, 1, |i, j| if i == j { 2.0 } else { -1.0 }).unwrap();
        let mut x = vec![1.0, 0.0, 1.0];
        f.solve_in_place(&mut x);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn indefinite_rejected() {
        assert!(BandCholesky::factor(2, 1, |i, j| if i == j { 1.0 } else { 2.0 }).is_err());
    }

    #[test]
    fn matches_dense_solve() {
        let n = 12;
        let b = 3;
        let a = |i: usize, j: usize| -> f64 {
            if i == j {
                10.0 + i as f64
            } else if i.abs_diff(j) <= b {
                1.0 / (1.0 + (i + j) as f64)
            } else {
                0.0
            }
        };
        let f = BandCholesky::factor(n, b, a).unwrap();
        let dense = nalgebra::DMatrix::from_fn(n, n, a);
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut x = rhs.clone();
        f.solve_in_place(&mut x);
        let expected = dense.lu().solve(&nalgebra::DVector::from_vec(rhs)).unwrap();
        for i in 0..n {
            assert!((x[i] - expected[i]).abs() < 1e-13);
        }
    }
}
