//! Exact dense linear algebra over `BigRational`.
//!
//! Matrices here are tiny (rank ≤ a few dozen) so plain `Vec<Vec<_>>`
//! storage and schoolbook elimination are adequate.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type QMatrix = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_integers(m: &[Vec<i64>]) -> QMatrix {
    m.iter().map(|row| row.iter().map(|&x| q(x)).collect()).collect()
}

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Q::zero();
                    for k in 0..inner {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc += &a[i][k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn is_symmetric(a: &QMatrix) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

/// Gauss–Jordan inverse with partial (nonzero) pivoting; `None` if singular.
pub fn inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.len();
    let mut work: QMatrix = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !work[r][col].is_zero())?;
        work.swap(col, pivot);
        inv.swap(col, pivot);
        let p = work[col][col].clone();
        // Cartan matrices are sparse; skipping zeros dominates the cost.
        let nz_work: Vec<usize> = (0..n).filter(|&j| !work[col][j].is_zero()).collect();
        let nz_inv: Vec<usize> = (0..n).filter(|&j| !inv[col][j].is_zero()).collect();
        if !p.is_one() {
            for &j in &nz_work {
                work[col][j] = &work[col][j] / &p;
            }
            for &j in &nz_inv {
                inv[col][j] = &inv[col][j] / &p;
            }
        }
        for r in 0..n {
            if r == col || work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col].clone();
            for &j in &nz_work {
                let w = &factor * &work[col][j];
                work[r][j] -= w;
            }
            for &j in &nz_inv {
                let v = &factor * &inv[col][j];
                inv[r][j] -= v;
            }
        }
    }
    Some(inv)
}

/// Inverse of an integer matrix by fraction-free Gauss–Jordan (Bareiss).
///
/// All intermediate values are integers, so no gcd is taken until the
/// final division by the determinant.
pub fn inverse_integer(a: &[Vec<i64>]) -> Option<QMatrix> {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigInt> = row.iter().map(|&x| BigInt::from(x)).collect();
            r.extend((0..n).map(|j| BigInt::from((i == j) as i64)));
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !m[r][k].is_zero())?;
        m.swap(k, pivot);
        let (top, rest) = m.split_at_mut(k);
        let (row_k, bottom) = rest.split_first_mut().expect("k < n");
        for row in top.iter_mut().chain(bottom.iter_mut()) {
            let f = row[k].clone();
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let mut x = &row_k[k] * &row[j];
                if !f.is_zero() && !row_k[j].is_zero() {
                    x -= &f * &row_k[j];
                }
                row[j] = x / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = row_k[k].clone();
    }
    // The left block is now det·I.
    Some(
        m.into_iter()
            .map(|row| row[n..].iter().map(|x| Q::new(x.clone(), prev.clone())).collect())
            .collect(),
    )
}

/// Leading principal minors of an integer matrix: the Bareiss pivots.
pub fn leading_minors_integer(a: &[Vec<i64>]) -> Vec<Q> {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::one();
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        if m[k][k].is_zero() {
            return leading_minors(&from_integers(a));
        }
        minors.push(Q::from_integer(m[k][k].clone()));
        for i in k + 1..n {
            for j in k + 1..n {
                let mut x = &m[k][k] * &m[i][j];
                if !m[i][k].is_zero() && !m[k][j].is_zero() {
                    x -= &m[i][k] * &m[k][j];
                }
                m[i][j] = x / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    minors
}

/// Leading principal minors `det(A[..k, ..k])` for `k = 1..=n`.
///
/// Computed from the pivots of elimination without row exchanges; once a
/// zero pivot appears the remaining minors are evaluated directly.
pub fn leading_minors(a: &QMatrix) -> Vec<Q> {
    let n = a.len();
    let mut work = a.clone();
    let mut minors = Vec::with_capacity(n);
    let mut running = Q::one();
    for k in 0..n {
        if work[k][k].is_zero() {
            minors.extend((k + 1..=n).map(|size| determinant(&leading_block(a, size))));
            return minors;
        }
        running *= &work[k][k];
        minors.push(running.clone());
        for r in k + 1..n {
            if work[r][k].is_zero() {
                continue;
            }
            let factor = &work[r][k] / &work[k][k];
            for j in k..n {
                let w = &factor * &work[k][j];
                work[r][j] -= w;
            }
        }
    }
    minors
}

fn leading_block(a: &QMatrix, size: usize) -> QMatrix {
    a.iter().take(size).map(|row| row[..size].to_vec()).collect()
}

/// Exact determinant by elimination with row exchanges.
pub fn determinant(a: &QMatrix) -> Q {
    let n = a.len();
    let mut work = a.clone();
    let mut det = Q::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !work[r][col].is_zero()) else {
            return Q::zero();
        };
        if pivot != col {
            work.swap(col, pivot);
            det = -det;
        }
        det *= &work[col][col];
        for r in col + 1..n {
            if work[r][col].is_zero() {
                continue;
            }
            let factor = &work[r][col] / &work[col][col];
            for j in col..n {
                let w = &factor * &work[col][j];
                work[r][j] -= w;
            }
        }
    }
    det
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn matrix_to_f64(a: &QMatrix) -> nalgebra::DMatrix<f64> {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    nalgebra::DMatrix::from_fn(n, m, |i, j| to_f64(&a[i][j]))
}

/// `p` or `p/q` in lowest terms.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Rows joined by newlines, entries by single spaces.
pub fn format_matrix(a: &QMatrix) -> String {
    let mut out = String::new();
    for row in a {
        let line: Vec<String> = row.iter().map(format_q).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn all_positive(values: &[Q]) -> bool {
    values.iter().all(Signed::is_positive)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_by_two() {
        let a = from_integers(&[vec![2, -1], vec![-1, 2]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv[0][0], q_ratio(2, 3));
        assert_eq!(inv[0][1], q_ratio(1, 3));
        assert_eq!(mul(&a, &inv), identity(2));
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = from_integers(&[vec![1, 2], vec![2, 4]]);
        assert!(inverse(&a).is_none());
        assert!(determinant(&a).is_zero());
    }

    #[test]
    fn minors_with_zero_pivot() {
        let a = from_integers(&[vec![0, 1], vec![1, 0]]);
        let m = leading_minors(&a);
        assert_eq!(m, vec![q(0), q(-1)]);
    }

    #[test]
    fn integer_paths_agree_with_rational() {
        let a = vec![vec![2, -1, 0, 0], vec![-1, 2, -2, 0], vec![0, -1, 2, -1], vec![0, 0, -1, 2]];
        let exact = from_integers(&a);
        assert_eq!(inverse_integer(&a), inverse(&exact));
        assert_eq!(leading_minors_integer(&a), leading_minors(&exact));
        let p = vec![vec![0, 1], vec![1, 0]];
        assert_eq!(inverse_integer(&p), inverse(&from_integers(&p)));
        assert_eq!(leading_minors_integer(&p), vec![q(0), q(-1)]);
        assert!(inverse_integer(&[vec![1, 2], vec![2, 4]]).is_none());
    }

    #[test]
    fn formatting() {
        assert_eq!(format_q(&q_ratio(-2, 4)), "-1/2");
        assert_eq!(format_q(&q(3)), "3");
    }
}
