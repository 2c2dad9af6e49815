use std::collections::VecDeque;

use num::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::family::{Family, LieFamily};
use super::rational::{self, QMatrix, Q};
use crate::error::{Result, TodaError};

/// Exact Cartan matrix `A = (aᵢⱼ)` together with its rational inverse `(aⁱʲ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanMatrix {
    algebra: LieFamily,
    entries: Vec<Vec<i64>>,
    inverse: QMatrix,
}

impl CartanMatrix {
    /// Builds from raw integer entries, checking the Cartan axioms used here:
    /// diagonal 2, off-diagonal in `{0, −1, −2, −3}` with matching zero
    /// pattern, invertible and positive definite.
    pub fn from_entries(algebra: LieFamily, entries: Vec<Vec<i64>>) -> Result<Self> {
        let n = algebra.rank();
        let bad = |reason: String| TodaError::InvalidAlgebra {
            family: algebra.family().to_string(),
            rank: n,
            reason,
        };
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(bad(format!("expected a {n}x{n} matrix")));
        }
        for i in 0..n {
            for j in 0..n {
                let a = entries[i][j];
                if i == j && a != 2 {
                    return Err(bad(format!("diagonal entry ({i},{j}) = {a} is not 2")));
                }
                if i != j && !(-3..=0).contains(&a) {
                    return Err(bad(format!("off-diagonal entry ({i},{j}) = {a}")));
                }
                if i != j && (a == 0) != (entries[j][i] == 0) {
                    return Err(bad(format!("zero pattern not symmetric at ({i},{j})")));
                }
            }
        }
        if !rational::all_positive(&rational::leading_minors_integer(&entries)) {
            return Err(bad("matrix is not positive definite".into()));
        }
        let inverse =
            rational::inverse_integer(&entries).ok_or_else(|| bad("matrix is singular".into()))?;
        Ok(CartanMatrix {
            algebra,
            entries,
            inverse,
        })
    }

    pub fn algebra(&self) -> LieFamily {
        self.algebra
    }

    pub fn rank(&self) -> usize {
        self.algebra.rank()
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn exact(&self) -> QMatrix {
        rational::from_integers(&self.entries)
    }

    pub fn inverse(&self) -> &QMatrix {
        &self.inverse
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        let n = self.rank();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.entries[i][j] as f64)
    }

    pub fn inverse_f64(&self) -> nalgebra::DMatrix<f64> {
        rational::matrix_to_f64(&self.inverse)
    }

    /// Leading principal minors, all strictly positive for a Cartan matrix.
    pub fn leading_minors(&self) -> Vec<Q> {
        rational::leading_minors(&self.exact())
    }
}

impl Serialize for CartanMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            algebra: String,
            entries: &'a [Vec<i64>],
            inverse: Vec<Vec<String>>,
        }
        View {
            algebra: self.algebra.to_string(),
            entries: &self.entries,
            inverse: self
                .inverse
                .iter()
                .map(|r| r.iter().map(rational::format_q).collect())
                .collect(),
        }
        .serialize(s)
    }
}

fn chain(n: usize) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        a[i][i] = 2;
        if i + 1 < n {
            a[i][i + 1] = -1;
            a[i + 1][i] = -1;
        }
    }
    a
}

fn simply_laced(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<i64>> {
    let mut a = vec![vec![0i64; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    for &(i, j) in edges {
        a[i][j] = -1;
        a[j][i] = -1;
    }
    a
}

/// Standard Cartan matrix of `algebra`.
///
/// `B`, `C`, `F₄`, `G₂` use the row convention where the double/triple
/// bond entry of `Bₙ` sits at `(n−1, n)`, of `Cₙ` at `(n, n−1)`, of `F₄`
/// at `(2, 3)` and of `G₂` at `(2, 1)` (1-based). `Dₙ` and `E₆,₇,₈` follow
/// Bourbaki numbering.
pub fn build_cartan(algebra: LieFamily) -> Result<CartanMatrix> {
    let n = algebra.rank();
    let entries = match algebra.family() {
        Family::A => chain(n),
        Family::B => {
            let mut a = chain(n);
            a[n - 2][n - 1] = -2;
            a
        }
        Family::C => {
            let mut a = chain(n);
            a[n - 1][n - 2] = -2;
            a
        }
        Family::D => {
            // α₁ − … − α_{n−2} with α_{n−1}, αₙ both attached to α_{n−2}.
            let mut edges: Vec<(usize, usize)> = (0..n - 2).map(|i| (i, i + 1)).collect();
            edges.push((n - 3, n - 1));
            simply_laced(n, &edges)
        }
        Family::E => {
            // α₁ − α₃ − α₄ − α₅ − … − αₙ with α₂ attached to α₄.
            let mut edges = vec![(0, 2), (2, 3), (1, 3)];
            edges.extend((3..n - 1).map(|i| (i, i + 1)));
            simply_laced(n, &edges)
        }
        Family::F => vec![
            vec![2, -1, 0, 0],
            vec![-1, 2, -2, 0],
            vec![0, -1, 2, -1],
            vec![0, 0, -1, 2],
        ],
        Family::G => vec![vec![2, -1], vec![-3, 2]],
    };
    CartanMatrix::from_entries(algebra, entries)
}

/// `A = D·Aˢ` with `D = diag(d)` positive and `Aˢ` symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricDecomposition {
    algebra: LieFamily,
    d: Vec<Q>,
    a_s: QMatrix,
    a_s_inverse: QMatrix,
}

impl SymmetricDecomposition {
    pub fn algebra(&self) -> LieFamily {
        self.algebra
    }

    pub fn rank(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[Q] {
        &self.d
    }

    pub fn a_s(&self) -> &QMatrix {
        &self.a_s
    }

    pub fn a_s_inverse(&self) -> &QMatrix {
        &self.a_s_inverse
    }

    pub fn d_f64(&self) -> Vec<f64> {
        self.d.iter().map(rational::to_f64).collect()
    }

    pub fn a_s_f64(&self) -> nalgebra::DMatrix<f64> {
        rational::matrix_to_f64(&self.a_s)
    }

    pub fn a_s_inverse_f64(&self) -> nalgebra::DMatrix<f64> {
        rational::matrix_to_f64(&self.a_s_inverse)
    }

    /// `D·Aˢ` recomputed exactly.
    pub fn recompose(&self) -> QMatrix {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| &self.d[i] * &self.a_s[i][j]).collect())
            .collect()
    }

    /// `λᵢˢ = dᵢλᵢ`.
    pub fn scale_lambda(&self, lambda: &[f64]) -> Vec<f64> {
        self.d_f64().iter().zip(lambda).map(|(d, l)| d * l).collect()
    }
}

/// Symmetrises a Cartan matrix.
///
/// Along every edge of the Dynkin diagram `dⱼ/dᵢ = aⱼᵢ/aᵢⱼ`; the ratios are
/// propagated from node 1 and the result normalised so that `min dᵢ = 1`.
pub fn symmetric_decomposition(a: &CartanMatrix) -> SymmetricDecomposition {
    let n = a.rank();
    let exact = a.exact();
    let mut d: Vec<Option<Q>> = vec![None; n];
    d[0] = Some(Q::one());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let di = d[i].clone().expect("visited node has a scale");
        for j in 0..n {
            if j != i && d[j].is_none() && !exact[i][j].is_zero() {
                d[j] = Some(&di * &exact[j][i] / &exact[i][j]);
                queue.push_back(j);
            }
        }
    }
    // Dynkin diagrams of simple algebras are connected.
    let d: Vec<Q> = d.into_iter().map(|x| x.expect("connected Dynkin diagram")).collect();
    let min = d.iter().min().cloned().expect("rank ≥ 1");
    let d: Vec<Q> = d.iter().map(|x| x / &min).collect();
    let a_s: QMatrix = (0..n)
        .map(|i| (0..n).map(|j| &exact[i][j] / &d[i]).collect())
        .collect();
    debug_assert!(rational::is_symmetric(&a_s));
    debug_assert!(d.iter().all(Signed::is_positive));
    // (D⁻¹A)⁻¹ = A⁻¹D.
    let a_s_inverse: QMatrix = a
        .inverse()
        .iter()
        .map(|row| row.iter().zip(&d).map(|(x, dj)| x * dj).collect())
        .collect();
    SymmetricDecomposition {
        algebra: a.algebra(),
        d,
        a_s,
        a_s_inverse,
    }
}
