use std::path::Path;

use num::{BigInt, BigRational, One, Signed, Zero};
use toda_core::lie::rational::{identity, mul, QMatrix};
use toda_core::lie::{
    build_cartan, char_recursion, dense_symmetric_spectrum, spectral_radius,
    symmetric_decomposition, verify_radius_bounds, RecursionKind, SpectrumMethod,
};
use toda_core::{Family, LieFamily};

fn render(algebra: LieFamily) -> String {
    let a = build_cartan(algebra).unwrap();
    let s = symmetric_decomposition(&a);
    let mut out = String::from("A\n");
    for row in a.entries() {
        out += &row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        out.push('\n');
    }
    out += "d\n";
    out += &s.d().iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    out += "\nAs\n";
    for row in s.a_s() {
        out += &row.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        out.push('\n');
    }
    out
}

#[test]
fn printed_matrices_match_golden_files() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        let algebra: LieFamily = name.parse().unwrap();
        let golden = std::fs::read_to_string(&path).unwrap();
        assert_eq!(render(algebra), golden, "{name}");
        seen += 1;
    }
    assert_eq!(seen, 14);
}

#[test]
fn exact_identities_up_to_rank_fifty() {
    for family in Family::ALL {
        for algebra in LieFamily::enumerate(family, 50) {
            let a = build_cartan(algebra).unwrap();
            let s = symmetric_decomposition(&a);
            let exact = a.exact();
            assert_eq!(s.recompose(), exact, "{algebra}");
            assert_eq!(mul(&exact, a.inverse()), identity(algebra.rank()), "{algebra}");
            assert_eq!(mul(s.a_s(), s.a_s_inverse()), identity(algebra.rank()), "{algebra}");
        }
    }
}

#[test]
fn a_family_closed_form_spectrum() {
    for n in 1..=50 {
        let s = symmetric_decomposition(&build_cartan(LieFamily::new(Family::A, n).unwrap()).unwrap());
        let dense = dense_symmetric_spectrum(&s.a_s_f64()).unwrap();
        for (i, x) in dense.iter().enumerate() {
            let t = ((i + 1) as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin();
            assert!((x - 4.0 * t * t).abs() <= 1e-10, "A{n} eigenvalue {i}");
        }
        let closed = spectral_radius(&s, SpectrumMethod::ClosedForm).unwrap();
        assert!((closed.rho - dense[n - 1]).abs() <= 1e-10);
    }
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `det(λE − M)` by fraction-exact elimination.
fn det_shifted(m: &QMatrix, lambda: i64) -> BigRational {
    let n = m.len();
    let mut a: QMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { q(lambda, 1) - &m[i][j] } else { -m[i][j].clone() }).collect())
        .collect();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let sub = &f * &a[c][k];
                a[r][k] -= sub;
            }
        }
    }
    det
}

/// `Bₙˢ` written out directly: `1` and `−½` except the trailing `[[1, −1], [−1, 2]]`.
fn b_symmetric(n: usize) -> QMatrix {
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        m[i][i] = q(1, 1);
        if i + 1 < n {
            m[i][i + 1] = q(-1, 2);
            m[i + 1][i] = q(-1, 2);
        }
    }
    m[n - 1][n - 1] = q(2, 1);
    m[n - 2][n - 1] = q(-1, 1);
    m[n - 1][n - 2] = q(-1, 1);
    m
}

#[test]
fn b_recursion_signs_against_determinants() {
    for n in 2..=20 {
        let m = b_symmetric(n);
        for (lambda, positive) in [(3, true), (2, false)] {
            let exact = det_shifted(&m, lambda);
            let x = char_recursion(RecursionKind::Bs, n, lambda as f64);
            assert_eq!(exact.is_positive(), positive, "n = {n}, λ = {lambda}");
            assert_eq!(x > 0.0, positive, "n = {n}, λ = {lambda}");
            let e = num::ToPrimitive::to_f64(&exact).unwrap();
            assert!((x - e).abs() <= 1e-12 * e.abs().max(1.0), "n = {n}: {x} vs {e}");
        }
    }
}

#[test]
fn radius_bounds_all_families() {
    for family in Family::ALL {
        let rep = verify_radius_bounds(family, 20).unwrap();
        for row in &rep.rows {
            assert!((2.0..=4.0).contains(&row.rho), "{}", row.algebra);
            match family {
                Family::B => assert!(row.rho > 2.0 && row.rho < 3.0),
                Family::C => assert!(row.rho > 2.0 && row.rho <= 4.0),
                _ => {}
            }
        }
    }
}
