use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::grid::{assemble_weight, DomainGrid, FPreset, GridField, SingularSource};
use crate::lie::{Family, LieFamily};
use crate::solver::{newton_solve, NewtonOptions, TodaProblem, TodaState};

fn dense_laplacian(grid: &DomainGrid) -> DMatrix<f64> {
    let m = grid.len();
    let mut l = DMatrix::zeros(m, m);
    let mut e = vec![0.0; m];
    let mut col = vec![0.0; m];
    for j in 0..m {
        e[j] = 1.0;
        grid.laplacian_apply(&e, &mut col);
        e[j] = 0.0;
        l.set_column(j, &nalgebra::DVector::from_column_slice(&col));
    }
    l
}

/// Orthonormal basis of `{x : Cx = 0}` from the spectral projector.
fn null_space(c: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    if c.nrows() == 0 {
        return DMatrix::identity(dim, dim);
    }
    let gram = c * c.transpose();
    let p = DMatrix::identity(dim, dim) - c.transpose() * gram.try_inverse().unwrap() * c;
    let eig = SymmetricEigen::new(p);
    let cols: Vec<_> = (0..dim)
        .filter(|&i| eig.eigenvalues[i] > 0.5)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();
    DMatrix::from_columns(&cols)
}

/// Smallest `θ` of `Kx = θMx` on `{Cx = 0}`, via Cholesky of the reduced `K`.
fn oracle_theta(k: &DMatrix<f64>, m: &DMatrix<f64>, c: &DMatrix<f64>) -> f64 {
    let basis = null_space(c, k.nrows());
    let kr = basis.transpose() * k * &basis;
    let mr = basis.transpose() * m * &basis;
    let chol = kr.cholesky().unwrap();
    let g_inv = chol.l().try_inverse().unwrap();
    let b = &g_inv * mr * g_inv.transpose();
    let top = SymmetricEigen::new((&b + b.transpose()) * 0.5).eigenvalues.max();
    1.0 / top
}

fn bump_potential(grid: &DomainGrid, lambda: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..grid.len())
        .map(|k| {
            let (x, y) = grid.coords(k);
            (-(20.0 * ((x - 0.3).powi(2) + (y - 0.6).powi(2)))).exp() + 0.1
        })
        .collect();
    let mass = grid.integrate(&raw);
    raw.into_iter().map(|v| lambda * v / mass).collect()
}

#[test]
fn dirichlet_eigenvalue_matches_dense_oracle() {
    let grid = DomainGrid::new(15).unwrap();
    let v = bump_potential(&grid, 7.0);
    let rho = 3.0;
    let l = dense_laplacian(&grid);
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&v));
    let theta = oracle_theta(&l, &m, &DMatrix::zeros(0, grid.len()));
    for method in [EigenMethod::Lanczos, EigenMethod::Dense] {
        let e = scalar_eigen_dirichlet(&grid, &v, rho, method).unwrap();
        assert!((e.mu - (theta - rho)).abs() < 1e-8, "{method:?}: {} vs {}", e.mu, theta - rho);
        assert!(e.equation_residual < 1e-8);
        let norm = grid.inner(&v, &e.eigenfunction.values.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn constrained_eigenvalue_matches_augmented_dense_oracle() {
    let grid = DomainGrid::new(15).unwrap();
    let m = grid.len();
    let v = bump_potential(&grid, 9.0);
    let rho = 2.0;
    // unknowns (w, c): stiffness (w − c1)ᵀL(w − c1), mass wᵀVw, constraint 1ᵀVw = 0
    let l = dense_laplacian(&grid);
    let mut p = DMatrix::zeros(m, m + 1);
    for i in 0..m {
        p[(i, i)] = 1.0;
        p[(i, m)] = -1.0;
    }
    let k = p.transpose() * l * &p;
    let mut mass = DMatrix::zeros(m + 1, m + 1);
    let mut c = DMatrix::zeros(1, m + 1);
    for i in 0..m {
        mass[(i, i)] = v[i];
        c[(0, i)] = v[i];
    }
    let theta = oracle_theta(&k, &mass, &c);
    for method in [EigenMethod::Lanczos, EigenMethod::Dense] {
        let e = scalar_eigen_constrained(&grid, &v, rho, method).unwrap();
        assert!((e.mu - (theta - rho)).abs() < 1e-8, "{method:?}: {} vs {}", e.mu, theta - rho);
        assert!(e.constraint_residual < 1e-8);
        assert!(e.equation_residual < 1e-8);
        assert!(e.eigenfunction.boundary_constant.abs() > 1e-6);
    }
}

#[test]
fn constant_potential_reduces_to_laplacian_eigenvalue() {
    let grid = DomainGrid::new(31).unwrap();
    let lam1 = grid.first_dirichlet_eigenvalue();
    for lambda in [0.1, 1.0, 5.0] {
        let v = vec![lambda; grid.len()];
        let e = scalar_eigen_dirichlet(&grid, &v, 2.0, EigenMethod::Lanczos).unwrap();
        assert!((e.mu - (lam1 / lambda - 2.0)).abs() < 1e-8 * (lam1 / lambda));
    }
}

#[test]
fn dirichlet_eigenvalue_is_the_minimum_of_the_quotient() {
    let grid = DomainGrid::new(15).unwrap();
    let v = bump_potential(&grid, 5.0);
    let rho = 3.0;
    let e = scalar_eigen_dirichlet(&grid, &v, rho, EigenMethod::Lanczos).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let phi: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let num = grid.dirichlet_form(&phi, &phi);
        let den = grid.inner(&v, &phi.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!(num / den - rho >= e.mu - 1e-10);
    }
    // monotone in ρ
    let e2 = scalar_eigen_dirichlet(&grid, &v, rho + 0.5, EigenMethod::Lanczos).unwrap();
    assert!(e2.mu < e.mu);
}

#[test]
fn vanishing_potential_is_rejected() {
    let grid = DomainGrid::new(15).unwrap();
    let v = vec![0.0; grid.len()];
    assert!(scalar_eigen_dirichlet(&grid, &v, 2.0, EigenMethod::Auto).is_err());
    assert!(scalar_eigen_constrained(&grid, &v, 2.0, EigenMethod::Auto).is_err());
}

#[test]
fn coupled_minimum_matches_dense_oracle() {
    let grid = DomainGrid::new(9).unwrap();
    let m = grid.len();
    let a_s = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
    let v = vec![bump_potential(&grid, 6.0), vec![4.0; m]];
    let a_inv = a_s.clone().try_inverse().unwrap();
    let l = dense_laplacian(&grid);
    let k = a_inv.kronecker(&l);
    let mut mass = DMatrix::zeros(2 * m, 2 * m);
    let mut c = DMatrix::zeros(2, 2 * m);
    for i in 0..2 {
        for p in 0..m {
            mass[(i * m + p, i * m + p)] = v[i][p];
            c[(i, i * m + p)] = v[i][p];
        }
    }
    let free = oracle_theta(&k, &mass, &DMatrix::zeros(0, 2 * m)) - 1.0;
    let constrained = oracle_theta(&k, &mass, &c) - 1.0;
    for method in [EigenMethod::Lanczos, EigenMethod::Dense] {
        let a = coupled_form_min(&grid, &v, &a_s, false, method).unwrap().unwrap();
        let b = coupled_form_min(&grid, &v, &a_s, true, method).unwrap().unwrap();
        assert!((a.min - free).abs() < 1e-8, "{} vs {free}", a.min);
        assert!((b.min - constrained).abs() < 1e-8, "{} vs {constrained}", b.min);
        assert!(b.min >= a.min);
        assert!(b.constraint_residual < 1e-8);
        assert!(a.rayleigh_residual < 1e-8 && b.rayleigh_residual < 1e-8);
        assert!(a.chain_gap >= -1e-9 && b.chain_gap >= -1e-9);
    }
}

#[test]
fn coupled_minimum_single_component_closed_form() {
    let grid = DomainGrid::new(31).unwrap();
    let a_s = DMatrix::from_row_slice(1, 1, &[2.0]);
    let c = 3.0;
    let e = coupled_form_min(&grid, &[vec![c; grid.len()]], &a_s, false, EigenMethod::Auto)
        .unwrap()
        .unwrap();
    let expected = grid.first_dirichlet_eigenvalue() / (2.0 * c) - 1.0;
    assert!((e.min - expected).abs() < 1e-9);
}

#[test]
fn coupled_minimum_blows_up_for_small_potentials() {
    let grid = DomainGrid::new(31).unwrap();
    let a_s = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
    let v = vec![vec![1e-3; grid.len()]; 2];
    let e = coupled_form_min(&grid, &v, &a_s, true, EigenMethod::Auto).unwrap().unwrap();
    assert!(e.min > 10.0);
    let zero = vec![vec![0.0; grid.len()]; 2];
    assert!(coupled_form_min(&grid, &zero, &a_s, true, EigenMethod::Auto).unwrap().is_none());
    // an inactive component is dropped from the mass
    let mixed = vec![vec![1.0; grid.len()], vec![0.0; grid.len()]];
    let e = coupled_form_min(&grid, &mixed, &a_s, false, EigenMethod::Auto).unwrap().unwrap();
    assert_eq!(e.active, vec![0]);
    // Schur complement of (Aˢ)⁻¹ on the first block is 1/aˢ₁₁
    let expected = grid.first_dirichlet_eigenvalue() / 2.0 - 1.0;
    assert!((e.min - expected).abs() < 1e-8 * expected);
}

#[test]
fn boundary_diagnostic_lies_below_the_dirichlet_constrained_minimum() {
    let grid = DomainGrid::new(15).unwrap();
    let a_s = DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0]);
    let v = vec![bump_potential(&grid, 3.0), bump_potential(&grid, 5.0)];
    let d = coupled_form_min(&grid, &v, &a_s, true, EigenMethod::Lanczos).unwrap().unwrap();
    let b = coupled_form_min_boundary(&grid, &v, &a_s, EigenMethod::Lanczos).unwrap().unwrap();
    assert!(b.min <= d.min + 1e-10);
    assert!(b.constraint_residual < 1e-8 && b.rayleigh_residual < 1e-8);
}

#[test]
fn lemma_constant_coefficient_reduction() {
    let grid = DomainGrid::new(63).unwrap();
    let lam1 = grid.first_dirichlet_eigenvalue();
    let zero = GridField::zeros(&grid);
    for k in [0.1, 1.0, 5.0] {
        let r = lemma_certificate(&grid, &vec![k; grid.len()], &zero, EigenMethod::Auto).unwrap();
        let expected = lam1 / k - 1.0;
        assert!((r.nu1 - expected).abs() <= 0.01 * expected.abs());
        assert!(r.nu2 > r.nu1);
        assert_eq!(r.nu1_verdict, Verdict::Pass);
    }
    let r = lemma_certificate(&grid, &vec![8.5 * PI; grid.len()], &zero, EigenMethod::Auto).unwrap();
    assert_eq!(r.nu1_verdict, Verdict::NotRequired);
    assert_eq!(r.nu2_verdict, Verdict::NotRequired);
}

#[test]
fn lemma_rejects_non_subsolutions() {
    let grid = DomainGrid::new(15).unwrap();
    let v = GridField::from_fn(&grid, |x, y| 5.0 * (PI * x).sin() * (PI * y).sin());
    let err = lemma_certificate(&grid, &vec![0.1; grid.len()], &v, EigenMethod::Auto);
    assert!(matches!(err, Err(crate::TodaError::NotSubsolution(_))));
}

fn uniform_state(family: Family, rank: usize, n: usize, lambda: &[f64]) -> (TodaProblem, TodaState) {
    let p = TodaProblem::uniform(DomainGrid::new(n).unwrap(), LieFamily::new(family, rank).unwrap())
        .unwrap();
    let s = newton_solve(&p, lambda, None, &NewtonOptions::default()).unwrap();
    (p, s)
}

#[test]
fn densities_integrate_to_parameters() {
    let (p, s) = uniform_state(Family::A, 2, 31, &[2.0, 0.0]);
    let d = assemble_densities(&p, &s).unwrap();
    assert!((d[0].integral - 2.0).abs() < 1e-12);
    assert!(d[1].v.values.iter().all(|x| *x == 0.0));
    let t = TodaState::trivial(&p).unwrap();
    let mut t = t;
    t.lambda = vec![3.0, 4.0];
    let d = assemble_densities(&p, &t).unwrap();
    // constant, equal to λ over the discrete area N²h²
    let area = p.grid().integrate(&vec![1.0; p.grid().len()]);
    assert!(d[1].v.values.iter().all(|x| (x - 4.0 / area).abs() < 1e-12));
}

#[test]
fn certificate_trivial_state_passes() {
    let p = TodaProblem::uniform(DomainGrid::new(15).unwrap(), LieFamily::new(Family::A, 2).unwrap())
        .unwrap();
    let s = TodaState::trivial(&p).unwrap();
    let r = nondegeneracy_certificate(&p, &s, &CertificateOptions::default()).unwrap();
    assert!(r.pass);
    assert!(r.coupled_min.is_none() && r.mu1.iter().all(Option::is_none));
}

#[test]
fn certificate_small_parameters() {
    let (p, s) = uniform_state(Family::A, 2, 31, &[2.0, 2.0]);
    let r = nondegeneracy_certificate(&p, &s, &CertificateOptions::default()).unwrap();
    assert!(r.pass, "{:?}", r.failing);
    assert!(r.coupled_min.unwrap() > 0.0);
    assert!(r.subsolution.max_margin <= 1e-8);
    let lb = r.coupled_lower_bound.unwrap();
    assert!(r.coupled_min.unwrap() >= lb - 1e-10);
    assert!(r.coupled_min_unconstrained.unwrap() >= lb - 1e-10);
    for i in 0..2 {
        // ν = μ̂/ρ since the lemma coefficient is ρVᵢ
        assert!((r.nu1[i].unwrap() - r.mu1[i].unwrap() / r.rho).abs() < 1e-8);
    }
}

#[test]
fn certificate_singular_weight_non_symmetric_family() {
    let grid = DomainGrid::new(31).unwrap();
    let src = SingularSource::new(0.5, 0.5, 1.0).unwrap();
    let w = assemble_weight(&grid, &FPreset::Zero, &[src]).unwrap();
    let algebra = LieFamily::new(Family::G, 2).unwrap();
    let cartan = crate::lie::build_cartan(algebra).unwrap();
    let p = TodaProblem::new(grid, cartan, vec![w.clone(), w]).unwrap();
    let s = newton_solve(&p, &[1.0, 0.5], None, &NewtonOptions::default()).unwrap();
    let r = nondegeneracy_certificate(&p, &s, &CertificateOptions::default()).unwrap();
    assert!(r.within_box);
    assert!(r.pass, "{:?}", r.failing);
}
