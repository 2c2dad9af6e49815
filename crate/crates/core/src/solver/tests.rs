use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::grid::{assemble_weight, DomainGrid, FPreset, GridField, SingularSource};
use crate::lie::{build_cartan, uniqueness_thresholds, Family, LieFamily};

fn problem(family: Family, rank: usize, n: usize) -> TodaProblem {
    TodaProblem::uniform(DomainGrid::new(n).unwrap(), LieFamily::new(family, rank).unwrap()).unwrap()
}

fn random_v(p: &TodaProblem, seed: u64, amp: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..p.dim()).map(|_| rng.gen_range(-amp..amp)).collect()
}

#[test]
fn jacobian_matches_central_differences() {
    for (family, rank) in [(Family::A, 2), (Family::G, 2), (Family::B, 3)] {
        let p = problem(family, rank, 9);
        let lambda: Vec<f64> = (0..rank).map(|i| 3.0 + i as f64).collect();
        let v = random_v(&p, 1, 0.5);
        let dir = random_v(&p, 2, 1.0);
        let (_, lin) = p.evaluate(&v, &lambda).unwrap();
        let mut jd = vec![0.0; p.dim()];
        lin.apply(&dir, &mut jd);
        let eps = 1e-6;
        let plus: Vec<f64> = v.iter().zip(&dir).map(|(a, b)| a + eps * b).collect();
        let minus: Vec<f64> = v.iter().zip(&dir).map(|(a, b)| a - eps * b).collect();
        let (fp, _) = p.evaluate(&plus, &lambda).unwrap();
        let (fm, _) = p.evaluate(&minus, &lambda).unwrap();
        let fd: Vec<f64> = fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * eps)).collect();
        let err = fd.iter().zip(&jd).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let scale = jd.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(err <= 1e-6 * scale, "{family}{rank}: {err:e} vs {scale:e}");
    }
}

#[test]
fn zero_parameters_give_zero_solution() {
    let p = problem(Family::A, 2, 15);
    let init = vec![GridField::from_fn(p.grid(), |x, y| x * y); 2];
    let s = newton_solve(&p, &[0.0, 0.0], Some(&init), &NewtonOptions::default()).unwrap();
    assert!(s.iterations <= 1);
    assert!(s.u.iter().all(|f| f.values.iter().all(|x| *x == 0.0)));
}

#[test]
fn newton_converges_and_symmetric_data_gives_symmetric_solution() {
    let p = problem(Family::A, 2, 31);
    let s = newton_solve(&p, &[5.0, 5.0], None, &NewtonOptions::default()).unwrap();
    assert!(s.residual_norm <= 1e-9);
    let r = residual(&p, &s).unwrap();
    assert!(state::residual_sup(&r) <= 1e-9);
    assert!(s.sup_distance(&TodaState { u: vec![s.u[1].clone(), s.u[0].clone()], ..s.clone() }) < 1e-10);
    assert!(s.u[0].values.iter().all(|x| *x > 0.0));
}

#[test]
fn non_symmetric_family_converges_in_original_variables() {
    let p = problem(Family::G, 2, 23);
    let th = uniqueness_thresholds(LieFamily::new(Family::G, 2).unwrap()).unwrap();
    let lambda = th.lambda_at(0.5);
    let s = newton_solve(&p, &lambda, None, &NewtonOptions::default()).unwrap();
    let r = residual(&p, &s).unwrap();
    assert!(state::residual_sup(&r) <= 1e-9);
}

#[test]
fn singular_weight_solution() {
    let grid = DomainGrid::new(31).unwrap();
    let src = SingularSource::new(0.5, 0.5, 1.0).unwrap();
    let w = assemble_weight(&grid, &FPreset::Zero, &[src]).unwrap();
    let cartan = build_cartan(LieFamily::new(Family::A, 2).unwrap()).unwrap();
    let p = TodaProblem::new(grid, cartan, vec![w.clone(), w]).unwrap();
    let s = newton_solve(&p, &[4.0, 6.0], None, &NewtonOptions::default()).unwrap();
    assert!(s.residual_norm <= 1e-9);
}

#[test]
fn energy_derivative_matches_finite_differences() {
    let p = problem(Family::C, 3, 9);
    let lambda = [2.0, 1.0, 3.0];
    let v = random_v(&p, 3, 0.7);
    let w = random_v(&p, 4, 1.0);
    let eps = 1e-5;
    let plus: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + eps * b).collect();
    let minus: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a - eps * b).collect();
    let fd = (energy_of_v(&p, &plus, &lambda).unwrap() - energy_of_v(&p, &minus, &lambda).unwrap())
        / (2.0 * eps);
    let exact = energy_directional_derivative(&p, &v, &w, &lambda).unwrap();
    assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "{fd} vs {exact}");
}

#[test]
fn solutions_are_critical_points_of_the_energy() {
    let p = problem(Family::B, 2, 23);
    let lambda = [2.0, 3.0];
    let s = newton_solve(&p, &lambda, None, &NewtonOptions::default()).unwrap();
    let u: Vec<Vec<f64>> = s.u.iter().map(|f| f.values.clone()).collect();
    let v = p.u_to_v(&u);
    let w: Vec<f64> = (0..p.dim()).map(|k| ((k % 17) as f64 - 8.0) / 8.0).collect();
    let dj = energy_directional_derivative(&p, &v, &w, &lambda).unwrap();
    assert!(dj.abs() < 1e-8, "{dj}");
    // and the energy is locally minimal there in the small-λ regime
    let e0 = energy(&p, &s).unwrap();
    let bumped: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + 1e-2 * b).collect();
    assert!(energy_of_v(&p, &bumped, &lambda).unwrap() > e0);
}

#[test]
fn continuation_reaches_near_threshold() {
    let p = problem(Family::A, 2, 31);
    let th = uniqueness_thresholds(LieFamily::new(Family::A, 2).unwrap()).unwrap();
    let target = th.lambda_at(0.99);
    let branch = continuation(&p, &target, &ContinuationOptions::default()).unwrap();
    assert!(branch.complete, "{:?}", branch.failure);
    assert!(branch.points.windows(2).all(|w| w[0].t < w[1].t));
    assert_eq!(branch.last().t, 1.0);
    assert!(branch.points.iter().all(|pt| pt.state.residual_norm <= 1e-9 && pt.certify));
}

#[test]
fn deflation_at_zero_finds_nothing_new() {
    let p = problem(Family::A, 1, 15);
    let known = vec![TodaState::trivial(&p).unwrap()];
    let opts = DeflationOptions {
        starts: 4,
        ..DeflationOptions::default()
    };
    let report = deflated_search(&p, &[0.0], &known, &opts).unwrap();
    assert!(report.found.is_empty());
}

#[test]
fn deflation_is_deterministic_and_respects_uniqueness() {
    let p = problem(Family::A, 1, 15);
    let s = newton_solve(&p, &[6.0], None, &NewtonOptions::default()).unwrap();
    let opts = DeflationOptions {
        starts: 4,
        ..DeflationOptions::default()
    };
    let a = deflated_search(&p, &[6.0], std::slice::from_ref(&s), &opts).unwrap();
    let b = deflated_search(&p, &[6.0], std::slice::from_ref(&s), &opts).unwrap();
    assert_eq!(a.outcomes, b.outcomes);
    assert!(a.found.is_empty(), "{:?}", a.outcomes);
}
