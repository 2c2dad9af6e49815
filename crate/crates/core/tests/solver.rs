use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toda_core::lie::uniqueness_thresholds;
use toda_core::solver::{
    continuation, deflated_search, energy, energy_of_v, newton_solve, ContinuationOptions,
    DeflationOptions, StartOutcome,
};
use toda_core::spectra::{nondegeneracy_certificate, CertificateOptions};
use toda_core::{DomainGrid, Family, LieFamily, NewtonOptions, TodaProblem};

fn problem(family: Family, rank: usize, n: usize) -> TodaProblem {
    TodaProblem::uniform(DomainGrid::new(n).unwrap(), LieFamily::new(family, rank).unwrap()).unwrap()
}

#[test]
fn liouville_below_critical_mass_is_nondegenerate() {
    let p = problem(Family::A, 1, 31);
    let lambda = [0.95 * 4.0 * std::f64::consts::PI];
    let branch = continuation(&p, &lambda, &ContinuationOptions::default()).unwrap();
    assert!(branch.complete, "{:?}", branch.failure);
    let state = &branch.last().state;
    assert!(state.residual_norm <= 1e-9);
    let rep = nondegeneracy_certificate(&p, state, &CertificateOptions::default()).unwrap();
    assert!(rep.coupled_min.unwrap() > 0.0);
    assert!(rep.mu2[0].unwrap() > 0.0);
    assert!(rep.pass, "{:?}", rep.failing);
}

/// With `h ≡ 1` the branch from zero blows up as `2λ → 8π`; on the grid it
/// stops short of `λ = 4π`, and later on finer grids.
#[test]
fn liouville_branch_stops_short_of_four_pi() {
    let lambda = [4.0 * std::f64::consts::PI];
    let reached: Vec<f64> = [15, 31]
        .iter()
        .map(|&n| {
            let branch = continuation(&problem(Family::A, 1, n), &lambda, &ContinuationOptions::default()).unwrap();
            assert!(!branch.complete);
            let last = branch.last();
            assert!(last.state.residual_norm <= 1e-9);
            last.t
        })
        .collect();
    assert!(reached[0] > 0.9 && reached[1] > reached[0], "{reached:?}");
}

#[test]
fn solution_has_lower_energy_than_nearby_states() {
    let p = problem(Family::A, 2, 23);
    let lambda = uniqueness_thresholds(LieFamily::new(Family::A, 2).unwrap()).unwrap().lambda_at(0.5);
    let state = newton_solve(&p, &lambda, None, &NewtonOptions::default()).unwrap();
    let e = energy(&p, &state).unwrap();
    let v: Vec<f64> = state.u.iter().flat_map(|f| f.values.iter().copied()).collect();
    assert!(e <= energy_of_v(&p, &vec![0.0; p.dim()], &lambda).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let amp = rng.gen_range(0.01..0.3);
        let w: Vec<f64> = v.iter().map(|x| x + amp * rng.gen_range(-1.0..1.0)).collect();
        assert!(energy_of_v(&p, &w, &lambda).unwrap() > e);
    }
}

#[test]
fn empty_known_list_is_plain_multistart() {
    let p = problem(Family::A, 2, 23);
    let lambda = uniqueness_thresholds(LieFamily::new(Family::A, 2).unwrap()).unwrap().lambda_at(0.5);
    let direct = newton_solve(&p, &lambda, None, &NewtonOptions::default()).unwrap();
    let opts = DeflationOptions { starts: 6, seed: 5, ..DeflationOptions::default() };
    let rep = deflated_search(&p, &lambda, &[], &opts).unwrap();
    assert_eq!(rep.found.len(), 1);
    assert!(rep.found[0].sup_distance(&direct) < 1e-6);
    assert_eq!(rep.outcomes.len(), 6);
    assert!(matches!(rep.outcomes.iter().find(|o| !matches!(o, StartOutcome::Failed { .. })), Some(StartOutcome::New { index: 0 })));
    let again = deflated_search(&p, &lambda, &[], &opts).unwrap();
    assert_eq!(again.outcomes, rep.outcomes);
}
