//! Shared fixtures for the benchmarks.

use toda_core::lie::uniqueness_thresholds;
use toda_core::solver::newton_solve;
use toda_core::{DomainGrid, Family, LieFamily, NewtonOptions, TodaProblem, TodaState};

/// Uniform-weight problem on `n` nodes per axis and `λ` at fraction `s` of
/// the threshold box.
pub fn fixture(family: Family, rank: usize, n: usize, s: f64) -> (TodaProblem, Vec<f64>) {
    let algebra = LieFamily::new(family, rank).expect("valid algebra");
    let problem = TodaProblem::uniform(DomainGrid::new(n).expect("valid grid"), algebra).expect("problem");
    let lambda = uniqueness_thresholds(algebra).expect("thresholds").lambda_at(s);
    (problem, lambda)
}

/// Converged state for [`fixture`].
pub fn solved(family: Family, rank: usize, n: usize, s: f64) -> (TodaProblem, TodaState) {
    let (problem, lambda) = fixture(family, rank, n, s);
    let state = newton_solve(&problem, &lambda, None, &NewtonOptions::default()).expect("newton");
    (problem, state)
}
