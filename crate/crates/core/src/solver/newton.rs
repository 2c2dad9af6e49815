use serde::{Deserialize, Serialize};

use super::problem::TodaProblem;
use super::state::TodaState;
use crate::error::{Result, TodaError};
use crate::grid::GridField;
use crate::linalg::{norm2, norm_inf, GmresOptions};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonOptions {
    /// Sup norm of the residual in the original variables.
    pub residual_tol: f64,
    /// Sup norm of the last accepted update.
    pub step_tol: f64,
    pub max_iter: usize,
    /// Smallest Armijo damping factor tried before giving up.
    pub min_damping: f64,
    pub gmres_rel_tol: f64,
    pub gmres_restart: usize,
    pub gmres_max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            residual_tol: 1e-9,
            step_tol: 1e-8,
            max_iter: 50,
            min_damping: 1.0 / 1024.0,
            gmres_rel_tol: 1e-12,
            gmres_restart: 60,
            gmres_max_iter: 600,
        }
    }
}

impl NewtonOptions {
    pub(crate) fn gmres(&self) -> GmresOptions {
        GmresOptions {
            restart: self.gmres_restart,
            max_iter: self.gmres_max_iter,
            rel_tol: self.gmres_rel_tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.residual_tol, self.step_tol, self.min_damping, self.gmres_rel_tol];
        if positive.iter().any(|x| !(*x > 0.0 && x.is_finite()))
            || self.min_damping > 1.0
            || self.max_iter == 0
            || self.gmres_restart == 0
            || self.gmres_max_iter == 0
        {
            return Err(TodaError::Precondition(format!("invalid Newton options {self:?}")));
        }
        Ok(())
    }
}

/// Damped Newton from the initial fields `init` (in `u` variables).
///
/// `init = None` starts from `u ≡ 0`.
pub fn newton_solve(
    problem: &TodaProblem,
    lambda: &[f64],
    init: Option<&[GridField]>,
    opts: &NewtonOptions,
) -> Result<TodaState> {
    let v0 = match init {
        None => vec![0.0; problem.dim()],
        Some(fields) => {
            if fields.len() != problem.rank()
                || fields.iter().any(|f| f.len() != problem.grid().len())
            {
                return Err(TodaError::Dimension(
                    "initial guess does not match the problem".into(),
                ));
            }
            let u: Vec<Vec<f64>> = fields.iter().map(|f| f.values.clone()).collect();
            problem.u_to_v(&u)
        }
    };
    newton_solve_from_v(problem, lambda, v0, opts)
}

/// Damped Newton in the symmetrised variables `v = u/d`.
pub fn newton_solve_from_v(
    problem: &TodaProblem,
    lambda: &[f64],
    mut v: Vec<f64>,
    opts: &NewtonOptions,
) -> Result<TodaState> {
    problem.check_lambda(lambda)?;
    opts.validate()?;
    if v.len() != problem.dim() {
        return Err(TodaError::Dimension(format!(
            "initial guess has {} values, expected {}",
            v.len(),
            problem.dim()
        )));
    }
    if lambda.iter().all(|l| *l == 0.0) {
        // −Δₕu = 0 with zero boundary data has only the zero solution.
        let mut state = TodaState::trivial(problem)?;
        state.iterations = usize::from(v.iter().any(|x| *x != 0.0));
        return Ok(state);
    }

    let (mut f, mut lin) = problem.evaluate(&v, lambda)?;
    let mut merit = norm2(&f);
    let mut res = problem.u_residual_norm(&f);
    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    let fail = |iterations, residual, reason: String, v: &[f64], lin: &super::Linearization| {
        TodaError::NewtonFailed {
            iterations,
            residual,
            reason,
            last: Some(Box::new(make_state(problem, lambda, v, lin, residual, iterations))),
        }
    };
    loop {
        if !res.is_finite() {
            return Err(fail(iterations, res, "non-finite residual".into(), &v, &lin));
        }
        if res <= opts.residual_tol && (iterations == 0 || last_step <= opts.step_tol) {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(fail(iterations, res, "iteration limit reached".into(), &v, &lin));
        }
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let delta = match lin.solve(&rhs, opts.gmres()) {
            Ok(d) => d,
            Err(e) => return Err(fail(iterations, res, e.to_string(), &v, &lin)),
        };
        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(a, b)| a + t * b).collect();
            if let Ok((ft, lt)) = problem.evaluate(&trial, lambda) {
                let mt = norm2(&ft);
                if mt.is_finite() && mt <= (1.0 - 1e-4 * t) * merit {
                    break Some((trial, ft, lt, mt));
                }
            }
            t *= 0.5;
            if t < opts.min_damping {
                break None;
            }
        };
        iterations += 1;
        let Some((trial, ft, lt, mt)) = accepted else {
            // At round-off level the merit cannot decrease any further.
            if res <= opts.residual_tol {
                break;
            }
            return Err(fail(iterations, res, "line search failed".into(), &v, &lin));
        };
        last_step = t * norm_inf(&delta);
        v = trial;
        f = ft;
        lin = lt;
        merit = mt;
        res = problem.u_residual_norm(&f);
    }
    Ok(make_state(problem, lambda, &v, &lin, res, iterations))
}

fn make_state(
    problem: &TodaProblem,
    lambda: &[f64],
    v: &[f64],
    lin: &super::Linearization,
    residual: f64,
    iterations: usize,
) -> TodaState {
    TodaState {
        u: problem.v_to_u(v).into_iter().map(GridField::dirichlet).collect(),
        lambda: lambda.to_vec(),
        weights: problem.weights().clone(),
        masses: lin.masses().to_vec(),
        residual_norm: residual,
        iterations,
    }
}
