use serde::{Deserialize, Serialize};

use super::newton::{newton_solve_from_v, NewtonOptions};
use super::problem::TodaProblem;
use super::state::TodaState;
use crate::error::{Result, TodaError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationOptions {
    /// Nominal number of uniform steps in `t ∈ [0, 1]`.
    pub steps: usize,
    /// The branch is abandoned once a halved step falls below this.
    pub min_step: f64,
    pub newton: NewtonOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            steps: 10,
            min_step: 1e-4,
            newton: NewtonOptions::default(),
        }
    }
}

/// One accepted point `λ = t·λ_target` of the branch.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuationPoint {
    pub t: f64,
    pub state: TodaState,
    pub newton_iterations: usize,
    /// Every point is flagged for a non-degeneracy certificate.
    pub certify: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuationBranch {
    pub target: Vec<f64>,
    /// Accepted points, strictly increasing in `t`, starting at `t = 0`.
    pub points: Vec<ContinuationPoint>,
    /// `true` iff the branch reached `t = 1`.
    pub complete: bool,
    pub failure: Option<String>,
}

impl ContinuationBranch {
    pub fn last(&self) -> &ContinuationPoint {
        self.points.last().expect("a branch always holds the trivial point")
    }
}

/// Natural continuation from the trivial solution along `λ = t·target`,
/// with a secant predictor and step halving on Newton failure.
///
/// Running out of step size is not an error: the branch is returned with
/// `complete = false` and the reason in `failure`.
pub fn continuation(
    problem: &TodaProblem,
    target: &[f64],
    opts: &ContinuationOptions,
) -> Result<ContinuationBranch> {
    problem.check_lambda(target)?;
    opts.newton.validate()?;
    if opts.steps == 0 || !(opts.min_step > 0.0 && opts.min_step <= 1.0) {
        return Err(TodaError::Precondition(format!(
            "invalid continuation options: steps {}, min_step {}",
            opts.steps, opts.min_step
        )));
    }
    let trivial = TodaState::trivial(problem)?;
    let mut points = vec![ContinuationPoint {
        t: 0.0,
        state: trivial,
        newton_iterations: 0,
        certify: true,
    }];
    if target.iter().all(|l| *l == 0.0) {
        return Ok(ContinuationBranch {
            target: target.to_vec(),
            points,
            complete: true,
            failure: None,
        });
    }
    let base = 1.0 / opts.steps as f64;
    let mut dt = base;
    let mut vs: Vec<Vec<f64>> = vec![vec![0.0; problem.dim()]];
    let mut t = 0.0;
    let mut failure = None;
    while t < 1.0 {
        let t_next = if t + dt >= 1.0 - 1e-12 { 1.0 } else { t + dt };
        let predictor = if points.len() >= 2 {
            let k = points.len() - 1;
            let s = (t_next - points[k].t) / (points[k].t - points[k - 1].t);
            vs[k]
                .iter()
                .zip(&vs[k - 1])
                .map(|(a, b)| a + s * (a - b))
                .collect()
        } else {
            vs[0].clone()
        };
        let lambda: Vec<f64> = target.iter().map(|l| l * t_next).collect();
        match newton_solve_from_v(problem, &lambda, predictor, &opts.newton) {
            Ok(state) => {
                let u: Vec<Vec<f64>> = state.u.iter().map(|f| f.values.clone()).collect();
                vs.push(problem.u_to_v(&u));
                t = t_next;
                points.push(ContinuationPoint {
                    t,
                    newton_iterations: state.iterations,
                    state,
                    certify: true,
                });
                dt = (2.0 * dt).min(base);
            }
            Err(TodaError::NewtonFailed { residual, reason, .. }) => {
                dt *= 0.5;
                if dt < opts.min_step {
                    failure = Some(format!(
                        "step fell below {} at t = {t}: {reason} (residual {residual:e})",
                        opts.min_step
                    ));
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ContinuationBranch {
        target: target.to_vec(),
        complete: failure.is_none(),
        points,
        failure,
    })
}
