use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::newton::NewtonOptions;
use super::problem::TodaProblem;
use super::state::TodaState;
use crate::error::{Result, TodaError};
use crate::grid::GridField;
use crate::linalg::{norm2, norm_inf};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeflationOptions {
    pub starts: usize,
    pub seed: u64,
    /// Coefficients of the random initial modes are uniform in `±amplitude`.
    pub amplitude: f64,
    /// Sine modes `sin(kπx)sin(lπy)`, `1 ≤ k, l ≤ modes`.
    pub modes: usize,
    /// Deflation operator `Πₖ(‖v − vₖ‖^{−power} + shift)`.
    pub power: f64,
    pub shift: f64,
    /// States closer than this in sup norm are considered the same.
    pub distinct_tol: f64,
    pub newton: NewtonOptions,
}

impl Default for DeflationOptions {
    fn default() -> Self {
        DeflationOptions {
            starts: 8,
            seed: 1,
            amplitude: 4.0,
            modes: 3,
            power: 2.0,
            shift: 1.0,
            distinct_tol: 1e-3,
            newton: NewtonOptions {
                max_iter: 100,
                ..NewtonOptions::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum StartOutcome {
    /// Converged to a state not seen before.
    New { index: usize },
    /// Converged to a known state or one found by an earlier start.
    Rediscovered { distance: f64 },
    Failed { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct DeflationReport {
    /// Newly found states, none within `distinct_tol` of a known one.
    pub found: Vec<TodaState>,
    pub outcomes: Vec<StartOutcome>,
}

/// Multistart deflated Newton at fixed `λ`.
///
/// Each start deflates the states in `known`. Starts run in parallel and
/// are merged in start order, so the result does not depend on scheduling.
pub fn deflated_search(
    problem: &TodaProblem,
    lambda: &[f64],
    known: &[TodaState],
    opts: &DeflationOptions,
) -> Result<DeflationReport> {
    problem.check_lambda(lambda)?;
    opts.newton.validate()?;
    if !(opts.amplitude >= 0.0 && opts.power > 0.0 && opts.shift >= 0.0 && opts.distinct_tol > 0.0)
        || opts.modes == 0
    {
        return Err(TodaError::Precondition(format!("invalid deflation options {opts:?}")));
    }
    let known_v: Vec<Vec<f64>> = known.iter().map(|s| state_to_v(problem, s)).collect();
    let runs: Vec<std::result::Result<TodaState, String>> = (0..opts.starts)
        .into_par_iter()
        .map(|k| {
            let start = random_start(problem, opts, k);
            deflated_newton(problem, lambda, start, &known_v, opts)
        })
        .collect();

    let mut found: Vec<TodaState> = Vec::new();
    let mut outcomes = Vec::with_capacity(runs.len());
    for run in runs {
        let outcome = match run {
            Err(reason) => StartOutcome::Failed { reason },
            Ok(state) => {
                let distance = known
                    .iter()
                    .chain(found.iter())
                    .map(|s| s.sup_distance(&state))
                    .fold(f64::INFINITY, f64::min);
                if distance > opts.distinct_tol {
                    found.push(state);
                    StartOutcome::New { index: found.len() - 1 }
                } else {
                    StartOutcome::Rediscovered { distance }
                }
            }
        };
        outcomes.push(outcome);
    }
    Ok(DeflationReport { found, outcomes })
}

fn state_to_v(problem: &TodaProblem, s: &TodaState) -> Vec<f64> {
    let u: Vec<Vec<f64>> = s.u.iter().map(|f| f.values.clone()).collect();
    problem.u_to_v(&u)
}

fn random_start(problem: &TodaProblem, opts: &DeflationOptions, k: usize) -> Vec<f64> {
    let grid = problem.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(k as u64);
    let mut v = Vec::with_capacity(problem.dim());
    for _ in 0..problem.rank() {
        let coeffs: Vec<f64> = (0..opts.modes * opts.modes)
            .map(|_| rng.gen_range(-1.0..=1.0) * opts.amplitude)
            .collect();
        let field = GridField::from_fn(grid, |x, y| {
            let mut s = 0.0;
            for a in 0..opts.modes {
                for b in 0..opts.modes {
                    let (ka, kb) = ((a + 1) as f64, (b + 1) as f64);
                    s += coeffs[a * opts.modes + b]
                        * (ka * std::f64::consts::PI * x).sin()
                        * (kb * std::f64::consts::PI * y).sin();
                }
            }
            s
        });
        v.extend(field.values);
    }
    v
}

/// Deflated Newton: the undeflated update `δ_F` is rescaled by
/// `1/(1 − ∇M·δ_F / M)` where `M` is the deflation operator.
fn deflated_newton(
    problem: &TodaProblem,
    lambda: &[f64],
    mut v: Vec<f64>,
    known: &[Vec<f64>],
    opts: &DeflationOptions,
) -> std::result::Result<TodaState, String> {
    let nopts = &opts.newton;
    let grid = problem.grid();
    let h2 = grid.h() * grid.h();
    let deflation = |v: &[f64]| -> (f64, Vec<(f64, Vec<f64>)>) {
        // M and, per known state, (mₖ, v − vₖ) for the gradient.
        let mut big_m = 1.0;
        let mut parts = Vec::with_capacity(known.len());
        for vk in known {
            let diff: Vec<f64> = v.iter().zip(vk).map(|(a, b)| a - b).collect();
            let dist = (h2 * diff.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let mk = dist.powf(-opts.power) + opts.shift;
            big_m *= mk;
            parts.push((dist, diff));
        }
        (big_m, parts)
    };
    let (mut f, mut lin) = problem.evaluate(&v, lambda).map_err(|e| e.to_string())?;
    let mut merit = deflation(&v).0 * norm2(&f);
    let mut res = problem.u_residual_norm(&f);
    let mut last_step = f64::INFINITY;
    for iteration in 0..=nopts.max_iter {
        if !res.is_finite() {
            return Err("non-finite residual".into());
        }
        if res <= nopts.residual_tol && last_step <= nopts.step_tol {
            let u = problem.v_to_u(&v);
            return Ok(TodaState {
                u: u.into_iter().map(GridField::dirichlet).collect(),
                lambda: lambda.to_vec(),
                weights: problem.weights().clone(),
                masses: lin.masses().to_vec(),
                residual_norm: res,
                iterations: iteration,
            });
        }
        if iteration == nopts.max_iter {
            break;
        }
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let delta_f = lin.solve(&rhs, nopts.gmres()).map_err(|e| e.to_string())?;
        let (_, parts) = deflation(&v);
        // ∇M·δ / M = Σₖ (∇mₖ·δ)/mₖ, ∇mₖ = −p·dist^{−p−2}·h²(v − vₖ).
        let mut ratio = 0.0;
        for (dist, diff) in &parts {
            let mk = dist.powf(-opts.power) + opts.shift;
            let dot: f64 = h2 * diff.iter().zip(&delta_f).map(|(a, b)| a * b).sum::<f64>();
            ratio += -opts.power * dist.powf(-opts.power - 2.0) * dot / mk;
        }
        let denom = 1.0 - ratio;
        let tau = if denom.abs() > 1e-12 { 1.0 / denom } else { 1.0 };
        let delta: Vec<f64> = delta_f.iter().map(|x| tau * x).collect();
        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = v.iter().zip(&delta).map(|(a, b)| a + t * b).collect();
            if let Ok((ft, lt)) = problem.evaluate(&trial, lambda) {
                let (mt, _) = deflation(&trial);
                let gt = mt * norm2(&ft);
                if gt.is_finite() && gt <= (1.0 - 1e-4 * t) * merit {
                    break Some((trial, ft, lt, gt));
                }
            }
            t *= 0.5;
            if t < nopts.min_damping {
                break None;
            }
        };
        let Some((trial, ft, lt, gt)) = accepted else {
            return Err(format!("line search failed at residual {res:e}"));
        };
        last_step = t * norm_inf(&delta);
        v = trial;
        f = ft;
        lin = lt;
        merit = gt;
        res = problem.u_residual_norm(&f);
    }
    Err(format!("iteration limit reached at residual {res:e}"))
}
