use super::problem::TodaProblem;
use super::state::TodaState;
use crate::error::{Result, TodaError};

/// `J(v) = ½ Σᵢⱼ (Aˢ)⁻¹ᵢⱼ ∫∇vᵢ·∇vⱼ − Σᵢ (λᵢ/dᵢ) log ∫hᵢe^{dᵢvᵢ}`, with
/// `v = u/d`. Critical points of `J` are exactly the solutions.
pub fn energy_of_v(problem: &TodaProblem, v: &[f64], lambda: &[f64]) -> Result<f64> {
    problem.check_lambda(lambda)?;
    if v.len() != problem.dim() {
        return Err(TodaError::Dimension("field size does not match the problem".into()));
    }
    let grid = problem.grid();
    let m = grid.len();
    let n = problem.rank();
    let inv = problem.a_s_inv();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            let c = inv[(i, j)];
            if c != 0.0 {
                quad += c * grid.dirichlet_form(&v[i * m..(i + 1) * m], &v[j * m..(j + 1) * m]);
            }
        }
    }
    let u = problem.v_to_u(v);
    let mut logs = 0.0;
    for i in 0..n {
        if lambda[i] == 0.0 {
            continue;
        }
        let (_, mass) = problem.density(i, &u[i])?;
        logs += lambda[i] / problem.d()[i] * mass.ln();
    }
    Ok(0.5 * quad - logs)
}

/// `J` at a state.
pub fn energy(problem: &TodaProblem, state: &TodaState) -> Result<f64> {
    let u: Vec<Vec<f64>> = state.u.iter().map(|f| f.values.clone()).collect();
    energy_of_v(problem, &problem.u_to_v(&u), &state.lambda)
}

/// `dJ(v)[w] = Σᵢⱼ (Aˢ)⁻¹ᵢⱼ ∫∇wᵢ·∇vⱼ − Σᵢ λᵢ ∫gᵢwᵢ`.
pub fn energy_directional_derivative(
    problem: &TodaProblem,
    v: &[f64],
    w: &[f64],
    lambda: &[f64],
) -> Result<f64> {
    problem.check_lambda(lambda)?;
    if v.len() != problem.dim() || w.len() != problem.dim() {
        return Err(TodaError::Dimension("field size does not match the problem".into()));
    }
    let grid = problem.grid();
    let m = grid.len();
    let n = problem.rank();
    let inv = problem.a_s_inv();
    let u = problem.v_to_u(v);
    let mut out = 0.0;
    for i in 0..n {
        let wi = &w[i * m..(i + 1) * m];
        for j in 0..n {
            let c = inv[(i, j)];
            if c != 0.0 {
                out += c * grid.dirichlet_form(wi, &v[j * m..(j + 1) * m]);
            }
        }
        if lambda[i] != 0.0 {
            let (g, _) = problem.density(i, &u[i])?;
            out -= lambda[i] * grid.inner(&g, wi);
        }
    }
    Ok(out)
}
