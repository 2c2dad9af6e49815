use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupled::{coupled_form_min, coupled_form_min_boundary, CoupledEigen};
use super::density::assemble_densities;
use super::lemma::{lemma_certificate, subsolution_check, LemmaReport, SubsolutionCheck};
use super::ops::EigenMethod;
use super::scalar::{scalar_eigen_constrained, scalar_eigen_dirichlet, ScalarEigen};
use super::Verdict;
use crate::error::{Result, TodaError};
use crate::lie::{spectral_radius, LieFamily, SpectrumMethod};
use crate::solver::{TodaProblem, TodaState};

/// Side conditions of the constrained problems must hold to this.
pub const CONSTRAINT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertificateOptions {
    pub method: EigenMethod,
    /// Also report the coupled minimum without the `∫Vᵢφᵢ = 0` constraints.
    pub unconstrained_diagnostic: bool,
    /// Also report the coupled minimum with free boundary constants.
    pub boundary_diagnostic: bool,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions {
            method: EigenMethod::Auto,
            unconstrained_diagnostic: true,
            boundary_diagnostic: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub component: Option<usize>,
    pub value: Option<f64>,
    pub verdict: Verdict,
}

/// Everything the certificate computed. `None` entries belong to forms that
/// are vacuous because the relevant `Vᵢ ≡ 0`; they count as positive.
#[derive(Clone, Debug, Serialize)]
pub struct EigenReport {
    pub algebra: LieFamily,
    pub lambda: Vec<f64>,
    pub lambda_s: Vec<f64>,
    /// `ρ(Aˢ)`.
    pub rho: f64,
    /// `ρλᵢˢ`; the theorem's box is `ρλᵢˢ ≤ 8π` for all `i`.
    pub box_values: Vec<f64>,
    pub within_box: bool,
    /// Coupled minimum on zero-boundary blocks with `∫Vᵢˢφᵢ = 0`.
    pub coupled_min: Option<f64>,
    pub coupled: Option<CoupledEigen>,
    /// Coupled minimum on zero-boundary blocks without constraints.
    pub coupled_min_unconstrained: Option<f64>,
    pub coupled_min_boundary: Option<f64>,
    /// `minᵢ μ̂₁⁽ⁱ⁾/ρ`, a lower bound for both coupled minima.
    pub coupled_lower_bound: Option<f64>,
    pub mu1: Vec<Option<f64>>,
    pub mu2: Vec<Option<f64>>,
    pub nu1: Vec<Option<f64>>,
    pub nu2: Vec<Option<f64>>,
    pub mu1_eigen: Vec<Option<ScalarEigen>>,
    pub mu2_eigen: Vec<Option<ScalarEigen>>,
    pub lemma: Vec<Option<LemmaReport>>,
    pub subsolution: SubsolutionCheck,
    pub margins_max: f64,
    pub checks: Vec<Check>,
    /// Names of the checks that blocked the certificate.
    pub failing: Vec<String>,
    pub pass: bool,
}

type Component = (
    Option<ScalarEigen>,
    Option<ScalarEigen>,
    std::result::Result<Option<LemmaReport>, String>,
);

/// Runs every check on a converged state.
///
/// The certificate passes when the constrained coupled minimum and every
/// `μ̂₂⁽ⁱ⁾` are positive, `μ̂₁⁽ⁱ⁾` is positive for every component with
/// `ρλᵢˢ ≤ 4π`, the lemma eigenvalues are positive wherever their
/// hypotheses hold, and `uᵢ` are discrete subsolutions.
pub fn nondegeneracy_certificate(
    problem: &TodaProblem,
    state: &TodaState,
    opts: &CertificateOptions,
) -> Result<EigenReport> {
    let decomp = problem.decomposition();
    let algebra = decomp.algebra();
    let method = if algebra.family() == crate::lie::Family::A {
        SpectrumMethod::ClosedForm
    } else {
        SpectrumMethod::DenseEig
    };
    let rho = spectral_radius(decomp, method)?.rho;
    let grid = problem.grid();
    let n = problem.rank();
    let d = problem.d();
    let densities = assemble_densities(problem, state)?;
    let vs: Vec<Vec<f64>> = densities.iter().enumerate().map(|(i, f)| f.scaled(d[i])).collect();
    let lambda_s: Vec<f64> = state.lambda.iter().zip(d).map(|(l, d)| l * d).collect();
    let box_values: Vec<f64> = lambda_s.iter().map(|l| rho * l).collect();
    let within_box = box_values.iter().all(|b| *b <= 8.0 * PI);

    let subsolution = subsolution_check(problem, state, &densities, rho)?;

    let components: Vec<Component> = (0..n)
        .into_par_iter()
        .map(|i| -> Result<Component> {
            if !densities[i].is_active() {
                return Ok((None, None, Ok(None)));
            }
            let mu1 = scalar_eigen_dirichlet(grid, &vs[i], rho, opts.method)?;
            let mu2 = scalar_eigen_constrained(grid, &vs[i], rho, opts.method)?;
            let k: Vec<f64> = vs[i]
                .iter()
                .zip(&state.u[i].values)
                .map(|(v, u)| rho * v * (-u).exp())
                .collect();
            let lemma = match lemma_certificate(grid, &k, &state.u[i], opts.method) {
                Ok(r) => Ok(Some(r)),
                Err(TodaError::NotSubsolution(m)) => Err(format!("not a subsolution, margin {m:e}")),
                Err(e) => return Err(e),
            };
            Ok((Some(mu1), Some(mu2), lemma))
        })
        .collect::<Result<_>>()?;

    let a_s = problem.a_s();
    let coupled = coupled_form_min(grid, &vs, a_s, true, opts.method)?;
    let coupled_min_unconstrained = if opts.unconstrained_diagnostic {
        coupled_form_min(grid, &vs, a_s, false, opts.method)?.map(|c| c.min)
    } else {
        None
    };
    let coupled_min_boundary = if opts.boundary_diagnostic {
        coupled_form_min_boundary(grid, &vs, a_s, opts.method)?.map(|c| c.min)
    } else {
        None
    };

    let mut checks = Vec::new();
    let mut push = |name: &str, component: Option<usize>, value: Option<f64>, verdict| {
        checks.push(Check {
            name: name.to_string(),
            component,
            value,
            verdict,
        })
    };
    push(
        "subsolution",
        None,
        Some(subsolution.max_margin.max(subsolution.row_max_margin)),
        subsolution.verdict,
    );
    push(
        "mass_identity",
        None,
        Some(subsolution.mass_identity_error),
        if subsolution.mass_identity_error <= 1e-10 { Verdict::Pass } else { Verdict::Fail },
    );
    let coupled_min = coupled.as_ref().map(|c| c.min);
    push("coupled_min", None, coupled_min, Verdict::positivity_opt(coupled_min));
    if let Some(c) = &coupled {
        push(
            "coupled_constraint",
            None,
            Some(c.constraint_residual),
            if c.constraint_residual <= CONSTRAINT_TOL { Verdict::Pass } else { Verdict::Fail },
        );
        push(
            "coupled_chain",
            None,
            Some(c.chain_gap),
            if c.chain_gap >= -1e-9 { Verdict::Pass } else { Verdict::Fail },
        );
    }
    for (i, (mu1, mu2, lemma)) in components.iter().enumerate() {
        let step1 = box_values[i] <= 4.0 * PI;
        let v1 = mu1.as_ref().map(|e| e.mu);
        let v2 = mu2.as_ref().map(|e| e.mu);
        let mu1_verdict = if step1 { Verdict::positivity_opt(v1) } else { Verdict::NotRequired };
        push("mu1", Some(i), v1, mu1_verdict);
        push("mu2", Some(i), v2, Verdict::positivity_opt(v2));
        if let Some(e) = mu2 {
            push(
                "mu2_constraint",
                Some(i),
                Some(e.constraint_residual),
                if e.constraint_residual <= CONSTRAINT_TOL { Verdict::Pass } else { Verdict::Fail },
            );
        }
        match lemma {
            Ok(Some(l)) => {
                push("nu1", Some(i), Some(l.nu1), l.nu1_verdict);
                push("nu2", Some(i), Some(l.nu2), l.nu2_verdict);
            }
            Ok(None) => {}
            Err(_) => push("lemma_subsolution", Some(i), None, Verdict::Fail),
        }
    }
    let failing: Vec<String> = checks
        .iter()
        .filter(|c| c.verdict.is_blocking())
        .map(|c| match c.component {
            Some(i) => format!("{}[{i}]", c.name),
            None => c.name.clone(),
        })
        .collect();

    let mu1: Vec<Option<f64>> = components.iter().map(|c| c.0.as_ref().map(|e| e.mu)).collect();
    let coupled_lower_bound = mu1
        .iter()
        .flatten()
        .fold(None, |m: Option<f64>, x| Some(m.map_or(*x, |m| m.min(*x))))
        .map(|m| m / rho);
    let mut mu1_eigen = Vec::with_capacity(n);
    let mut mu2_eigen = Vec::with_capacity(n);
    let mut lemma = Vec::with_capacity(n);
    for (a, b, l) in components {
        mu1_eigen.push(a);
        mu2_eigen.push(b);
        lemma.push(l.ok().flatten());
    }
    let margins_max = subsolution.max_margin;
    Ok(EigenReport {
        algebra,
        lambda: state.lambda.clone(),
        lambda_s,
        rho,
        box_values,
        within_box,
        coupled_min,
        coupled,
        coupled_min_unconstrained,
        coupled_min_boundary,
        coupled_lower_bound,
        mu1,
        mu2: mu2_eigen.iter().map(|e| e.as_ref().map(|e| e.mu)).collect(),
        nu1: lemma.iter().map(|l| l.as_ref().map(|l| l.nu1)).collect(),
        nu2: lemma.iter().map(|l| l.as_ref().map(|l| l.nu2)).collect(),
        mu1_eigen,
        mu2_eigen,
        lemma,
        subsolution,
        margins_max,
        pass: failing.is_empty(),
        failing,
        checks,
    })
}
