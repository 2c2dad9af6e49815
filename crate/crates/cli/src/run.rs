//! Pipelines behind the subcommands.
//!
//! Everything that can be rejected up front (config, algebra, weights) is
//! checked before the output directory is touched. After that, stage
//! failures are recorded in the manifest and mapped to the exit code
//! instead of aborting the run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use toda_core::grid::{read_field, write_field, CacheHeader};
use toda_core::lie::{build_cartan, uniqueness_thresholds, ThresholdReport};
use toda_core::solver::{
    continuation, deflated_search, energy, newton_solve, ContinuationBranch, StartOutcome,
};
use toda_core::spectra::nondegeneracy_certificate;
use toda_core::{
    DomainGrid, EigenReport, Family, GridField, LieFamily, TodaError, TodaProblem, TodaState,
};

use crate::config::{ExperimentConfig, Mode};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_f64, fmt_opt, Table};
use crate::manifest::{OutputSet, RunManifest, RunStatus, ARTIFACT, ARTIFACT_VERSION};

pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CERTIFICATE: i32 = 4;

pub const FINAL_STATE: &str = "fields/final_state.json";

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Recorded in the manifest.
    pub command: String,
    pub timings: bool,
    /// Takes precedence over the config and the environment.
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub dir: PathBuf,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.manifest.exit_code
    }
}

/// Summary of the last state of a run, enough to reload it from the dumps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalState {
    pub t: f64,
    pub lambda: Vec<f64>,
    pub residual_norm: f64,
    pub masses: Vec<f64>,
    pub iterations: usize,
}

struct Ctx {
    out: OutputSet,
    failures: Vec<String>,
    warnings: Vec<String>,
    exit: i32,
    timings: BTreeMap<String, f64>,
    dump_fields: bool,
}

impl Ctx {
    fn fail(&mut self, code: i32, msg: String) {
        if self.exit == 0 {
            self.exit = code;
        }
        self.failures.push(msg);
    }

    fn fail_with(&mut self, stage: &str, e: TodaError) {
        let msg = format!("{stage}: {e}");
        self.fail(CliError::from(e).exit_code(), msg);
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let r = f();
        *self.timings.entry(stage.to_string()).or_default() += start.elapsed().as_secs_f64();
        r
    }

    fn finish(self, cfg: ExperimentConfig, opts: &RunOptions) -> CliResult<RunOutcome> {
        let dir = self.out.dir().to_path_buf();
        let manifest = RunManifest {
            artifact: ARTIFACT.into(),
            version: ARTIFACT_VERSION.into(),
            command: opts.command.clone(),
            config: cfg,
            status: if self.failures.is_empty() { RunStatus::Complete } else { RunStatus::Partial },
            exit_code: self.exit,
            failures: self.failures,
            warnings: self.warnings,
            files: Vec::new(),
            timings: opts.timings.then_some(self.timings),
        };
        let manifest = self.out.finish(manifest)?;
        Ok(RunOutcome { manifest, dir })
    }
}

pub fn build_problem(cfg: &ExperimentConfig) -> CliResult<TodaProblem> {
    let algebra = cfg.algebra()?;
    let grid = DomainGrid::new(cfg.n)?;
    let weights = cfg
        .weight_specs()?
        .iter()
        .map(|w| w.assemble(&grid))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(TodaProblem::new(grid, build_cartan(algebra)?, weights)?)
}

fn s_warnings(cfg: &ExperimentConfig) -> Vec<String> {
    let mut s: Vec<f64> = cfg.lambda.threshold.into_iter().collect();
    if cfg.mode == Mode::Sweep {
        s.extend(cfg.sweep.iter().flat_map(|sw| sw.s.iter().copied()));
    }
    s.into_iter()
        .filter(|s| *s > 1.0)
        .map(|s| format!("s = {s} lies outside the uniqueness box; results are exploratory"))
        .collect()
}

/// Runs `cfg` and writes its outputs. `Err` means nothing was computed.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> CliResult<RunOutcome> {
    cfg.validate()?;
    let problem = match cfg.mode {
        Mode::Thresholds => None,
        _ => Some(build_problem(cfg)?),
    };
    let lambda = match cfg.mode {
        Mode::Thresholds | Mode::Sweep => None,
        _ => Some(cfg.lambda_for(None)?),
    };
    let mut ctx = Ctx {
        out: OutputSet::new(opts.output.clone().unwrap_or_else(|| cfg.output_dir()))?,
        failures: Vec::new(),
        warnings: s_warnings(cfg),
        exit: 0,
        timings: BTreeMap::new(),
        dump_fields: cfg.dump_fields,
    };
    match (cfg.mode, problem, lambda) {
        (Mode::Thresholds, _, _) => run_thresholds(cfg, &mut ctx)?,
        (Mode::Sweep, Some(p), _) => run_sweep(cfg, &p, &mut ctx)?,
        (Mode::Solve, Some(p), Some(l)) => run_solve(cfg, &p, &l, &mut ctx)?,
        (Mode::Continuation, Some(p), Some(l)) => {
            run_branch(cfg, &p, &l, false, &mut ctx)?;
        }
        (Mode::Certify, Some(p), Some(l)) => {
            run_branch(cfg, &p, &l, true, &mut ctx)?;
        }
        (Mode::Deflate, Some(p), Some(l)) => run_deflate(cfg, &p, &l, &mut ctx)?,
        _ => unreachable!("problem and lambda are built for every solving mode"),
    }
    ctx.finish(cfg.clone(), opts)
}

fn threshold_table(reports: &[ThresholdReport]) -> Table {
    let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(";");
    let mut t = Table::new(["family", "rank", "rho", "lambda_s_max", "safe_bound", "d", "lambda_max"]);
    for r in reports {
        t.push(vec![
            r.algebra.family().to_string(),
            r.algebra.rank().to_string(),
            fmt_f64(r.rho),
            fmt_f64(r.lambda_s_max),
            fmt_f64(r.safe_bound),
            join(&r.d),
            join(&r.lambda_max),
        ]);
    }
    t
}

pub fn threshold_reports(families: &[Family], max_rank: usize) -> CliResult<Vec<ThresholdReport>> {
    let mut out = Vec::new();
    for f in families {
        for algebra in LieFamily::enumerate(*f, max_rank) {
            out.push(uniqueness_thresholds(algebra)?);
        }
    }
    Ok(out)
}

fn run_thresholds(cfg: &ExperimentConfig, ctx: &mut Ctx) -> CliResult<()> {
    let spec = cfg.thresholds.as_ref().expect("validated");
    let families = spec.families.clone().unwrap_or_else(|| Family::ALL.to_vec());
    let reports = ctx.time("thresholds", || threshold_reports(&families, spec.max_rank))?;
    ctx.out.write("thresholds.csv", &threshold_table(&reports).to_csv()?)?;
    ctx.out.write_json("thresholds.json", &reports)?;
    Ok(())
}

struct PointRef<'a> {
    t: f64,
    state: &'a TodaState,
    iterations: usize,
}

fn states_table(
    problem: &TodaProblem,
    points: &[PointRef],
    certs: &[Option<Result<EigenReport, String>>],
) -> Table {
    let r = problem.rank();
    let mut header = vec!["index".to_string(), "t".into()];
    header.extend((1..=r).map(|i| format!("lambda_{i}")));
    header.extend(["residual".into(), "iterations".into()]);
    header.extend((1..=r).map(|i| format!("mass_{i}")));
    header.extend(["energy".into(), "certificate".into(), "coupled_min".into()]);
    let mut t = Table::new(header);
    for (k, p) in points.iter().enumerate() {
        let mut row = vec![k.to_string(), fmt_f64(p.t)];
        row.extend(p.state.lambda.iter().map(|x| fmt_f64(*x)));
        row.push(fmt_f64(p.state.residual_norm));
        row.push(p.iterations.to_string());
        row.extend(p.state.masses.iter().map(|x| fmt_f64(*x)));
        row.push(energy(problem, p.state).map(fmt_f64).unwrap_or_default());
        let (summary, cmin) = match certs.get(k) {
            Some(Some(Ok(rep))) => (if rep.pass { "pass" } else { "fail" }.to_string(), fmt_opt(rep.coupled_min)),
            Some(Some(Err(_))) => ("error".into(), String::new()),
            _ => ("-".into(), String::new()),
        };
        row.push(summary);
        row.push(cmin);
        t.push(row);
    }
    t
}

fn eigen_table(rank: usize, rows: &[(usize, f64, &EigenReport)]) -> Table {
    let mut header = vec![
        "index".to_string(),
        "t".into(),
        "coupled_min".into(),
        "coupled_min_unconstrained".into(),
        "coupled_lower_bound".into(),
    ];
    for name in ["mu1", "mu2", "nu1", "nu2"] {
        header.extend((1..=rank).map(|i| format!("{name}_{i}")));
    }
    header.extend(["margins_max".into(), "within_box".into(), "pass".into()]);
    let mut t = Table::new(header);
    for (k, tv, rep) in rows {
        let mut row = vec![
            k.to_string(),
            fmt_f64(*tv),
            fmt_opt(rep.coupled_min),
            fmt_opt(rep.coupled_min_unconstrained),
            fmt_opt(rep.coupled_lower_bound),
        ];
        for v in [&rep.mu1, &rep.mu2, &rep.nu1, &rep.nu2] {
            row.extend(v.iter().map(|x| fmt_opt(*x)));
        }
        row.push(fmt_f64(rep.margins_max));
        row.push(rep.within_box.to_string());
        row.push(rep.pass.to_string());
        t.push(row);
    }
    t
}

fn field_bytes(grid: &DomainGrid, name: &str, field: &GridField) -> CliResult<Vec<u8>> {
    let header = CacheHeader {
        n: grid.n(),
        p: None,
        alpha: None,
        name: Some(name.to_string()),
        boundary_constant: field.boundary_constant,
    };
    let mut buf = Vec::new();
    write_field(&mut buf, &header, &field.values)?;
    Ok(buf)
}

/// `x y value` triplets, one blank line between grid rows (gnuplot `splot`).
pub fn xyz_bytes(grid: &DomainGrid, values: &[f64]) -> Vec<u8> {
    let n = grid.n();
    let mut s = String::new();
    for j in 0..n {
        for i in 0..n {
            let k = grid.index(i, j);
            let (x, y) = grid.coords(k);
            s.push_str(&format!("{} {} {}\n", fmt_f64(x), fmt_f64(y), fmt_f64(values[k])));
        }
        s.push('\n');
    }
    s.into_bytes()
}

fn dump_state(ctx: &mut Ctx, problem: &TodaProblem, prefix: &str, state: &TodaState) -> CliResult<()> {
    if !ctx.dump_fields {
        return Ok(());
    }
    let grid = problem.grid();
    for (i, u) in state.u.iter().enumerate() {
        let name = format!("{prefix}u_{}", i + 1);
        ctx.out.write(&format!("fields/{name}.bin"), &field_bytes(grid, &name, u)?)?;
        ctx.out.write(&format!("fields/{name}.xyz"), &xyz_bytes(grid, &u.values))?;
    }
    Ok(())
}

fn dump_final(ctx: &mut Ctx, problem: &TodaProblem, p: &PointRef) -> CliResult<()> {
    if !ctx.dump_fields {
        return Ok(());
    }
    let grid = problem.grid();
    for (i, w) in problem.weights().iter().enumerate() {
        let name = format!("h_{}", i + 1);
        ctx.out.write(&format!("fields/{name}.bin"), &field_bytes(grid, &name, &w.h_values)?)?;
        ctx.out.write(&format!("fields/{name}.xyz"), &xyz_bytes(grid, &w.h_values.values))?;
    }
    dump_state(ctx, problem, "", p.state)?;
    let fin = FinalState {
        t: p.t,
        lambda: p.state.lambda.clone(),
        residual_norm: p.state.residual_norm,
        masses: p.state.masses.clone(),
        iterations: p.iterations,
    };
    ctx.out.write_json(FINAL_STATE, &fin)
}

fn run_solve(cfg: &ExperimentConfig, problem: &TodaProblem, lambda: &[f64], ctx: &mut Ctx) -> CliResult<()> {
    match ctx.time("newton", || newton_solve(problem, lambda, None, &cfg.continuation.newton)) {
        Ok(state) => {
            let p = PointRef { t: 1.0, iterations: state.iterations, state: &state };
            ctx.out.write("states.csv", &states_table(problem, std::slice::from_ref(&p), &[]).to_csv()?)?;
            dump_final(ctx, problem, &p)?;
        }
        Err(e) => ctx.fail_with("newton", e),
    }
    Ok(())
}

/// Certificates for every point of the branch flagged for certification.
fn certify_points(
    cfg: &ExperimentConfig,
    problem: &TodaProblem,
    branch: &ContinuationBranch,
) -> Vec<Option<Result<EigenReport, String>>> {
    branch
        .points
        .iter()
        .map(|p| {
            p.certify.then(|| {
                nondegeneracy_certificate(problem, &p.state, &cfg.certificate).map_err(|e| e.to_string())
            })
        })
        .collect()
}

fn run_branch(
    cfg: &ExperimentConfig,
    problem: &TodaProblem,
    lambda: &[f64],
    certify: bool,
    ctx: &mut Ctx,
) -> CliResult<Option<ContinuationBranch>> {
    let branch = match ctx.time("continuation", || continuation(problem, lambda, &cfg.continuation)) {
        Ok(b) => b,
        Err(e) => {
            ctx.fail_with("continuation", e);
            return Ok(None);
        }
    };
    if !branch.complete {
        let reason = branch.failure.clone().unwrap_or_default();
        ctx.fail(EXIT_SOLVER, format!("continuation stopped at t = {}: {reason}", branch.last().t));
    }
    let certs = if certify {
        ctx.time("certificate", || certify_points(cfg, problem, &branch))
    } else {
        Vec::new()
    };
    let points: Vec<PointRef> = branch
        .points
        .iter()
        .map(|p| PointRef { t: p.t, state: &p.state, iterations: p.newton_iterations })
        .collect();
    ctx.out.write("states.csv", &states_table(problem, &points, &certs).to_csv()?)?;
    dump_final(ctx, problem, points.last().expect("branch has the trivial point"))?;
    if certify {
        let mut rows = Vec::new();
        for (k, c) in certs.iter().enumerate() {
            match c {
                Some(Ok(rep)) => {
                    if !rep.pass {
                        ctx.fail(
                            EXIT_CERTIFICATE,
                            format!("certificate failed at t = {}: {}", points[k].t, rep.failing.join(", ")),
                        );
                    }
                    rows.push((k, points[k].t, rep));
                }
                Some(Err(e)) => ctx.fail(EXIT_CERTIFICATE, format!("certificate at t = {}: {e}", points[k].t)),
                None => {}
            }
        }
        ctx.out.write("eigenvalues.csv", &eigen_table(problem.rank(), &rows).to_csv()?)?;
        if let Some((_, _, rep)) = rows.last() {
            ctx.out.write_json("certificate.json", rep)?;
        }
    }
    Ok(Some(branch))
}

#[derive(Serialize)]
struct DeflationOutput<'a> {
    lambda: &'a [f64],
    starts: usize,
    seed: u64,
    known: usize,
    found: usize,
    outcomes: &'a [StartOutcome],
}

fn run_deflate(cfg: &ExperimentConfig, problem: &TodaProblem, lambda: &[f64], ctx: &mut Ctx) -> CliResult<()> {
    let Some(branch) = run_branch(cfg, problem, lambda, false, ctx)? else {
        return Ok(());
    };
    if !branch.complete {
        return Ok(());
    }
    let opts = cfg.deflation_options();
    let known = [branch.last().state.clone()];
    let report = match ctx.time("deflation", || deflated_search(problem, lambda, &known, &opts)) {
        Ok(r) => r,
        Err(e) => {
            ctx.fail_with("deflation", e);
            return Ok(());
        }
    };
    let mut t = Table::new(["start", "outcome", "index", "distance", "reason"]);
    for (k, o) in report.outcomes.iter().enumerate() {
        let row = match o {
            StartOutcome::New { index } => vec!["new".into(), index.to_string(), String::new(), String::new()],
            StartOutcome::Rediscovered { distance } => {
                vec!["rediscovered".into(), String::new(), fmt_f64(*distance), String::new()]
            }
            StartOutcome::Failed { reason } => vec!["failed".into(), String::new(), String::new(), reason.clone()],
        };
        let mut full = vec![k.to_string()];
        full.extend(row);
        t.push(full);
    }
    ctx.out.write("deflation.csv", &t.to_csv()?)?;
    ctx.out.write_json(
        "deflation.json",
        &DeflationOutput {
            lambda,
            starts: opts.starts,
            seed: opts.seed,
            known: known.len(),
            found: report.found.len(),
            outcomes: &report.outcomes,
        },
    )?;
    for (k, s) in report.found.iter().enumerate() {
        dump_state(ctx, problem, &format!("found{}_", k + 1), s)?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub s: f64,
    pub lambda: Vec<f64>,
    pub converged: bool,
    /// Continuation parameter reached.
    pub t: f64,
    pub residual: Option<f64>,
    pub coupled_min: Option<f64>,
    pub coupled_min_unconstrained: Option<f64>,
    pub mu1: Vec<Option<f64>>,
    pub mu2: Vec<Option<f64>>,
    pub within_box: Option<bool>,
    pub pass: Option<bool>,
    pub failure: Option<String>,
}

fn sweep_point(cfg: &ExperimentConfig, problem: &TodaProblem, s: f64) -> SweepRow {
    let r = problem.rank();
    let mut row = SweepRow {
        s,
        lambda: Vec::new(),
        converged: false,
        t: 0.0,
        residual: None,
        coupled_min: None,
        coupled_min_unconstrained: None,
        mu1: vec![None; r],
        mu2: vec![None; r],
        within_box: None,
        pass: None,
        failure: None,
    };
    row.lambda = match cfg.lambda_for(Some(s)) {
        Ok(l) => l,
        Err(e) => {
            row.failure = Some(e.to_string());
            return row;
        }
    };
    let branch = match continuation(problem, &row.lambda, &cfg.continuation) {
        Ok(b) => b,
        Err(e) => {
            row.failure = Some(e.to_string());
            return row;
        }
    };
    let last = branch.last();
    row.t = last.t;
    row.residual = Some(last.state.residual_norm);
    row.converged = branch.complete;
    if !branch.complete {
        row.failure = branch.failure.clone();
        return row;
    }
    match nondegeneracy_certificate(problem, &last.state, &cfg.certificate) {
        Ok(rep) => {
            row.coupled_min = rep.coupled_min;
            row.coupled_min_unconstrained = rep.coupled_min_unconstrained;
            row.mu1 = rep.mu1;
            row.mu2 = rep.mu2;
            row.within_box = Some(rep.within_box);
            row.pass = Some(rep.pass);
        }
        Err(e) => row.failure = Some(format!("certificate: {e}")),
    }
    row
}

pub fn sweep_table(rank: usize, rows: &[SweepRow]) -> Table {
    let mut header = vec!["s".to_string()];
    header.extend((1..=rank).map(|i| format!("lambda_{i}")));
    header.extend(["converged".into(), "t".into(), "residual".into(), "coupled_min".into(), "coupled_min_unconstrained".into()]);
    header.extend((1..=rank).map(|i| format!("mu1_{i}")));
    header.extend((1..=rank).map(|i| format!("mu2_{i}")));
    header.extend(["within_box".into(), "pass".into()]);
    let flag = |b: Option<bool>| b.map_or_else(String::new, |b| b.to_string());
    let mut t = Table::new(header);
    for r in rows {
        let mut row = vec![fmt_f64(r.s)];
        if r.lambda.len() == rank {
            row.extend(r.lambda.iter().map(|x| fmt_f64(*x)));
        } else {
            row.extend(std::iter::repeat_n(String::new(), rank));
        }
        row.extend([r.converged.to_string(), fmt_f64(r.t), fmt_opt(r.residual), fmt_opt(r.coupled_min), fmt_opt(r.coupled_min_unconstrained)]);
        row.extend(r.mu1.iter().map(|x| fmt_opt(*x)));
        row.extend(r.mu2.iter().map(|x| fmt_opt(*x)));
        row.extend([flag(r.within_box), flag(r.pass)]);
        t.push(row);
    }
    t
}

fn run_sweep(cfg: &ExperimentConfig, problem: &TodaProblem, ctx: &mut Ctx) -> CliResult<()> {
    let s_values = &cfg.sweep.as_ref().expect("validated").s;
    let rows: Vec<SweepRow> =
        ctx.time("sweep", || s_values.par_iter().map(|&s| sweep_point(cfg, problem, s)).collect());
    for r in &rows {
        if let Some(f) = &r.failure {
            let code = if r.converged { 0 } else { EXIT_SOLVER };
            ctx.failures.push(format!("s = {}: {f}", r.s));
            if ctx.exit == 0 {
                ctx.exit = code;
            }
        }
    }
    ctx.out.write("sweep.csv", &sweep_table(problem.rank(), &rows).to_csv()?)?;
    ctx.out.write_json("sweep.json", &rows)?;
    Ok(())
}

/// Reloads the final state of a finished run and certifies it.
///
/// Checksums are verified first. The state is re-polished by Newton from
/// the dumped fields, which normally takes no iterations.
pub fn certify_manifest(manifest_path: &Path, opts: &RunOptions) -> CliResult<RunOutcome> {
    let manifest = RunManifest::read(manifest_path)?;
    let src = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    manifest.verify(&src)?;
    if manifest.file(FINAL_STATE).is_none() {
        return Err(CliError::Config(format!(
            "{} has no final state; rerun with dump_fields = true",
            manifest_path.display()
        )));
    }
    let fin: FinalState = serde_json::from_slice(&std::fs::read(src.join(FINAL_STATE))?)
        .map_err(|e| CliError::Config(format!("{FINAL_STATE}: {e}")))?;
    let mut cfg = manifest.config.clone();
    cfg.mode = Mode::Certify;
    let problem = build_problem(&cfg)?;
    let mut u = Vec::with_capacity(problem.rank());
    for i in 1..=problem.rank() {
        let rel = format!("fields/u_{i}.bin");
        let file = std::fs::File::open(src.join(&rel))?;
        let (header, values) = read_field(std::io::BufReader::new(file))?;
        if header.n != cfg.n {
            return Err(CliError::Config(format!("{rel}: N = {} but config has {}", header.n, cfg.n)));
        }
        let mut f = GridField::dirichlet(values);
        f.boundary_constant = header.boundary_constant;
        u.push(f);
    }
    let dir = opts.output.clone().unwrap_or_else(|| src.join("certify"));
    cfg.output = dir.clone();
    let mut ctx = Ctx {
        out: OutputSet::new(dir)?,
        failures: Vec::new(),
        warnings: Vec::new(),
        exit: 0,
        timings: BTreeMap::new(),
        dump_fields: false,
    };
    match ctx.time("newton", || newton_solve(&problem, &fin.lambda, Some(&u), &cfg.continuation.newton)) {
        Ok(state) => {
            let cert = ctx.time("certificate", || nondegeneracy_certificate(&problem, &state, &cfg.certificate));
            let p = PointRef { t: fin.t, iterations: state.iterations, state: &state };
            let certs = [Some(cert.as_ref().map(Clone::clone).map_err(ToString::to_string))];
            ctx.out.write("states.csv", &states_table(&problem, std::slice::from_ref(&p), &certs).to_csv()?)?;
            match cert {
                Ok(rep) => {
                    if !rep.pass {
                        ctx.fail(EXIT_CERTIFICATE, format!("certificate failed: {}", rep.failing.join(", ")));
                    }
                    ctx.out.write("eigenvalues.csv", &eigen_table(problem.rank(), &[(0, fin.t, &rep)]).to_csv()?)?;
                    ctx.out.write_json("certificate.json", &rep)?;
                }
                Err(e) => ctx.fail(EXIT_CERTIFICATE, format!("certificate: {e}")),
            }
        }
        Err(e) => ctx.fail_with("newton", e),
    }
    ctx.finish(cfg, opts)
}
