//! Command-line surface.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use toda_core::grid::{greens_function, write_field, CacheHeader};
use toda_core::lie::{
    build_cartan, spectral_radius, symmetric_decomposition, uniqueness_thresholds, verify_radius_bounds,
};
use toda_core::{DomainGrid, Family, LieFamily, SpectrumMethod};

use crate::config::{ExperimentConfig, Mode, SweepSpec, WeightSpec};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_f64, sha256_hex, to_json, write_atomic, Table};
use crate::run::{certify_manifest, run, threshold_reports, xyz_bytes, RunOptions, RunOutcome};

#[derive(Debug, Parser)]
#[command(name = "toda", version, about = "Mean-field Toda systems on the unit square")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cartan data, spectra and uniqueness thresholds as JSON.
    Cartan(CartanArgs),
    /// Precompute discrete Green's functions in the cache format.
    Domain(DomainArgs),
    /// Solve at one λ, optionally by continuation, with certificates or deflation.
    Solve(SolveArgs),
    /// Certify the final state of a previous run from its manifest.
    Certify(CertifyArgs),
    /// Continuation and certificate at each threshold fraction `s`.
    Sweep(SweepArgs),
    /// Run a config file in whatever mode it names.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct CartanArgs {
    #[arg(long)]
    pub family: Family,
    /// Required unless only `--verify-bounds` is asked for.
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub thresholds: bool,
    #[arg(long)]
    pub spectrum: bool,
    #[arg(long, value_enum, default_value = "dense-eig")]
    pub method: MethodArg,
    /// Check the radius bounds for every rank up to this one.
    #[arg(long, value_name = "MAX_RANK")]
    pub verify_bounds: Option<usize>,
    /// Aligned threshold table for every rank up to `--rank`.
    #[arg(long)]
    pub table: bool,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum MethodArg {
    ClosedForm,
    DenseEig,
    RecursionBound,
}

impl From<MethodArg> for SpectrumMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ClosedForm => SpectrumMethod::ClosedForm,
            MethodArg::DenseEig => SpectrumMethod::DenseEig,
            MethodArg::RecursionBound => SpectrumMethod::RecursionBound,
        }
    }
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    #[arg(long)]
    pub n: usize,
    /// Source point `x,y`; repeat for several.
    #[arg(long = "point", value_name = "X,Y", required = true)]
    pub points: Vec<String>,
    /// Recorded in the header.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value = "greens")]
    pub output: PathBuf,
    #[arg(long)]
    pub xyz: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Record stage timings in the manifest (breaks byte-identical reruns).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Base config; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',', conflicts_with = "at_threshold")]
    pub lambda: Option<Vec<f64>>,
    /// λ = s·(8π/ρ)/dᵢ.
    #[arg(long, value_name = "S")]
    pub at_threshold: Option<f64>,
    /// Weight file: `f` preset and `sources`.
    #[arg(long)]
    pub weight: Option<PathBuf>,
    /// Continue from λ = 0 in this many steps.
    #[arg(long, value_name = "STEPS")]
    pub continuation: Option<usize>,
    /// Certify every continuation point.
    #[arg(long)]
    pub certify: bool,
    /// Deflated search with this many starts after continuation.
    #[arg(long, value_name = "STARTS")]
    pub deflate: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    pub manifest: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Replaces `sweep.s` from the config.
    #[arg(long, value_delimiter = ',')]
    pub s: Option<Vec<f64>>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Cartan(a) => cartan(&a),
        Command::Domain(a) => domain(&a),
        Command::Solve(a) => {
            let cfg = solve_config(&a)?;
            report(run(&cfg, &options("solve", &a.out))?)
        }
        Command::Certify(a) => report(certify_manifest(&a.manifest, &options("certify", &a.out))?),
        Command::Sweep(a) => {
            let mut cfg = ExperimentConfig::from_path(&a.config)?;
            cfg.mode = Mode::Sweep;
            if let Some(s) = &a.s {
                cfg.sweep = Some(SweepSpec { s: s.clone() });
            }
            report(run(&cfg, &options("sweep", &a.out))?)
        }
        Command::Run(a) => {
            let cfg = ExperimentConfig::from_path(&a.config)?;
            report(run(&cfg, &options("run", &a.out))?)
        }
    }
}

fn options(command: &str, out: &OutputArgs) -> RunOptions {
    RunOptions {
        command: command.into(),
        timings: out.timings,
        output: out.output.clone(),
    }
}

fn report(outcome: RunOutcome) -> CliResult<i32> {
    let m = &outcome.manifest;
    for w in &m.warnings {
        eprintln!("warning: {w}");
    }
    for f in &m.failures {
        eprintln!("failure: {f}");
    }
    println!("{}", outcome.dir.join(crate::manifest::MANIFEST_NAME).display());
    Ok(m.exit_code)
}

pub fn solve_config(a: &SolveArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_path(p)?,
        None => ExperimentConfig::new(Mode::Solve, None),
    };
    if a.family.is_some() {
        cfg.family = a.family;
    }
    if a.rank.is_some() {
        cfg.rank = a.rank;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(l) = &a.lambda {
        cfg.lambda.values = Some(l.clone());
        cfg.lambda.threshold = None;
    }
    if let Some(s) = a.at_threshold {
        cfg.lambda.threshold = Some(s);
        cfg.lambda.values = None;
    }
    if let Some(p) = &a.weight {
        let text = std::fs::read_to_string(p)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
        cfg.weight = WeightSpec::from_toml_str(&text)?;
        cfg.weights = None;
    }
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if let Some(steps) = a.continuation {
        cfg.continuation.steps = steps;
        cfg.mode = Mode::Continuation;
    }
    if a.certify {
        cfg.mode = Mode::Certify;
    }
    if let Some(starts) = a.deflate {
        cfg.deflation.starts = starts;
        cfg.mode = Mode::Deflate;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct CartanRecord {
    family: Family,
    rank: usize,
    matrix: Vec<Vec<i64>>,
    inverse: Vec<Vec<String>>,
    d: Vec<String>,
    a_s: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum_method: Option<SpectrumMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_s_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_max: Option<Vec<f64>>,
}

fn strings<T: ToString>(row: &[T]) -> Vec<String> {
    row.iter().map(ToString::to_string).collect()
}

fn cartan(a: &CartanArgs) -> CliResult<i32> {
    let mut stdout = std::io::stdout().lock();
    if let Some(max_rank) = a.verify_bounds {
        let rep = verify_radius_bounds(a.family, max_rank)?;
        stdout.write_all(&to_json(&rep)?)?;
        if a.rank.is_none() {
            return Ok(0);
        }
    }
    let rank = a
        .rank
        .ok_or_else(|| CliError::Config("--rank is required".into()))?;
    let algebra = LieFamily::new(a.family, rank)?;
    if a.table {
        let reports = threshold_reports(&[a.family], rank)?;
        let mut t = Table::new(["algebra", "rho", "lambda_s_max", "lambda_max"]);
        for r in &reports {
            let lm: Vec<String> = r.lambda_max.iter().map(|x| fmt_f64(*x)).collect();
            t.push(vec![r.algebra.to_string(), fmt_f64(r.rho), fmt_f64(r.lambda_s_max), lm.join(" ")]);
        }
        stdout.write_all(t.to_text().as_bytes())?;
        return Ok(0);
    }
    let cartan = build_cartan(algebra)?;
    let decomp = symmetric_decomposition(&cartan);
    let mut rec = CartanRecord {
        family: a.family,
        rank,
        matrix: cartan.entries().to_vec(),
        inverse: cartan.inverse().iter().map(|r| strings(r)).collect(),
        d: strings(decomp.d()),
        a_s: decomp.a_s().iter().map(|r| strings(r)).collect(),
        rho: None,
        eigenvalues: None,
        spectrum_method: None,
        lambda_s_max: None,
        lambda_max: None,
    };
    if a.spectrum {
        let s = spectral_radius(&decomp, a.method.into())?;
        rec.rho = Some(s.rho);
        rec.eigenvalues = Some(s.eigenvalues);
        rec.spectrum_method = Some(s.method);
    }
    if a.thresholds {
        let t = uniqueness_thresholds(algebra)?;
        rec.rho = Some(t.rho);
        rec.lambda_s_max = Some(t.lambda_s_max);
        rec.lambda_max = Some(t.lambda_max);
    }
    stdout.write_all(&to_json(&rec)?)?;
    Ok(0)
}

fn parse_point(s: &str) -> CliResult<(f64, f64)> {
    let bad = || CliError::Config(format!("point must be x,y: {s}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok((x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?))
}

#[derive(Serialize)]
struct DomainEntry {
    path: PathBuf,
    p: [f64; 2],
    sha256: String,
}

fn domain(a: &DomainArgs) -> CliResult<i32> {
    let grid = DomainGrid::new(a.n)?;
    let points = a.points.iter().map(|s| parse_point(s)).collect::<CliResult<Vec<_>>>()?;
    for (x, y) in &points {
        grid.nearest_node(*x, *y)?;
    }
    if let Some(alpha) = a.alpha {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(CliError::Config(format!("alpha must be positive, got {alpha}")));
        }
    }
    let mut entries = Vec::new();
    for (k, &(x, y)) in points.iter().enumerate() {
        let g = greens_function(&grid, (x, y))?;
        let header = CacheHeader { n: a.n, p: Some([x, y]), alpha: a.alpha, name: None, boundary_constant: 0.0 };
        let mut bytes = Vec::new();
        write_field(&mut bytes, &header, &g.values)?;
        let path = a.output.join(format!("green_{k}.bin"));
        write_atomic(&path, &bytes)?;
        if a.xyz {
            write_atomic(&a.output.join(format!("green_{k}.xyz")), &xyz_bytes(&grid, &g.values))?;
        }
        entries.push(DomainEntry { path, p: [x, y], sha256: sha256_hex(&bytes) });
    }
    std::io::stdout().lock().write_all(&to_json(&entries)?)?;
    Ok(0)
}
