//! Experiment configuration, read from TOML.
//!
//! See `docs/config.md` for the schema. Unknown keys are rejected and the
//! whole file is validated before anything is computed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toda_core::grid::{assemble_weight, MAX_NODES, MIN_NODES};
use toda_core::lie::uniqueness_thresholds;
use toda_core::solver::{ContinuationOptions, DeflationOptions};
use toda_core::spectra::CertificateOptions;
use toda_core::{DomainGrid, FPreset, Family, LieFamily, SingularSource, WeightField};

use crate::error::{CliError, CliResult};

/// Largest threshold fraction accepted; values above 1 are exploratory.
pub const S_MAX: f64 = 1.2;

/// Environment variable that overrides the output directory.
pub const OUTPUT_ENV: &str = "TODA_OUTPUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Solve,
    Continuation,
    Certify,
    Deflate,
    Sweep,
    Thresholds,
}

/// `λ` either explicitly or as the fraction `s` of the threshold box.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    #[serde(default)]
    pub f: FPreset,
    #[serde(default)]
    pub sources: Vec<SingularSource>,
}

impl WeightSpec {
    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        let spec: WeightSpec = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.f.validate()?;
        for s in &self.sources {
            s.validate()?;
        }
        Ok(())
    }

    pub fn assemble(&self, grid: &DomainGrid) -> CliResult<WeightField> {
        Ok(assemble_weight(grid, &self.f, &self.sources)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeflationSpec {
    pub starts: usize,
    pub amplitude: f64,
    pub modes: usize,
    pub power: f64,
    pub shift: f64,
    pub distinct_tol: f64,
}

impl Default for DeflationSpec {
    fn default() -> Self {
        let d = DeflationOptions::default();
        DeflationSpec {
            starts: 20,
            amplitude: d.amplitude,
            modes: d.modes,
            power: d.power,
            shift: d.shift,
            distinct_tol: d.distinct_tol,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Threshold fractions, one row each.
    pub s: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSpec {
    pub max_rank: usize,
    /// All families when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<Family>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Interior nodes per axis.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default)]
    pub lambda: LambdaSpec,
    /// Shared by every component unless `weights` is given.
    #[serde(default)]
    pub weight: WeightSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<WeightSpec>>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Write binary and XYZ dumps of the computed fields.
    #[serde(default = "default_true")]
    pub dump_fields: bool,
    #[serde(default)]
    pub continuation: ContinuationOptions,
    #[serde(default)]
    pub deflation: DeflationSpec,
    #[serde(default)]
    pub certificate: CertificateOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdSpec>,
}

fn default_n() -> usize {
    63
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_true() -> bool {
    true
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    /// A config for `mode` on `algebra` with every other field at its default.
    pub fn new(mode: Mode, algebra: Option<LieFamily>) -> Self {
        ExperimentConfig {
            mode,
            family: algebra.map(|a| a.family()),
            rank: algebra.map(|a| a.rank()),
            n: default_n(),
            lambda: LambdaSpec::default(),
            weight: WeightSpec::default(),
            weights: None,
            output: default_output(),
            seed: 0,
            dump_fields: true,
            continuation: ContinuationOptions::default(),
            deflation: DeflationSpec::default(),
            certificate: CertificateOptions::default(),
            sweep: None,
            thresholds: None,
        }
    }

    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| config_err(e.to_string()))
    }

    /// The output directory, after the environment override.
    pub fn output_dir(&self) -> PathBuf {
        std::env::var_os(OUTPUT_ENV).map_or_else(|| self.output.clone(), PathBuf::from)
    }

    pub fn algebra(&self) -> CliResult<LieFamily> {
        match (self.family, self.rank) {
            (Some(f), Some(r)) => Ok(LieFamily::new(f, r)?),
            _ => Err(config_err(format!("mode {:?} needs family and rank", self.mode))),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.mode == Mode::Thresholds {
            let spec = self
                .thresholds
                .as_ref()
                .ok_or_else(|| config_err("mode thresholds needs a [thresholds] table"))?;
            if spec.max_rank == 0 || spec.max_rank > 100 {
                return Err(config_err("thresholds.max_rank must be in 1..=100"));
            }
            return Ok(());
        }
        let algebra = self.algebra()?;
        if !(MIN_NODES..=MAX_NODES).contains(&self.n) {
            return Err(config_err(format!(
                "n must be in {MIN_NODES}..={MAX_NODES}, got {}",
                self.n
            )));
        }
        self.weight.validate()?;
        if let Some(ws) = &self.weights {
            if ws.len() != algebra.rank() {
                return Err(config_err(format!(
                    "{} weights for rank {}",
                    ws.len(),
                    algebra.rank()
                )));
            }
            for w in ws {
                w.validate()?;
            }
        }
        if self.mode == Mode::Sweep {
            let sweep = self
                .sweep
                .as_ref()
                .ok_or_else(|| config_err("mode sweep needs a [sweep] table"))?;
            if sweep.s.is_empty() {
                return Err(config_err("sweep.s is empty"));
            }
            for s in &sweep.s {
                check_s(*s)?;
            }
        } else {
            match (&self.lambda.values, self.lambda.threshold) {
                (Some(v), None) => {
                    if v.len() != algebra.rank() {
                        return Err(config_err(format!(
                            "lambda.values has {} entries for rank {}",
                            v.len(),
                            algebra.rank()
                        )));
                    }
                    if v.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                        return Err(config_err("lambda values must be finite and nonnegative"));
                    }
                }
                (None, Some(s)) => check_s(s)?,
                _ => {
                    return Err(config_err(
                        "exactly one of lambda.values and lambda.threshold is required",
                    ))
                }
            }
        }
        let c = &self.continuation;
        if c.steps == 0 || !(c.min_step > 0.0 && c.min_step <= 1.0) {
            return Err(config_err("continuation.steps must be >= 1 and min_step in (0, 1]"));
        }
        c.newton.validate()?;
        let d = &self.deflation;
        if !(d.amplitude >= 0.0 && d.power > 0.0 && d.shift >= 0.0 && d.distinct_tol > 0.0)
            || d.modes == 0
        {
            return Err(config_err("invalid [deflation] table"));
        }
        Ok(())
    }

    /// `λ` at threshold fraction `s`, or the explicit values.
    pub fn lambda_for(&self, s: Option<f64>) -> CliResult<Vec<f64>> {
        let algebra = self.algebra()?;
        match (s.or(self.lambda.threshold), &self.lambda.values) {
            (Some(s), _) => Ok(uniqueness_thresholds(algebra)?.lambda_at(s)),
            (None, Some(v)) => Ok(v.clone()),
            (None, None) => Err(config_err("no lambda given")),
        }
    }

    pub fn deflation_options(&self) -> DeflationOptions {
        let d = &self.deflation;
        DeflationOptions {
            starts: d.starts,
            seed: self.seed,
            amplitude: d.amplitude,
            modes: d.modes,
            power: d.power,
            shift: d.shift,
            distinct_tol: d.distinct_tol,
            newton: DeflationOptions::default().newton,
        }
    }

    pub fn weight_specs(&self) -> CliResult<Vec<WeightSpec>> {
        let rank = self.algebra()?.rank();
        Ok(self.weights.clone().unwrap_or_else(|| vec![self.weight.clone(); rank]))
    }
}

fn check_s(s: f64) -> CliResult<()> {
    if !(0.0..=S_MAX).contains(&s) {
        return Err(config_err(format!("threshold fraction must be in [0, {S_MAX}], got {s}")));
    }
    Ok(())
}
