use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};

use crate::asympt::DEFAULT_DELTAS;
use crate::model::{Basis, Interval, ModelSpec};

use super::CliError;

/// A job description read from `--config`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Must match the subcommand when given.
    pub command: Option<String>,
    pub model: Option<ModelConfig>,
    pub criterion: Option<CriterionConfig>,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Columns of `table1` / `table2`.
    pub z: Option<Vec<f64>>,
    pub sweep: Option<SweepConfig>,
    pub asympt: Option<AsymptConfig>,
    /// Design file for `check` (JSON, or CSV by extension).
    pub design: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisName {
    Rational,
    Exponential,
    Logarithmic,
}

/// Interval endpoint: a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Endpoint(pub f64);

impl<'de> Deserialize<'de> for Endpoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Token(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Endpoint(v)),
            Raw::Token(s) if s == "inf" => Ok(Endpoint(f64::INFINITY)),
            Raw::Token(s) => Err(serde::de::Error::custom(format!(
                "interval endpoint must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub basis: BasisName,
    #[serde(default)]
    pub s: usize,
    /// Optional consistency check against `b.len()`.
    pub k: Option<usize>,
    pub b: Vec<f64>,
    pub a: Option<Vec<f64>>,
    pub interval: [Endpoint; 2],
}

impl ModelConfig {
    pub fn build(&self) -> Result<ModelSpec, CliError> {
        let cfg = |e: crate::Error| CliError::Config(e.to_string());
        if let Some(k) = self.k {
            if k != self.b.len() {
                return Err(CliError::Config(format!(
                    "k = {k} but b has {} entries",
                    self.b.len()
                )));
            }
        }
        let [lo, hi] = self.interval;
        let interval = if hi.0 == f64::INFINITY {
            Interval::semi_infinite(lo.0)
        } else {
            Interval::new(lo.0, hi.0)
        }
        .map_err(cfg)?;
        let basis = match self.basis {
            BasisName::Rational => Basis::Rational,
            BasisName::Exponential => Basis::Exponential,
            BasisName::Logarithmic => Basis::Logarithmic,
        };
        let model = ModelSpec::new(basis, self.s, self.b.clone(), interval).map_err(cfg)?;
        match &self.a {
            Some(a) => model.with_a(a.clone()).map_err(cfg),
            None => Ok(model),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum CriterionConfig {
    E,
    #[serde(rename = "c")]
    C { c: Vec<f64> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericConfig {
    pub grid_size: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            grid_size: 10_000,
            tol: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    /// `eff_i` of the E candidate for every coordinate.
    Efficiency,
    /// `lambda_2 / lambda_cstar` of the E candidate.
    EigRatio,
}

/// Vary `b[index]` over `points` equispaced values in `[from, to]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub curve: Curve,
    #[serde(default)]
    pub index: usize,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl SweepConfig {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.from],
            n => (0..n)
                .map(|j| self.from + (self.to - self.from) * j as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptMode {
    Expansion,
    Convergence,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptConfig {
    pub mode: AsymptMode,
    pub x: f64,
    pub r: Vec<f64>,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    /// Direction for the c designs in convergence mode (default `e_m`).
    pub c: Option<Vec<f64>>,
}

fn default_deltas() -> Vec<f64> {
    DEFAULT_DELTAS.to_vec()
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn model(&self) -> Result<ModelSpec, CliError> {
        self.model
            .as_ref()
            .ok_or_else(|| CliError::Config("config needs a model block".into()))?
            .build()
    }

    pub fn criterion(&self) -> Result<&CriterionConfig, CliError> {
        self.criterion
            .as_ref()
            .ok_or_else(|| CliError::Config("config needs a criterion block".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inf_and_criterion() {
        let cfg = JobConfig::parse(
            r#"{"model": {"basis": "rational", "b": [-1.5, -0.5], "interval": [0, "inf"]},
                "criterion": {"type": "c", "c": [0, 1, 0, 0]}}"#,
        )
        .unwrap();
        let model = cfg.model().unwrap();
        assert_eq!(model.m(), 4);
        assert!(!model.interval().is_bounded());
        assert_eq!(cfg.criterion().unwrap(), &CriterionConfig::C { c: vec![0.0, 1.0, 0.0, 0.0] });
        assert_eq!(cfg.numeric.grid_size, 10_000);
    }

    #[test]
    fn rejects_unknown_keys_and_tokens() {
        assert!(JobConfig::parse(r#"{"modle": {}}"#).is_err());
        let bad = r#"{"model": {"basis": "rational", "b": [-1], "interval": [0, "infinity"]}}"#;
        assert!(JobConfig::parse(bad).is_err());
    }

    #[test]
    fn coincident_b_is_a_config_error() {
        let cfg = JobConfig::parse(
            r#"{"model": {"basis": "rational", "b": [-1, -1], "interval": [0, "inf"]}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.model(), Err(CliError::Config(_))));
    }
}
