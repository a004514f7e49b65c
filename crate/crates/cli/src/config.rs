//! Experiment configuration: a versioned batch of cells.

use std::path::Path;

use oplab_core::dynamics::LatticeVector;
use oplab_core::linalg::random::{invertible_ginibre, random_hyperbolic, random_normal, rng};
use oplab_core::shift::{library, WeightSequence};
use oplab_core::{Complex64, ComplexMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    pub cells: Vec<ExperimentConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Classify,
    Aluthge,
    Orbit,
    Shadow,
    Spectrum,
    Certificate,
    Preset,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Classify => "classify",
            Kind::Aluthge => "aluthge",
            Kind::Orbit => "orbit",
            Kind::Shadow => "shadow",
            Kind::Spectrum => "spectrum",
            Kind::Certificate => "certificate",
            Kind::Preset => "preset",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `{"weights": ...}`, `{"matrix": ...}`, `{"library": "<name>"}` or `{"random": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub enum OperatorSpec {
    Weights(WeightSequence),
    Matrix(ComplexMatrix),
    Library(String),
    Random(RandomMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    Ginibre,
    Normal,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMatrix {
    pub family: Family,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub enum VectorSpec {
    Basis(i64),
    Lattice(LatticeVector),
    Dense(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_small: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_large: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<VectorSpec>,
}

/// A resolved operator.
#[derive(Debug, Clone)]
pub enum Operator {
    Shift(WeightSequence),
    Dense(ComplexMatrix),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::ConfigInvalid {
        path: path.into(),
        message: message.into(),
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Structural parse only; cells are validated once seeds are filled in.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ConfigFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            invalid(path, e.into_inner().to_string())
        })?;
        if cfg.version != SCHEMA_VERSION {
            return Err(invalid(
                "version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", cfg.version),
            ));
        }
        if cfg.cells.is_empty() {
            return Err(invalid("cells", "no cells"));
        }
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn validate(&self, at: &str) -> Result<(), CliError> {
        let p = &self.params;
        let positive = [
            ("lambda", p.lambda),
            ("r", p.r),
            ("delta", p.delta),
            ("stopTol", p.stop_tol),
            ("tol", p.tol),
        ];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("{at}.params.{name}"), format!("must be positive, got {v}")));
                }
            }
        }
        if let Some(l) = p.lambda {
            if l >= 1.0 {
                return Err(invalid(format!("{at}.params.lambda"), format!("must lie in (0, 1), got {l}")));
            }
        }
        if let Some(OperatorSpec::Library(name)) = &self.operator {
            if library().iter().all(|e| e.name != name) {
                return Err(invalid(format!("{at}.operator.library"), format!("unknown shift {name:?}")));
            }
        }
        if let Some(OperatorSpec::Random(r)) = &self.operator {
            if r.dim == 0 || r.dim > 64 {
                return Err(invalid(format!("{at}.operator.random.dim"), format!("must be in 1..=64, got {}", r.dim)));
            }
            if self.seed.is_none() {
                return Err(invalid(format!("{at}.seed"), "required for a random operator"));
            }
        }
        if self.kind == Some(Kind::Preset) && self.preset.is_none() {
            return Err(invalid(format!("{at}.preset"), "required for kind preset"));
        }
        if self.kind == Some(Kind::Shadow) && self.seed.is_none() {
            if let Some(OperatorSpec::Matrix(_) | OperatorSpec::Random(_)) = &self.operator {
                return Err(invalid(format!("{at}.seed"), "required for dense shadowing"));
            }
        }
        Ok(())
    }

    pub fn resolve_operator(&self, at: &str) -> Result<Operator, CliError> {
        let spec = self
            .operator
            .as_ref()
            .ok_or_else(|| invalid(format!("{at}.operator"), "missing"))?;
        Ok(match spec {
            OperatorSpec::Weights(w) => Operator::Shift(w.clone()),
            OperatorSpec::Matrix(m) => Operator::Dense(m.clone()),
            OperatorSpec::Library(name) => Operator::Shift(
                library()
                    .into_iter()
                    .find(|e| e.name == name)
                    .map(|e| e.weights)
                    .ok_or_else(|| invalid(format!("{at}.operator.library"), format!("unknown shift {name:?}")))?,
            ),
            OperatorSpec::Random(r) => {
                let seed = self.seed.ok_or_else(|| invalid(format!("{at}.seed"), "required for a random operator"))?;
                let mut g = rng(seed);
                Operator::Dense(match r.family {
                    Family::Ginibre => invertible_ginibre(&mut g, r.dim, 0.05),
                    Family::Normal => random_normal(&mut g, r.dim, 0.2, 3.0),
                    Family::Hyperbolic => random_hyperbolic(&mut g, r.dim),
                })
            }
        })
    }
}

impl VectorSpec {
    pub fn lattice(&self, at: &str) -> Result<LatticeVector, CliError> {
        match self {
            VectorSpec::Basis(m) => Ok(LatticeVector::basis(*m)),
            VectorSpec::Lattice(v) => Ok(v.clone()),
            VectorSpec::Dense(_) => Err(invalid(format!("{at}.params.vector"), "dense vector given for a shift")),
        }
    }

    pub fn dense(&self, dim: usize, at: &str) -> Result<Vec<Complex64>, CliError> {
        match self {
            VectorSpec::Basis(m) if (0..dim as i64).contains(m) => {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[*m as usize] = Complex64::new(1.0, 0.0);
                Ok(v)
            }
            VectorSpec::Dense(v) if v.len() == dim => Ok(v.iter().map(|&[re, im]| Complex64::new(re, im)).collect()),
            _ => Err(invalid(
                format!("{at}.params.vector"),
                format!("expected a basis index in 0..{dim} or {dim} dense entries"),
            )),
        }
    }
}

/// Parses `--operator`: a library shift name or an operator JSON object.
pub fn parse_operator_arg(arg: &str) -> Result<OperatorSpec, CliError> {
    if arg.trim_start().starts_with('{') {
        let de = &mut serde_json::Deserializer::from_str(arg);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = format!("operator.{}", e.path());
            invalid(path, e.into_inner().to_string())
        })
    } else {
        Ok(OperatorSpec::Library(arg.to_string()))
    }
}
