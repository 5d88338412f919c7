//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::certify::{AuditSampler, BoxDomain, SamplingPlan};
use crate::dynsys::SystemConfig;
use crate::measure::{Matrix, NormKind, NormSpec, Vector};
use crate::simulate::ClassK;

pub const SEED_ENV: &str = "CONTRACTION_KIT_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub norm: NormDescriptor,
    /// Additional norms reported by `measure`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub norms: Vec<NormDescriptor>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub domain: Option<BoxConfig>,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    #[serde(default)]
    pub verification: VerificationConfig,
    #[serde(default)]
    pub rho: ClassK,
    /// States at which `measure` evaluates `mu(J(x))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<AuditConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormDescriptor {
    pub kind: NormKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<Vec<Vec<f64>>>,
}

impl Default for NormDescriptor {
    fn default() -> Self {
        Self {
            kind: NormKind::L2,
            weight: None,
        }
    }
}

impl NormDescriptor {
    pub fn resolve(&self) -> Result<NormSpec, CliError> {
        match (self.kind, &self.weight) {
            (NormKind::WeightedL2, Some(rows)) => {
                let p = square_matrix(rows, "norm.weight")?;
                NormSpec::weighted(p).map_err(|e| CliError::Config(format!("norm.weight: {e}")))
            }
            (NormKind::WeightedL2, None) => Err(CliError::Config("WeightedL2 norm needs a weight matrix".into())),
            (_, Some(_)) => Err(CliError::Config(format!("{} norm takes no weight", self.kind))),
            (NormKind::L1, None) => Ok(NormSpec::L1),
            (NormKind::L2, None) => Ok(NormSpec::L2),
            (NormKind::LInf, None) => Ok(NormSpec::LInf),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxConfig {
    pub fn resolve(&self) -> Result<BoxDomain, CliError> {
        BoxDomain::new(Vector::from_row_slice(&self.lower), Vector::from_row_slice(&self.upper))
            .map_err(|e| CliError::Config(format!("box: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_grid")]
    pub grid_points_per_axis: usize,
    #[serde(default)]
    pub random_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_grid() -> usize {
    21
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            grid_points_per_axis: default_grid(),
            random_points: 0,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Start of the comparison trajectory; the equilibrium when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationConfig {
    /// Decay rate to test; the certified rate when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_slope_tol")]
    pub slope_tol: f64,
    #[serde(default = "default_equilibrium_tol")]
    pub equilibrium_tol: f64,
}

fn default_tol() -> f64 {
    1e-6
}

fn default_slope_tol() -> f64 {
    1e-2
}

fn default_equilibrium_tol() -> f64 {
    1e-10
}

impl Default for VerificationConfig {
    fn default() -> Self {
        Self {
            c: None,
            tol: default_tol(),
            slope_tol: default_slope_tol(),
            equilibrium_tol: default_equilibrium_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditCaseConfig {
    pub a: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<AuditCaseConfig>,
    /// Number of random `(A, P, c)` draws appended after `cases`.
    #[serde(default)]
    pub random: usize,
    #[serde(default = "default_min_dim")]
    pub min_dim: usize,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_min_dim() -> usize {
    1
}

fn default_max_dim() -> usize {
    5
}

impl AuditConfig {
    pub fn sampler(&self) -> Result<AuditSampler, CliError> {
        if self.min_dim == 0 || self.min_dim > self.max_dim {
            return Err(CliError::Config("audit needs 1 <= min_dim <= max_dim".into()));
        }
        Ok(AuditSampler {
            min_dim: self.min_dim,
            max_dim: self.max_dim,
            ..AuditSampler::default()
        })
    }
}

pub fn square_matrix(rows: &[Vec<f64>], what: &str) -> Result<Matrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("{what} must be a non-empty square matrix")));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn system(&self) -> Result<&SystemConfig, CliError> {
        self.system
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no system block".into()))
    }

    pub fn simulation(&self) -> Result<&SimulationConfig, CliError> {
        self.simulation
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no simulation block".into()))
    }

    pub fn domain(&self) -> Result<BoxDomain, CliError> {
        self.domain
            .as_ref()
            .ok_or_else(|| CliError::Config("config has no box block".into()))?
            .resolve()
    }

    /// Seed precedence: command-line flag, config, environment, then 0.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        if let Some(seed) = flag.or(self.sampling.seed) {
            return Ok(seed);
        }
        match std::env::var(SEED_ENV) {
            Ok(raw) => raw
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{SEED_ENV}={raw} is not a non-negative integer"))),
            Err(_) => Ok(0),
        }
    }

    pub fn plan(&self, seed: u64) -> SamplingPlan {
        SamplingPlan {
            grid_points_per_axis: self.sampling.grid_points_per_axis,
            random_points: self.sampling.random_points,
            seed,
        }
    }
}
