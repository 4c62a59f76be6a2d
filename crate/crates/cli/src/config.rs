//! JSON run configuration: decoding with field-path error reporting,
//! defaults, and conversion into core types.

use std::path::Path;

use serde::{Deserialize, Serialize};

use sirnc::model::{ControlVec, CostWeights, ModelParams, State};
use sirnc::solver::{ControlMask, FbsSettings, Grid};

use crate::CliError;

/// Time-grid section; defaults to the standard horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub t_final: f64,
    pub dt: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { t_final: 100.0, dt: 0.1 }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid<f64>, CliError> {
        Grid::new(self.t_final, self.dt).map_err(CliError::from)
    }
}

/// Sweep-solver section; each field falls back to the standard tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FbsSpec {
    pub kappa: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FbsSpec {
    fn default() -> Self {
        Self { kappa: 0.8, tol: 1e-3, max_iter: 500 }
    }
}

impl FbsSpec {
    pub fn build(&self) -> FbsSettings<f64> {
        FbsSettings {
            kappa: self.kappa,
            tol: self.tol,
            max_iter: self.max_iter,
            u_init: None,
        }
    }
}

/// The complete JSON configuration of a run. `params`, `weights`, and `x0`
/// are required with all their fields; the rest default to the standard
/// settings (zero control, horizon 100 at step 0.1, default solver tuning,
/// all controls available).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams<f64>,
    pub weights: CostWeights<f64>,
    pub x0: State<f64>,
    #[serde(default = "zero_control")]
    pub control: ControlVec<f64>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub fbs: FbsSpec,
    #[serde(default)]
    pub mask: ControlMask,
}

fn zero_control() -> ControlVec<f64> {
    ControlVec::zero()
}

impl RunConfig {
    /// Decodes a config from JSON text; errors carry the offending field
    /// path (for example `params.beta`).
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(&mut de)
            .map_err(|e| CliError::config(format!("at `{}`: {}", e.path(), e.inner())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(self) -> String {
        let mut out = serde_json::to_string_pretty(&self).expect("config serializes");
        out.push('\n');
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.validate()?;
        self.weights.validate()?;
        self.x0.validate(&self.params)?;
        self.control.validate(&self.params)?;
        self.grid.build()?;
        self.fbs.build().validate()?;
        Ok(())
    }
}
