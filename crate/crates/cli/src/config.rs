//! Versioned TOML configuration schema. Unknown keys are rejected (exit 2),
//! type and domain errors exit 3, a missing file exits 4, and an empty or
//! absent file yields the shipped defaults (the headline experiment).

use serde::{Deserialize, Serialize};
use std::path::Path;

use cubic_core::benchmark::BenchmarkConfig;
use cubic_core::gate::{GateConfig, QGrid};
use cubic_core::grid::GridSpec;
use cubic_core::sweep::SweepConfig;

use crate::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub gate: GateSection,
    #[serde(default)]
    pub benchmark: BenchmarkSection,
    #[serde(default)]
    pub resource: ResourceSection,
    #[serde(default)]
    pub compose: ComposeSection,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            re_alpha_start: -2.0,
            re_alpha_stop: 2.0,
            re_alpha_step: 0.25,
            im_alpha: 0.0,
            chi: 0.03,
            g: 1.0,
            lambda: 1.0,
            signal_dim: cubic_core::DEFAULT_DIM,
            with_benchmark: true,
            allow_large_alpha: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub re_alpha_start: f64,
    pub re_alpha_stop: f64,
    pub re_alpha_step: f64,
    pub im_alpha: f64,
    pub chi: f64,
    pub g: f64,
    pub lambda: f64,
    pub signal_dim: usize,
    pub with_benchmark: bool,
    pub allow_large_alpha: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateSection {
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub chi: f64,
    pub g: f64,
    pub lambda: f64,
    pub mode: GateMode,
    pub q_min: f64,
    pub q_max: f64,
    pub q_nodes: usize,
    pub signal_dim: usize,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
}

impl Default for GateSection {
    fn default() -> Self {
        let gate = GateConfig::default();
        GateSection {
            alpha_re: 1.0,
            alpha_im: 0.0,
            chi: gate.chi,
            g: gate.g,
            lambda: gate.lambda,
            mode: GateMode::Deterministic,
            q_min: gate.q_grid.min,
            q_max: gate.q_grid.max,
            q_nodes: gate.q_grid.nodes,
            signal_dim: gate.signal_dim,
            grid_min: gate.grid.x_min,
            grid_max: gate.grid.x_max,
            grid_points: gate.grid.n_points,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateMode {
    Deterministic,
    Probabilistic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSection {
    pub alpha_re: f64,
    pub alpha_im: f64,
    /// Fixed effective nonlinearity; when absent the CLI fits it from a
    /// sweep manifest passed on the command line.
    pub chi_eff: Option<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub coarse_points: usize,
    pub golden_tol: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub q_nodes: usize,
    pub dim: usize,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        let b = BenchmarkConfig::default();
        BenchmarkSection {
            alpha_re: 1.0,
            alpha_im: 0.0,
            chi_eff: None,
            lambda_min: b.lambda_min,
            lambda_max: b.lambda_max,
            coarse_points: b.coarse_points,
            golden_tol: b.golden_tol,
            q_min: b.q_grid.min,
            q_max: b.q_grid.max,
            q_nodes: b.q_grid.nodes,
            dim: b.dim,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourceSection {
    pub chi: f64,
    pub g: f64,
    pub dim: usize,
    /// Generation squeeze factor for the recipe path.
    pub g_gen: f64,
    /// Truncation used for the recipe comparison.
    pub recipe_dim: usize,
}

impl Default for ResourceSection {
    fn default() -> Self {
        ResourceSection { chi: 0.03, g: 1.0, dim: cubic_core::DEFAULT_DIM, g_gen: 4.0, recipe_dim: 120 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ComposeSection {
    pub chi: f64,
    pub dim: usize,
}

impl Default for ComposeSection {
    fn default() -> Self {
        ComposeSection { chi: 0.05, dim: 24 }
    }
}

/// Read a config file. `None` (no --config flag) yields full defaults.
pub fn parse_config(path: Option<&Path>) -> CliResult<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig { schema_version: SCHEMA_VERSION, ..FileConfig::default() });
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::missing_file(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> CliResult<FileConfig> {
    let cfg: FileConfig = toml::from_str(text).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("unknown field") {
            CliError::unknown_key(format!("config error: {msg}"))
        } else {
            CliError::invalid_value(format!("config error: {msg}"))
        }
    })?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(CliError::invalid_value(format!(
            "config error: unsupported schema_version {} (expected {SCHEMA_VERSION})",
            cfg.schema_version
        )));
    }
    Ok(cfg)
}

impl GateSection {
    pub fn to_gate_config(&self) -> CliResult<GateConfig> {
        let cfg = GateConfig {
            chi: self.chi,
            g: self.g,
            lambda: self.lambda,
            q_grid: QGrid { min: self.q_min, max: self.q_max, nodes: self.q_nodes },
            signal_dim: self.signal_dim,
            grid: GridSpec::new(self.grid_min, self.grid_max, self.grid_points)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl BenchmarkSection {
    pub fn to_benchmark_config(&self) -> CliResult<BenchmarkConfig> {
        let cfg = BenchmarkConfig {
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            coarse_points: self.coarse_points,
            golden_tol: self.golden_tol,
            q_grid: QGrid { min: self.q_min, max: self.q_max, nodes: self.q_nodes },
            grid: GridSpec::default(),
            dim: self.dim,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl SweepSection {
    pub fn to_sweep_config(&self, benchmark: &BenchmarkSection) -> CliResult<SweepConfig> {
        let gate = GateConfig {
            chi: self.chi,
            g: self.g,
            lambda: self.lambda,
            signal_dim: self.signal_dim,
            ..GateConfig::default()
        };
        gate.validate()?;
        let cfg = SweepConfig {
            re_alpha_start: self.re_alpha_start,
            re_alpha_stop: self.re_alpha_stop,
            re_alpha_step: self.re_alpha_step,
            im_alpha: self.im_alpha,
            gate,
            benchmark: benchmark.to_benchmark_config()?,
            with_benchmark: self.with_benchmark,
            allow_large_alpha: self.allow_large_alpha,
        };
        cfg.alphas()?;
        Ok(cfg)
    }
}
