//! TOML run, sweep and MMS configurations.
//!
//! Keys are grouped in tables and referred to by their dotted path
//! (`grid.n`, `flow.nu`, `stats.burn_in`, ...). Physical parameters have no
//! defaults; numerical knobs do.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::{ForcingSpec, Mode};
use crate::solver::{FlowParams, MmsTarget, StepperConfig};
use crate::spectral::{GridSpec, SpectralGrid};

fn default_perturbation() -> f64 {
    0.1
}

fn default_amplitude() -> f64 {
    1.0
}

fn default_perturbation_band() -> i64 {
    4
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_workers() -> usize {
    1
}

/// Averaging window: burn-in is discarded, then `window` time units are
/// averaged. The run ends at `burn_in + window`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsConfig {
    pub burn_in: f64,
    pub window: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Steps between checkpoints; 0 disables them.
    #[serde(default)]
    pub checkpoint_every: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: 0,
            output_dir: default_output_dir(),
            checkpoint_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    /// The force pattern, rescaled to rms `amplitude`.
    #[default]
    ForcingShape,
    /// The listed `init.modes`, used as given (no rescaling).
    Modes,
}

/// Initial velocity: a deterministic part plus `perturbation` times a unit-rms
/// random solenoidal field drawn from `run.seed` in `max |m_j| <= band`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    #[serde(default)]
    pub kind: InitKind,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
    #[serde(default = "default_perturbation_band")]
    pub band: i64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<Mode>,
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig {
            kind: InitKind::default(),
            amplitude: default_amplitude(),
            perturbation: default_perturbation(),
            band: default_perturbation_band(),
            modes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub flow: FlowParams,
    pub forcing: ForcingSpec,
    pub stepper: StepperConfig,
    pub stats: StatsConfig,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub init: InitConfig,
}

fn parse_error(path: Option<&Path>, e: toml::de::Error) -> Error {
    let key = path.map_or_else(|| "config".to_string(), |p| p.display().to_string());
    Error::Config {
        key,
        message: e.to_string().trim_end().to_string(),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be > 0, got {v}")))
    }
}

fn nonnegative(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be >= 0, got {v}")))
    }
}

/// Rewrites errors raised while realizing modes so they name the config key.
fn keyed(key: &str, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::config(key, other.to_string()),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| parse_error(None, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(&read_file(path)?).map_err(|e| parse_error(Some(path), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Total simulated time.
    pub fn t_end(&self) -> f64 {
        self.stats.burn_in + self.stats.window
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate().map_err(|e| keyed("grid", e))?;
        self.flow.validate()?;
        self.stepper.validate()?;
        nonnegative("stats.burn_in", self.stats.burn_in)?;
        positive("stats.window", self.stats.window)?;
        if let Some(t) = self.stepper.t_end {
            let want = self.t_end();
            if (t - want).abs() > 1e-12 * want {
                return Err(Error::config(
                    "stepper.t_end",
                    format!("run length is stats.burn_in + stats.window = {want}, got {t}"),
                ));
            }
        }
        nonnegative("init.amplitude", self.init.amplitude)?;
        nonnegative("init.perturbation", self.init.perturbation)?;
        if self.init.band < 1 {
            return Err(Error::config("init.band", "must be >= 1"));
        }
        let sg = SpectralGrid::new(self.grid)?;
        if !self.forcing.is_zero() {
            self.forcing
                .realize_spectral(&sg)
                .map_err(|e| keyed("forcing.modes", e))?;
        }
        match self.init.kind {
            InitKind::ForcingShape => {
                if self.forcing.is_zero() && self.init.amplitude > 0.0 {
                    return Err(Error::config(
                        "init.kind",
                        "forcing_shape needs a nonzero force; use kind = \"modes\" or amplitude = 0",
                    ));
                }
                if !self.init.modes.is_empty() {
                    return Err(Error::config(
                        "init.modes",
                        "only used with kind = \"modes\"",
                    ));
                }
            }
            InitKind::Modes => {
                if !self.init.modes.is_empty() {
                    let cutoff = self.grid.dealias_cutoff();
                    crate::forcing::assemble_modes(&sg, &self.init.modes, cutoff)
                        .map_err(|e| keyed("init.modes", e))?;
                }
            }
        }
        Ok(())
    }
}

/// `gamma` values of a sweep and its parallelism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub gamma_values: Vec<f64>,
    #[serde(default = "default_workers")]
    pub parallel_workers: usize,
}

/// A run configuration plus a `[sweep]` table. The sweep file's `[flow]`
/// table gives `nu` only; `gamma` comes from `sweep.gamma_values`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub gamma_values: Vec<f64>,
    pub parallel_workers: usize,
}

impl SweepConfig {
    pub fn new(base: RunConfig, gamma_values: Vec<f64>, parallel_workers: usize) -> Result<Self> {
        let cfg = SweepConfig {
            base,
            gamma_values,
            parallel_workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_values.is_empty() {
            return Err(Error::config("sweep.gamma_values", "must not be empty"));
        }
        for &g in &self.gamma_values {
            nonnegative("sweep.gamma_values", g)?;
        }
        if self.gamma_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "sweep.gamma_values",
                "must be strictly increasing",
            ));
        }
        if self.parallel_workers == 0 {
            return Err(Error::config("sweep.parallel_workers", "must be >= 1"));
        }
        self.base.validate()
    }

    /// Configuration of the `i`-th run.
    pub fn run_config(&self, i: usize) -> RunConfig {
        let mut cfg = self.base.clone();
        cfg.flow.gamma = self.gamma_values[i];
        cfg.run.output_dir = self.base.run.output_dir.join(format!("gamma_{i:03}"));
        cfg
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::parse(text, None)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&read_file(path)?, Some(path))
    }

    fn parse(text: &str, path: Option<&Path>) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_error(path, e))?;
        let sweep_value = table
            .remove("sweep")
            .ok_or_else(|| Error::config("sweep", "missing [sweep] table"))?;
        let sweep: SweepSection = sweep_value
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("sweep", e.to_string().trim_end()))?;
        let first = *sweep
            .gamma_values
            .first()
            .ok_or_else(|| Error::config("sweep.gamma_values", "must not be empty"))?;
        let flow = table
            .get_mut("flow")
            .and_then(|v| v.as_table_mut())
            .ok_or_else(|| Error::config("flow", "missing [flow] table"))?;
        if flow.contains_key("gamma") {
            return Err(Error::config(
                "flow.gamma",
                "set by sweep.gamma_values in a sweep file",
            ));
        }
        flow.insert("gamma".into(), toml::Value::Float(first));
        let base: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| parse_error(path, e))?;
        SweepConfig::new(base, sweep.gamma_values, sweep.parallel_workers)
    }

    pub fn to_toml_string(&self) -> String {
        let mut table = toml::Table::try_from(&self.base).expect("run config serializes");
        if let Some(flow) = table.get_mut("flow").and_then(|v| v.as_table_mut()) {
            flow.remove("gamma");
        }
        let sweep = SweepSection {
            gamma_values: self.gamma_values.clone(),
            parallel_workers: self.parallel_workers,
        };
        table.insert(
            "sweep".into(),
            toml::Value::try_from(sweep).expect("sweep section serializes"),
        );
        toml::to_string(&table).expect("sweep config serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsSection {
    pub target: MmsTarget,
    pub t_end: f64,
    pub dts: Vec<f64>,
}

/// Temporal convergence study against a manufactured solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MmsConfig {
    pub grid: GridSpec,
    pub flow: FlowParams,
    pub mms: MmsSection,
}

impl MmsConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: MmsConfig = toml::from_str(text).map_err(|e| parse_error(None, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let cfg: MmsConfig =
            toml::from_str(&read_file(path)?).map_err(|e| parse_error(Some(path), e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate().map_err(|e| keyed("grid", e))?;
        self.flow.validate()?;
        positive("mms.t_end", self.mms.t_end)?;
        if self.mms.dts.is_empty() {
            return Err(Error::config("mms.dts", "must not be empty"));
        }
        for &dt in &self.mms.dts {
            positive("mms.dts", dt)?;
        }
        Ok(())
    }
}
