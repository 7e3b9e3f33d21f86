//! Experiment configuration: a versioned TOML schema covering system,
//! bath, grid, initial state, control, solver, ensemble and output
//! settings, with field-level validation before any run starts.

use serde::{Deserialize, Serialize};

use crate::bath::{BathSpec, KernelFamily};
use crate::control::ControlSchedule;
use crate::hilbert::StateKind;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Master,
    LinearQsd,
    NonlinearQsd,
    Gaussian,
}

impl std::fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolverMethod::Master => "master",
            SolverMethod::LinearQsd => "linear_qsd",
            SolverMethod::NonlinearQsd => "nonlinear_qsd",
            SolverMethod::Gaussian => "gaussian",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub omega: f64,
    pub levels_per_mode: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    pub family: KernelFamily,
    pub gamma_coupling: f64,
    #[serde(default = "default_one")]
    pub gamma_env: f64,
    #[serde(default = "default_one")]
    pub cutoff: f64,
    #[serde(default)]
    pub temperature: f64,
}

fn default_one() -> f64 {
    1.0
}

impl BathSection {
    pub fn to_spec(&self) -> BathSpec {
        BathSpec {
            family: self.family,
            gamma_coupling: self.gamma_coupling,
            gamma_env: self.gamma_env,
            cutoff: self.cutoff,
            temperature: self.temperature,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_end: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub method: SolverMethod,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// 0 = one worker per available core.
    #[serde(default)]
    pub workers: usize,
}

fn default_count() -> usize {
    1
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            count: 1,
            seed: 0,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub directory: Option<String>,
    /// Per-trajectory observable CSVs (QSD solvers only).
    #[serde(default)]
    pub trajectory_dump: bool,
}

fn default_stride() -> usize {
    1
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            stride: 1,
            directory: None,
            trajectory_dump: false,
        }
    }
}

/// Sweep grid for the `sweep` subcommand: `points` drive frequencies
/// equally spaced over `[freq_min, freq_max]` applied to a sinusoidal
/// schedule with the given baseline and amplitude.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub freq_min: f64,
    pub freq_max: f64,
    pub points: usize,
    pub k0: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub system: SystemSection,
    pub bath: BathSection,
    pub grid: GridSection,
    pub initial_state: StateKind,
    pub control: ControlSchedule,
    pub solver: SolverSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(format!("config write: {e}")))
    }

    pub fn steps(&self) -> usize {
        (self.grid.t_end / self.grid.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema: expected version {SCHEMA_VERSION}, found {}",
                self.schema
            )));
        }
        if self.grid.dt <= 0.0 || self.grid.dt.is_nan() {
            return Err(Error::Config("grid.dt: must be positive".into()));
        }
        if self.grid.t_end <= 0.0 || self.grid.t_end.is_nan() {
            return Err(Error::Config("grid.t_end: must be positive".into()));
        }
        let steps = self.steps();
        if steps == 0
            || (steps as f64 * self.grid.dt - self.grid.t_end).abs()
                > 1e-9 * self.grid.t_end.max(1.0)
        {
            return Err(Error::Config(
                "grid.t_end: must be a positive multiple of grid.dt".into(),
            ));
        }
        if self.system.levels_per_mode < 1 || self.system.levels_per_mode > 30 {
            return Err(Error::Config(
                "system.levels_per_mode: must lie in [1, 30]".into(),
            ));
        }
        if !self.system.omega.is_finite() || self.system.omega < 0.0 {
            return Err(Error::Config(
                "system.omega: must be finite and >= 0".into(),
            ));
        }
        if self.ensemble.count < 1 {
            return Err(Error::Config("ensemble.count: must be >= 1".into()));
        }
        if self.output.stride == 0 {
            return Err(Error::Config("output.stride: must be >= 1".into()));
        }
        self.bath
            .to_spec()
            .validate()
            .map_err(|e| Error::Config(format!("bath: {e}")))?;
        self.control
            .validate()
            .map_err(|e| Error::Config(format!("control: {e}")))?;
        if let Some(sweep) = &self.sweep {
            if sweep.points < 1 {
                return Err(Error::Config("sweep.points: must be >= 1".into()));
            }
            if sweep.freq_min <= 0.0 || sweep.freq_min.is_nan() || sweep.freq_max < sweep.freq_min {
                return Err(Error::Config("sweep: need 0 < freq_min <= freq_max".into()));
            }
            if sweep.points == 1 && sweep.freq_max != sweep.freq_min {
                return Err(Error::Config(
                    "sweep.points: a single point needs freq_min == freq_max".into(),
                ));
            }
        }
        Ok(())
    }

    /// The sweep frequency grid (validated config).
    pub fn sweep_frequencies(&self) -> Vec<f64> {
        match &self.sweep {
            None => Vec::new(),
            Some(s) => {
                if s.points == 1 {
                    vec![s.freq_min]
                } else {
                    (0..s.points)
                        .map(|i| {
                            s.freq_min
                                + (s.freq_max - s.freq_min) * i as f64 / (s.points - 1) as f64
                        })
                        .collect()
                }
            }
        }
    }
}
