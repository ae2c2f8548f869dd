//! Experiment configuration: a single JSON document selecting one study,
//! with optional morphology/simulation/output overrides.
//!
//! Unknown keys are rejected so typos fail loudly. `parse_config` fills
//! defaults; the canonical serialized form of the parsed config is what the
//! run manifest hashes.

use std::fmt;
use std::path::Path;

use monotrack_core::balance::effort::{DEFAULT_EFFORT_HORIZON, DOF_COMPARISON_HORIZON};
use monotrack_core::jump::{default_scale_grid, CouplingVariant};
use monotrack_core::sweep::linspace;
use monotrack_core::{LinkName, MorphologySpec, SimConfig};
use serde::{Deserialize, Serialize};

/// Validation or syntax problem in a config document.
#[derive(Debug)]
pub struct ConfigError {
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError {
        message: message.into(),
    }
}

/// An inclusive numeric grid given as bounds plus a point count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.points)
    }

    fn validate(&self, key: &str) -> Result<(), ConfigError> {
        if self.points == 0 {
            return Err(err(format!("{key}: grid needs at least one point")));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return Err(err(format!(
                "{key}: grid bounds [{}, {}] are invalid",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// The study a run executes, with its grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StudySpec {
    /// One jump at the nominal policy: trace, metrics, plot.
    Jump {
        #[serde(default)]
        ramp_duration: Option<f64>,
    },
    /// Link-mass sensitivity sweep.
    SweepMass {
        #[serde(default = "default_mass_link")]
        link: LinkName,
        /// Mass grid; defaults to +-2 kg around the nominal in 9 points.
        #[serde(default)]
        masses: Option<GridSpec>,
    },
    /// Gear-ratio landscape over both drives.
    SweepGear {
        #[serde(default)]
        gr_alpha: Option<GridSpec>,
        #[serde(default)]
        gr_beta: Option<GridSpec>,
    },
    /// Gross-scale study.
    SweepScale {
        #[serde(default)]
        scales: Option<GridSpec>,
        #[serde(default = "default_coupling")]
        coupling: CouplingVariant,
    },
    /// Out-of-plane axis orientation sweep.
    BalancePsi {
        #[serde(default)]
        psi: Option<GridSpec>,
        #[serde(default = "default_effort_horizon")]
        horizon: f64,
    },
    /// Extra-DoF comparison.
    BalanceDof {
        #[serde(default = "default_zeta_hat")]
        zeta_hat: f64,
        #[serde(default = "default_dof_horizon")]
        horizon: f64,
    },
}

fn default_mass_link() -> LinkName {
    LinkName::Head
}

fn default_coupling() -> CouplingVariant {
    CouplingVariant::Coupled
}

fn default_effort_horizon() -> f64 {
    DEFAULT_EFFORT_HORIZON
}

fn default_dof_horizon() -> f64 {
    DOF_COMPARISON_HORIZON
}

fn default_zeta_hat() -> f64 {
    -0.5
}

impl StudySpec {
    pub fn name(&self) -> &'static str {
        match self {
            StudySpec::Jump { .. } => "jump",
            StudySpec::SweepMass { .. } => "sweep-mass",
            StudySpec::SweepGear { .. } => "sweep-gear",
            StudySpec::SweepScale { .. } => "sweep-scale",
            StudySpec::BalancePsi { .. } => "balance-psi",
            StudySpec::BalanceDof { .. } => "balance-dof",
        }
    }
}

/// Output location and formats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub directory: String,
    /// Any of "csv", "svg", "json".
    pub formats: Vec<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            directory: "out".to_string(),
            formats: vec!["csv".into(), "svg".into(), "json".into()],
        }
    }
}

/// A full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "MorphologySpec::nominal")]
    pub morphology: MorphologySpec,
    #[serde(default)]
    pub simulation: SimConfig,
    pub study: StudySpec,
    #[serde(default)]
    pub output: OutputSpec,
    /// Recorded in the manifest; the studies themselves are deterministic.
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.morphology
            .validate()
            .map_err(|e| err(format!("morphology: {e}")))?;
        if !(self.simulation.dt > 0.0) || self.simulation.dt > 1e-2 {
            return Err(err(format!(
                "simulation.dt must lie in (0, 1e-2], got {}",
                self.simulation.dt
            )));
        }
        self.simulation
            .validate()
            .map_err(|e| err(format!("simulation: {e}")))?;
        match &self.study {
            StudySpec::Jump { ramp_duration } => {
                if let Some(ramp) = ramp_duration {
                    if !(*ramp > 0.0) {
                        return Err(err(format!(
                            "study.ramp_duration must be positive, got {ramp}"
                        )));
                    }
                }
            }
            StudySpec::SweepMass { masses, .. } => {
                if let Some(grid) = masses {
                    grid.validate("study.masses")?;
                }
            }
            StudySpec::SweepGear { gr_alpha, gr_beta } => {
                for (key, grid) in [("study.gr_alpha", gr_alpha), ("study.gr_beta", gr_beta)] {
                    if let Some(grid) = grid {
                        grid.validate(key)?;
                        if !(grid.min > 0.0) {
                            return Err(err(format!("{key}: gear ratios must be positive")));
                        }
                    }
                }
            }
            StudySpec::SweepScale { scales, .. } => {
                if let Some(grid) = scales {
                    grid.validate("study.scales")?;
                    if !(grid.min > 0.0) {
                        return Err(err("study.scales: scales must be positive"));
                    }
                }
            }
            StudySpec::BalancePsi { psi, horizon } => {
                if let Some(grid) = psi {
                    grid.validate("study.psi")?;
                    let half_pi = std::f64::consts::FRAC_PI_2;
                    if grid.min < -half_pi || grid.max > half_pi {
                        return Err(err("study.psi: grid must lie within [-pi/2, pi/2]"));
                    }
                }
                if !(*horizon > 0.0) {
                    return Err(err("study.horizon must be positive"));
                }
            }
            StudySpec::BalanceDof { horizon, .. } => {
                if !(*horizon > 0.0) {
                    return Err(err("study.horizon must be positive"));
                }
            }
        }
        for format in &self.output.formats {
            if !matches!(format.as_str(), "csv" | "svg" | "json") {
                return Err(err(format!(
                    "output.formats: unsupported format \"{format}\""
                )));
            }
        }
        Ok(())
    }

    /// Default scale grid for the scale study (absolute scales).
    pub fn scale_grid(scales: &Option<GridSpec>) -> Vec<f64> {
        scales
            .map(|g| g.values())
            .unwrap_or_else(default_scale_grid)
    }

    /// Canonical serialized form; its SHA-256 identifies the run.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn config_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses and validates a config document.
pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
        err(format!(
            "line {}, column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    config.validate()?;
    Ok(config)
}

/// Parses and validates a config file.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text)
}
