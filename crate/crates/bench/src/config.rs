//! Run configuration: a TOML file with sections mirroring the simulator
//! settings, overridable from the command line. Angles are in degrees.

use std::fs;
use std::path::{Path, PathBuf};

use featnav_core::sim::{EpisodeSetup, LayoutParams, Mode, ScenarioKind, SimConfig};
use featnav_core::{FieldParams, LambdaSchedule};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub kind: ScenarioKind,
    /// Layout seed; trial `i` runs with `seed + i`.
    pub seed: u64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::CorridorGap,
            seed: 0,
        }
    }
}

/// Field parameters as written in the file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    pub lambda: f64,
    pub theta_cs_deg: f64,
    pub radius_px: f64,
    pub spread_px: f64,
}

impl Default for FieldSection {
    fn default() -> Self {
        let d = FieldParams::<f64>::simulation_defaults();
        Self {
            lambda: d.lambda,
            theta_cs_deg: d.theta_cs_hat.to_degrees().round(),
            radius_px: d.dead_radius,
            spread_px: d.spread,
        }
    }
}

impl FieldSection {
    pub fn params(&self) -> Result<FieldParams<f64>, ConfigError> {
        FieldParams::new(self.lambda, self.theta_cs_deg.to_radians(), self.radius_px, self.spread_px)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    pub mode: Mode,
    pub field: FieldSection,
    pub schedule: LambdaSchedule<f64>,
    pub sim: SimConfig,
    pub layout: LayoutParams,
    pub trials: usize,
    pub out: PathBuf,
    /// Worker threads; 0 picks one per core.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioSection::default(),
            mode: Mode::ActiveFixed,
            field: FieldSection::default(),
            schedule: LambdaSchedule::default(),
            sim: SimConfig::default(),
            layout: LayoutParams::default(),
            trials: 1,
            out: PathBuf::from("out"),
            workers: 0,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scenario: Option<ScenarioKind>,
    pub mode: Option<Mode>,
    pub lambda: Option<f64>,
    pub theta_cs_deg: Option<f64>,
    pub radius_px: Option<f64>,
    pub spread_px: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    /// File values (or defaults without a file) with overrides applied, validated.
    pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = o.scenario {
            self.scenario.kind = k;
        }
        if let Some(m) = o.mode {
            self.mode = m;
        }
        if let Some(v) = o.lambda {
            self.field.lambda = v;
        }
        if let Some(v) = o.theta_cs_deg {
            self.field.theta_cs_deg = v;
        }
        if let Some(v) = o.radius_px {
            self.field.radius_px = v;
        }
        if let Some(v) = o.spread_px {
            self.field.spread_px = v;
        }
        if let Some(v) = o.trials {
            self.trials = v;
        }
        if let Some(v) = o.seed {
            self.scenario.seed = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        self.field.params()?;
        self.schedule
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.sim.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if !(self.layout.rich_density >= 0.0 && self.layout.gap_width >= 0.0 && self.layout.seam_width >= 0.0) {
            return Err(ConfigError::Invalid("layout sizes must be non-negative".into()));
        }
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.scenario.seed.wrapping_add(trial as u64)
    }

    /// Episode setup for one trial. Call after `validate`.
    pub fn setup(&self, trial: usize) -> EpisodeSetup {
        let mut setup = EpisodeSetup::new(self.mode, self.trial_seed(trial));
        setup.field = self.field.params().expect("validated field section");
        setup.schedule = self.schedule;
        setup.sim = self.sim;
        setup
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
