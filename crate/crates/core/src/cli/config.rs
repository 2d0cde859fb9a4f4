use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::allocator::{Limits, DEFAULT_SHOT_CAP, LINEUP_SIZE};
use crate::behavior::DEFAULT_MIN_GAMES;
use crate::ingest::{MetricConfig, FREE_THROW_WEIGHT, REGULATION_MINUTES};

pub const DEFAULT_STARTERS_THRESHOLD: u32 = 30;
pub const DEFAULT_ROSTER_THRESHOLD: u32 = 10;
pub const DEFAULT_GRID_STEP: f64 = 0.005;

/// Every tunable constant of a run. Read from TOML; missing keys take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub shot_cap: f64,
    pub ft_weight: f64,
    pub regulation_minutes: f64,
    pub min_games_fit: usize,
    pub starters_threshold: u32,
    pub roster_threshold: u32,
    pub grid_step: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            shot_cap: DEFAULT_SHOT_CAP,
            ft_weight: FREE_THROW_WEIGHT,
            regulation_minutes: REGULATION_MINUTES,
            min_games_fit: DEFAULT_MIN_GAMES,
            starters_threshold: DEFAULT_STARTERS_THRESHOLD,
            roster_threshold: DEFAULT_ROSTER_THRESHOLD,
            grid_step: DEFAULT_GRID_STEP,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.shot_cap > 0.0 && self.shot_cap <= 1.0) {
            return Err(format!("shot_cap must lie in (0, 1], got {}", self.shot_cap));
        }
        if self.shot_cap * (LINEUP_SIZE as f64) < 1.0 {
            return Err(format!("shot_cap {} makes every lineup infeasible", self.shot_cap));
        }
        if !(self.ft_weight >= 0.0 && self.ft_weight.is_finite()) {
            return Err(format!("ft_weight must be non-negative, got {}", self.ft_weight));
        }
        if !(self.regulation_minutes > 0.0 && self.regulation_minutes.is_finite()) {
            return Err(format!("regulation_minutes must be positive, got {}", self.regulation_minutes));
        }
        if self.min_games_fit < 1 || self.starters_threshold < 1 || self.roster_threshold < 1 {
            return Err("game thresholds must be at least 1".into());
        }
        let units = (1.0 / self.grid_step).round();
        if !(self.grid_step > 0.0 && self.grid_step <= 1.0) || (units * self.grid_step - 1.0).abs() > 1e-9 {
            return Err(format!("grid_step must divide 1 evenly, got {}", self.grid_step));
        }
        Ok(())
    }

    pub fn limits(&self) -> Limits {
        Limits { shot_cap: self.shot_cap }
    }

    pub fn metrics(&self) -> MetricConfig {
        MetricConfig { ft_weight: self.ft_weight, regulation_minutes: self.regulation_minutes }
    }
}
