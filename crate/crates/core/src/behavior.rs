//! Per-player shooting behavior: an affine map from usage to efficiency.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt;

/// Default minimum number of games needed to fit a profile.
pub const DEFAULT_MIN_GAMES: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum BehaviorError {
    #[error("player `{player_id}` has {found} usable games, need at least {required}")]
    InsufficientSamples { player_id: String, found: usize, required: usize },
    #[error("player `{player_id}` has identical usage in every game; slope is undetermined")]
    DegenerateFit { player_id: String },
    #[error("usage fraction {0} lies outside [0, 1]")]
    DomainError(f64),
    #[error("invalid profile for `{player_id}`: {reason}")]
    InvalidProfile { player_id: String, reason: String },
}

/// Fitted efficiency line `ts_pct = slope * fts + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingProfile {
    pub player_id: String,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub slope: f64,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub intercept: f64,
    pub n_games: usize,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub r_squared: f64,
}

impl ShootingProfile {
    /// A hand-specified profile. `n_games` is zero and `r_squared` is one,
    /// marking it as not derived from data.
    pub fn from_line(player_id: impl Into<String>, slope: f64, intercept: f64) -> Self {
        Self { player_id: player_id.into(), slope, intercept, n_games: 0, r_squared: 1.0 }
    }

    /// Efficiency at usage `x`. May be negative.
    pub fn efficiency_at(&self, x: f64) -> Result<f64, BehaviorError> {
        check_domain(x)?;
        Ok(self.efficiency(x))
    }

    /// Expected scoring contribution `x * efficiency(x)`.
    pub fn utility_at(&self, x: f64) -> Result<f64, BehaviorError> {
        check_domain(x)?;
        Ok(self.utility(x))
    }

    #[inline]
    pub(crate) fn efficiency(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    #[inline]
    pub(crate) fn utility(&self, x: f64) -> f64 {
        x * self.efficiency(x)
    }

    /// Marginal utility `2 * slope * x + intercept`.
    #[inline]
    pub fn marginal(&self, x: f64) -> f64 {
        2.0 * self.slope * x + self.intercept
    }

    /// True when efficiency does not fall with usage, contrary to the usual
    /// inverse relationship.
    pub fn is_non_decreasing(&self) -> bool {
        self.slope >= 0.0
    }

    /// Checks the invariants a profile loaded from a file must satisfy.
    pub fn validate(&self) -> Result<(), BehaviorError> {
        let bad =
            |reason: &str| BehaviorError::InvalidProfile { player_id: self.player_id.clone(), reason: reason.into() };
        if !self.slope.is_finite() || !self.intercept.is_finite() {
            return Err(bad("slope and intercept must be finite"));
        }
        if !(0.0..=1.0).contains(&self.r_squared) {
            return Err(bad("r_squared must lie in [0, 1]"));
        }
        if self.n_games == 1 {
            return Err(bad("a fitted profile needs at least two games"));
        }
        Ok(())
    }
}

fn check_domain(x: f64) -> Result<(), BehaviorError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(BehaviorError::DomainError(x))
    }
}

/// Ordinary least squares of `ts_pct` on `fts`.
///
/// `samples` are `(fts, ts_pct)` pairs; at least `min_games` (and never fewer
/// than two) are required, with at least two distinct `fts` values.
pub fn fit_profile(
    player_id: &str,
    samples: &[(f64, f64)],
    min_games: usize,
) -> Result<ShootingProfile, BehaviorError> {
    let required = min_games.max(2);
    if samples.len() < required {
        return Err(BehaviorError::InsufficientSamples {
            player_id: player_id.to_string(),
            found: samples.len(),
            required,
        });
    }

    // Sorting first makes the accumulated sums independent of input order.
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let n = sorted.len() as f64;
    let mean_x = sorted.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_y = sorted.iter().map(|s| s.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &sorted {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let spread = sorted.last().unwrap().0 - sorted[0].0;
    if spread == 0.0 || sxx <= 0.0 {
        return Err(BehaviorError::DegenerateFit { player_id: player_id.to_string() });
    }

    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = sorted.iter().map(|&(x, y)| (y - (slope * x + intercept)).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };

    Ok(ShootingProfile { player_id: player_id.to_string(), slope, intercept, n_games: sorted.len(), r_squared })
}
