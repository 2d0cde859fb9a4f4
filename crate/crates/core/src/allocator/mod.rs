//! Shot-share allocation for a five-player lineup.
//!
//! The team payoff is `F(x) = sum_i x_i * (slope_i * x_i + intercept_i)`,
//! maximized over shares that sum to one, each capped at [`Limits::shot_cap`]
//! and each keeping its own utility non-negative. The last condition is folded
//! into a per-player upper bound (see [`effective_upper_bound`]), so the
//! feasible set is the intersection of a box with the simplex.
//!
//! When every slope is negative the objective is strictly concave and
//! [`solve_optimal`] uses clamped water-filling on the common marginal. Any
//! flat or increasing profile routes to an exact active-set enumeration.
//! [`grid_oracle`] searches a lattice of shares independently of both.

mod active_set;
mod grid;
mod waterfill;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::behavior::ShootingProfile;
use crate::numfmt;

pub use active_set::solve_by_enumeration;
pub use grid::grid_oracle;
pub use waterfill::{water_fill, WaterFill};

/// Players on the floor.
pub const LINEUP_SIZE: usize = 5;

/// Default per-player share cap.
pub const DEFAULT_SHOT_CAP: f64 = 0.40;

/// Tolerance on the sum-to-one constraint.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Tolerance on per-player non-negative utility.
pub const UTILITY_TOLERANCE: f64 = 1e-9;

/// Payoff differences at or below this are treated as ties.
pub(crate) const TIE_TOLERANCE: f64 = 1e-12;

pub type Lineup5 = [ShootingProfile; LINEUP_SIZE];

#[derive(Debug, Error, PartialEq)]
pub enum AllocError {
    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),
    #[error("lineup is infeasible: usable share bounds sum to {bound_sum:.6} < 1")]
    InfeasibleLineup { bound_sum: f64 },
    #[error("grid step {0} must be positive and divide 1 evenly")]
    InvalidGridStep(f64),
    #[error("invalid limits: {0}")]
    InvalidLimits(String),
}

/// Model constraints shared by the solvers and strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub shot_cap: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self { shot_cap: DEFAULT_SHOT_CAP }
    }
}

impl Limits {
    pub fn new(shot_cap: f64) -> Result<Self, AllocError> {
        let limits = Self { shot_cap };
        limits.validate()?;
        Ok(limits)
    }

    pub fn validate(&self) -> Result<(), AllocError> {
        if !(self.shot_cap > 0.0 && self.shot_cap <= 1.0) {
            return Err(AllocError::InvalidLimits(format!("shot cap {} outside (0, 1]", self.shot_cap)));
        }
        if self.shot_cap * (LINEUP_SIZE as f64) < 1.0 - SUM_TOLERANCE {
            return Err(AllocError::InvalidLimits(format!(
                "shot cap {} leaves every lineup infeasible",
                self.shot_cap
            )));
        }
        Ok(())
    }
}

/// Shot shares aligned to a lineup's player order.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(transparent)]
pub struct Allocation(pub [f64; LINEUP_SIZE]);

impl Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        numfmt::ser_f64_slice(&self.0, serializer)
    }
}

impl Allocation {
    pub fn shares(&self) -> &[f64; LINEUP_SIZE] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Checks the sum-to-one and box constraints.
    pub fn check(&self, limits: &Limits) -> Result<(), AllocError> {
        if self.0.iter().any(|x| !x.is_finite()) {
            return Err(AllocError::InvalidAllocation("non-finite share".into()));
        }
        if (self.sum() - 1.0).abs() > SUM_TOLERANCE {
            return Err(AllocError::InvalidAllocation(format!("shares sum to {}", self.sum())));
        }
        if let Some(x) = self.0.iter().find(|&&x| x < 0.0 || x > limits.shot_cap) {
            return Err(AllocError::InvalidAllocation(format!("share {x} outside [0, {}]", limits.shot_cap)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundFlag {
    Free,
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub allocation: Allocation,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub payoff: f64,
    #[serde(serialize_with = "numfmt::ser_f64_slice")]
    pub per_player_utility: [f64; LINEUP_SIZE],
    /// Common marginal utility of the unclamped players, when one is defined.
    #[serde(serialize_with = "numfmt::ser_opt_f64")]
    pub multiplier: Option<f64>,
    pub status: SolveStatus,
    pub active_bounds: [BoundFlag; LINEUP_SIZE],
}

impl SolveReport {
    pub(crate) fn build(profiles: &Lineup5, x: [f64; LINEUP_SIZE], multiplier: Option<f64>, limits: &Limits) -> Self {
        let per_player_utility: [f64; LINEUP_SIZE] = std::array::from_fn(|i| profiles[i].utility(x[i]));
        let active_bounds = std::array::from_fn(|i| {
            let upper = effective_upper_bound(&profiles[i], limits);
            if x[i] <= TIE_TOLERANCE {
                BoundFlag::Lower
            } else if x[i] >= upper - TIE_TOLERANCE {
                BoundFlag::Upper
            } else {
                BoundFlag::Free
            }
        });
        Self {
            allocation: Allocation(x),
            payoff: per_player_utility.iter().sum(),
            per_player_utility,
            multiplier,
            status: SolveStatus::Optimal,
            active_bounds,
        }
    }
}

/// `F = sum_i x_i f_i(x_i)` for a feasible allocation.
pub fn team_payoff(profiles: &Lineup5, alloc: &Allocation, limits: &Limits) -> Result<f64, AllocError> {
    alloc.check(limits)?;
    Ok(payoff_unchecked(profiles, alloc))
}

pub(crate) fn payoff_unchecked(profiles: &Lineup5, alloc: &Allocation) -> f64 {
    profiles.iter().zip(alloc.0).map(|(p, x)| p.utility(x)).sum()
}

/// Largest `u` in `[0, shot_cap]` with non-negative utility on all of `[0, u]`.
pub fn effective_upper_bound(profile: &ShootingProfile, limits: &Limits) -> f64 {
    let cap = limits.shot_cap;
    let (slope, intercept) = (profile.slope, profile.intercept);
    if intercept <= 0.0 {
        // f(0) <= 0: only a strictly positive intercept or a flat zero line keeps
        // utility non-negative just above zero.
        if intercept == 0.0 && slope >= 0.0 {
            cap
        } else {
            0.0
        }
    } else if slope >= 0.0 {
        cap
    } else {
        cap.min(-intercept / slope)
    }
}

/// Maximizes the team payoff over feasible allocations.
pub fn solve_optimal(profiles: &Lineup5, limits: &Limits) -> Result<SolveReport, AllocError> {
    limits.validate()?;
    let upper: [f64; LINEUP_SIZE] = std::array::from_fn(|i| effective_upper_bound(&profiles[i], limits));
    let bound_sum: f64 = upper.iter().sum();
    if bound_sum < 1.0 - SUM_TOLERANCE {
        return Err(AllocError::InfeasibleLineup { bound_sum });
    }

    if profiles.iter().all(|p| p.slope < 0.0) {
        // marginal 2 a x + b = lambda  =>  x = (b - lambda) / (2|a|)
        let levels = profiles.each_ref().map(|p| p.intercept);
        let rates = profiles.each_ref().map(|p| 1.0 / (-2.0 * p.slope));
        let fill = water_fill(&levels, &rates, &upper, 1.0);
        let x: [f64; LINEUP_SIZE] = fill.shares.try_into().expect("five shares");
        Ok(SolveReport::build(profiles, x, Some(fill.level), limits))
    } else {
        solve_by_enumeration(profiles, limits)
    }
}
