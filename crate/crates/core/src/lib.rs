//! Shot-share optimization for basketball lineups.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`ingest`] parses per-game box-score lines and derives true shooting
//!    percentage and fraction of team shots for every player-game.
//! 2. [`behavior`] fits each player's affine efficiency-vs-usage line.
//! 3. [`allocator`] maximizes the team payoff `F = sum x_i f_i(x_i)` over the
//!    capped simplex with an exact water-filling solver, backed by a grid
//!    oracle for verification.
//! 4. [`strategies`] evaluates heuristic shot distributions and the
//!    equal-efficiency equilibrium against the optimum, and hosts the
//!    two-link routing demonstration.
//! 5. [`lineups`] enumerates every five-player combination of a group and
//!    aggregates the comparison.
//!
//! [`cli`] wires the stages into the `shotflow` command-line tool.

pub mod allocator;
pub mod behavior;
pub mod cli;
pub mod ingest;
pub mod lineups;
pub mod numfmt;
pub mod strategies;

pub use allocator::{Allocation, Limits, SolveReport, LINEUP_SIZE};
pub use behavior::ShootingProfile;
pub use ingest::{GameLogRow, MetricConfig, PlayerGameMetrics};
pub use lineups::{GroupSummary, Lineup};
pub use strategies::{Strategy, StrategyReport};
