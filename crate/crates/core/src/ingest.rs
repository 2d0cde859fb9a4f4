//! Game-log ingestion and per-game shooting metrics.
//!
//! Input is a CSV with the exact header
//! `player_id,game_id,minutes,started,fga,fta,points`. Team totals for a game
//! are summed over every row carrying that `game_id`, so a file must contain a
//! row for every rostered player in every game it covers (a zero-minute row for
//! players who did not appear).

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numfmt;

/// Expected CSV header, in order.
pub const HEADER: [&str; 7] = ["player_id", "game_id", "minutes", "started", "fga", "fta", "points"];

/// Length of a regulation game in minutes.
pub const REGULATION_MINUTES: f64 = 48.0;

/// Weight applied to free-throw attempts in the true-shooting denominator.
pub const FREE_THROW_WEIGHT: f64 = 0.44;

/// Hard sanity cap on minutes in a single game.
pub const MAX_MINUTES: f64 = 96.0;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("malformed header: expected `{}`, found `{found}`", HEADER.join(","))]
    MalformedHeader { found: String },
    #[error("malformed row {index}: {reason}")]
    MalformedRow { index: usize, reason: String },
    #[error("duplicate row for player `{player_id}` in game `{game_id}`")]
    DuplicatePlayerGame { player_id: String, game_id: String },
    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),
    #[error("dataset is empty")]
    EmptyDataset,
}

/// One player's box-score line for one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameLogRow {
    pub player_id: String,
    pub game_id: String,
    pub minutes: f64,
    pub started: bool,
    pub fga: u32,
    pub fta: u32,
    pub points: u32,
}

impl GameLogRow {
    pub fn total_shots(&self) -> u32 {
        self.fga + self.fta
    }
}

/// Derived per-game metrics for one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerGameMetrics {
    pub player_id: String,
    pub game_id: String,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub ts_pct: f64,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub fts: f64,
    pub total_shots: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    ZeroMinutes,
    UndefinedTrueShooting,
    ZeroTeamShots,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedGame {
    pub player_id: String,
    pub game_id: String,
    pub reason: SkipReason,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsOutput {
    /// Sorted by `(player_id, game_id)`.
    pub metrics: Vec<PlayerGameMetrics>,
    pub skipped: Vec<SkippedGame>,
}

/// Constants behind the two per-game formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub ft_weight: f64,
    pub regulation_minutes: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self { ft_weight: FREE_THROW_WEIGHT, regulation_minutes: REGULATION_MINUTES }
    }
}

impl MetricConfig {
    /// `0.5 * points / (fga + ft_weight * fta)`.
    pub fn true_shooting_pct(&self, points: u32, fga: u32, fta: u32) -> Result<f64, IngestError> {
        let denom = f64::from(fga) + self.ft_weight * f64::from(fta);
        if denom <= 0.0 {
            return Err(IngestError::UndefinedMetric("no field-goal or free-throw attempts"));
        }
        Ok(0.5 * f64::from(points) / denom)
    }

    /// Share of team shots scaled to a full regulation game.
    pub fn fraction_team_shots(
        &self,
        player_shots: u32,
        team_shots: u32,
        player_minutes: f64,
    ) -> Result<f64, IngestError> {
        if team_shots == 0 {
            return Err(IngestError::UndefinedMetric("team took no shots"));
        }
        if player_minutes <= 0.0 {
            return Err(IngestError::UndefinedMetric("player logged no minutes"));
        }
        let share = f64::from(player_shots) / f64::from(team_shots);
        Ok(share * (self.regulation_minutes / player_minutes))
    }

    /// Computes metrics for every row whose metrics are defined.
    ///
    /// Rows with zero minutes or an undefined true-shooting percentage are
    /// reported in [`MetricsOutput::skipped`].
    pub fn compute_metrics(&self, rows: &[GameLogRow]) -> Result<MetricsOutput, IngestError> {
        if rows.is_empty() {
            return Err(IngestError::EmptyDataset);
        }
        let mut team_shots: HashMap<&str, u32> = HashMap::new();
        for row in rows {
            *team_shots.entry(row.game_id.as_str()).or_default() += row.total_shots();
        }

        let mut out = MetricsOutput::default();
        for row in rows {
            let skip = |reason| SkippedGame { player_id: row.player_id.clone(), game_id: row.game_id.clone(), reason };
            if row.minutes <= 0.0 {
                out.skipped.push(skip(SkipReason::ZeroMinutes));
                continue;
            }
            let Ok(ts_pct) = self.true_shooting_pct(row.points, row.fga, row.fta) else {
                out.skipped.push(skip(SkipReason::UndefinedTrueShooting));
                continue;
            };
            let team = team_shots[row.game_id.as_str()];
            let Ok(fts) = self.fraction_team_shots(row.total_shots(), team, row.minutes) else {
                out.skipped.push(skip(SkipReason::ZeroTeamShots));
                continue;
            };
            out.metrics.push(PlayerGameMetrics {
                player_id: row.player_id.clone(),
                game_id: row.game_id.clone(),
                ts_pct,
                fts,
                total_shots: row.total_shots(),
            });
        }
        out.metrics.sort_by(|a, b| (&a.player_id, &a.game_id).cmp(&(&b.player_id, &b.game_id)));
        out.skipped.sort_by(|a, b| (&a.player_id, &a.game_id).cmp(&(&b.player_id, &b.game_id)));
        Ok(out)
    }
}

/// Parses game logs. Row indices in errors count data records from 1.
pub fn parse_game_logs<R: Read>(source: R) -> Result<Vec<GameLogRow>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(source);
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(IngestError::MalformedHeader { found: e.to_string() }),
        None => return Err(IngestError::MalformedHeader { found: String::new() }),
    };
    if header.iter().map(str::trim).ne(HEADER.iter().copied()) {
        return Err(IngestError::MalformedHeader { found: header.iter().collect::<Vec<_>>().join(",") });
    }

    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, record) in records.enumerate() {
        let index = i + 1;
        let record = record.map_err(|e| IngestError::MalformedRow { index, reason: e.to_string() })?;
        let row = parse_record(&record).map_err(|reason| IngestError::MalformedRow { index, reason })?;
        if !seen.insert((row.player_id.clone(), row.game_id.clone())) {
            return Err(IngestError::DuplicatePlayerGame { player_id: row.player_id, game_id: row.game_id });
        }
        rows.push(row);
    }
    Ok(rows)
}

fn parse_record(record: &csv::StringRecord) -> Result<GameLogRow, String> {
    if record.len() != HEADER.len() {
        return Err(format!("expected {} fields, found {}", HEADER.len(), record.len()));
    }
    let field = |i: usize| record[i].trim();
    let count = |i: usize| -> Result<u32, String> {
        field(i).parse::<u32>().map_err(|_| format!("{} must be a non-negative integer, got `{}`", HEADER[i], field(i)))
    };

    let player_id = field(0).to_string();
    let game_id = field(1).to_string();
    if player_id.is_empty() || game_id.is_empty() {
        return Err("player_id and game_id must be non-empty".into());
    }
    let minutes: f64 = field(2).parse().map_err(|_| format!("minutes is not a number: `{}`", field(2)))?;
    if !minutes.is_finite() || !(0.0..=MAX_MINUTES).contains(&minutes) {
        return Err(format!("minutes must lie in [0, {MAX_MINUTES}], got {minutes}"));
    }
    let started = match field(3) {
        "0" => false,
        "1" => true,
        other => return Err(format!("started must be 0 or 1, got `{other}`")),
    };
    Ok(GameLogRow { player_id, game_id, minutes, started, fga: count(4)?, fta: count(5)?, points: count(6)? })
}

/// Which participation count a group is selected on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKind {
    /// Games started.
    Starters,
    /// Games with minutes played.
    Roster,
}

impl std::fmt::Display for GroupKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GroupKind::Starters => "starters",
            GroupKind::Roster => "roster",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupCriterion {
    pub kind: GroupKind,
    threshold: u32,
}

impl GroupCriterion {
    /// Returns `None` for a zero threshold.
    pub fn new(kind: GroupKind, threshold: u32) -> Option<Self> {
        (threshold >= 1).then_some(Self { kind, threshold })
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }
}

/// Players meeting `criterion`. Counts are inclusive: a threshold of 30
/// admits a player with exactly 30 qualifying games.
pub fn filter_group(rows: &[GameLogRow], criterion: GroupCriterion) -> BTreeSet<String> {
    let mut counts: BTreeMap<&str, u32> = BTreeMap::new();
    for row in rows {
        let hit = match criterion.kind {
            GroupKind::Starters => row.started,
            GroupKind::Roster => row.minutes > 0.0,
        };
        if hit {
            *counts.entry(row.player_id.as_str()).or_default() += 1;
        }
    }
    counts.into_iter().filter(|&(_, n)| n >= criterion.threshold).map(|(id, _)| id.to_string()).collect()
}
