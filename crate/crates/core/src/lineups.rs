//! Lineup enumeration and group-level aggregation.
//!
//! Group means are taken over the lineups on which a strategy's allocation is
//! feasible; the feasible count for each strategy is reported next to it.
//! Lineups whose optimum is infeasible are counted and excluded entirely.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::allocator::{AllocError, Limits, Lineup5, LINEUP_SIZE};
use crate::behavior::ShootingProfile;
use crate::numfmt;
use crate::strategies::{compare, Strategy, StrategyError};

#[derive(Debug, Error, PartialEq)]
pub enum LineupError {
    #[error("group has {found} players, need at least {required}")]
    TooFewPlayers { found: usize, required: usize },
    #[error("no shooting profile for player `{0}`")]
    MissingProfile(String),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
}

/// Distinct player ids in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Lineup(Vec<String>);

impl Lineup {
    /// Canonicalizes (sorts) the ids; `None` if any id repeats.
    pub fn new(mut players: Vec<String>) -> Option<Self> {
        players.sort();
        let distinct = players.windows(2).all(|w| w[0] != w[1]);
        distinct.then_some(Self(players))
    }

    pub fn players(&self) -> &[String] {
        &self.0
    }

    pub fn label(&self) -> String {
        self.0.join("|")
    }
}

/// All `k`-player combinations, each sorted, in lexicographic order.
pub fn enumerate_lineups(player_ids: &BTreeSet<String>, k: usize) -> Result<Vec<Lineup>, LineupError> {
    if player_ids.len() < k {
        return Err(LineupError::TooFewPlayers { found: player_ids.len(), required: k });
    }
    // BTreeSet iterates ascending, and combinations preserve input order.
    Ok(player_ids.iter().cloned().combinations(k).map(Lineup).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestLineup {
    pub lineup: Lineup,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub payoff: f64,
}

/// One strategy's outcome on one lineup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineupRecord {
    pub lineup: Lineup,
    pub strategy: Strategy,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub payoff: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub group_size: usize,
    pub lineup_count: usize,
    pub infeasible_lineups: usize,
    #[serde(serialize_with = "numfmt::ser_f64_map")]
    pub per_strategy_mean_payoff: BTreeMap<Strategy, f64>,
    pub feasible_counts: BTreeMap<Strategy, usize>,
    pub best_lineup: Option<BestLineup>,
    /// `(optimal_mean - strategy_mean) / strategy_mean` for every non-optimal
    /// strategy with a positive mean.
    #[serde(serialize_with = "numfmt::ser_f64_map")]
    pub relative_gains: BTreeMap<Strategy, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupEvaluation {
    pub summary: GroupSummary,
    /// Lineup order, then strategy order within a lineup.
    pub records: Vec<LineupRecord>,
}

/// Pairwise summation; the result depends only on the order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

type Row = (Strategy, f64, bool);

/// Runs the strategy comparison on every five-player lineup of `group`.
pub fn evaluate_group(
    label: &str,
    profiles: &BTreeMap<String, ShootingProfile>,
    group: &BTreeSet<String>,
    limits: &Limits,
) -> Result<GroupEvaluation, LineupError> {
    if let Some(missing) = group.iter().find(|id| !profiles.contains_key(*id)) {
        return Err(LineupError::MissingProfile(missing.clone()));
    }
    let lineups = enumerate_lineups(group, LINEUP_SIZE)?;

    // Evaluation is parallel; collecting keeps lineup order, so every
    // reduction below is sequential and deterministic.
    let outcomes: Vec<Result<Option<Vec<Row>>, LineupError>> = lineups
        .par_iter()
        .map(|lineup| {
            let ps: Lineup5 = std::array::from_fn(|i| profiles[&lineup.players()[i]].clone());
            match compare(&ps, limits) {
                Ok(c) => {
                    let mut rows: Vec<_> = c.reports.iter().map(|r| (r.strategy, r.payoff, r.feasible)).collect();
                    rows.sort_by_key(|r| r.0);
                    Ok(Some(rows))
                }
                Err(StrategyError::Alloc(AllocError::InfeasibleLineup { .. })) => Ok(None),
                Err(e) => Err(e.into()),
            }
        })
        .collect();

    let mut records = Vec::new();
    let mut payoffs: BTreeMap<Strategy, Vec<f64>> = BTreeMap::new();
    let mut infeasible_lineups = 0;
    let mut best_lineup: Option<BestLineup> = None;
    for (lineup, outcome) in lineups.iter().zip(outcomes) {
        let Some(rows) = outcome? else {
            infeasible_lineups += 1;
            continue;
        };
        for (strategy, payoff, feasible) in rows {
            if feasible {
                payoffs.entry(strategy).or_default().push(payoff);
            }
            if strategy == Strategy::Optimal && best_lineup.as_ref().is_none_or(|b| payoff > b.payoff) {
                best_lineup = Some(BestLineup { lineup: lineup.clone(), payoff });
            }
            records.push(LineupRecord { lineup: lineup.clone(), strategy, payoff, feasible });
        }
    }

    let per_strategy_mean_payoff: BTreeMap<Strategy, f64> =
        payoffs.iter().map(|(s, v)| (*s, pairwise_sum(v) / v.len() as f64)).collect();
    let feasible_counts = payoffs.iter().map(|(s, v)| (*s, v.len())).collect();
    let relative_gains = match per_strategy_mean_payoff.get(&Strategy::Optimal) {
        Some(&opt) => per_strategy_mean_payoff
            .iter()
            .filter(|&(s, &m)| *s != Strategy::Optimal && m > 0.0)
            .map(|(s, &m)| (*s, (opt - m) / m))
            .collect(),
        None => BTreeMap::new(),
    };

    Ok(GroupEvaluation {
        summary: GroupSummary {
            group: label.to_string(),
            group_size: group.len(),
            lineup_count: lineups.len(),
            infeasible_lineups,
            per_strategy_mean_payoff,
            feasible_counts,
            best_lineup,
            relative_gains,
        },
        records,
    })
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
