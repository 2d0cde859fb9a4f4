//! Shot-distribution strategies compared against the optimum.
//!
//! Four heuristics are evaluated next to [`solve_optimal`]:
//!
//! * **star feed** gives the cap to the highest-intercept player and splits
//!   the rest evenly,
//! * **equal shots** gives every player a fifth,
//! * **equal utility** finds the shares at which every player contributes the
//!   same expected points,
//! * **nash** equalizes efficiency across players, the selfish outcome where
//!   no possession gains by switching shooters.
//!
//! Heuristic reports are produced even when they violate a constraint; the
//! violation is listed rather than hidden.

mod braess;
mod poa;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::allocator::{
    effective_upper_bound, payoff_unchecked, solve_optimal, AllocError, Allocation, Limits, Lineup5, SolveReport,
    LINEUP_SIZE, SUM_TOLERANCE, UTILITY_TOLERANCE,
};
use crate::behavior::ShootingProfile;
use crate::numfmt;

pub use braess::{braess_equilibrium, braess_optimal, BraessOutcome, TwoLinkNetwork};
pub use poa::{price_of_anarchy, PoaConvention, PoaMetrics};

/// Absolute tolerance on the equal-utility bisection residual `sum(x) - 1`.
pub const EQUAL_UTILITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("no common utility gives shares summing to one inside every player's bounds")]
    NoEqualUtilitySolution,
    #[error("equal-efficiency equilibrium undefined: player `{0}` has non-negative slope")]
    NashUndefined(String),
    #[error("equilibrium payoff {0} is not positive; ratio undefined")]
    DegenerateNash(f64),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error(transparent)]
    Alloc(#[from] AllocError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Optimal,
    StarFeed,
    EqualShots,
    EqualUtility,
    Nash,
}

impl Strategy {
    pub const ALL: [Strategy; 5] =
        [Strategy::Optimal, Strategy::StarFeed, Strategy::EqualShots, Strategy::EqualUtility, Strategy::Nash];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Optimal => "optimal",
            Strategy::StarFeed => "star_feed",
            Strategy::EqualShots => "equal_shots",
            Strategy::EqualUtility => "equal_utility",
            Strategy::Nash => "nash",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Constraint labels used in [`StrategyReport::violated_constraints`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Shares sum to one.
    SharesSumToOne,
    /// Every share lies in `[0, shot_cap]`.
    ShareCap,
    /// Every player's utility is non-negative.
    NonNegativeUtility,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub allocation: Allocation,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub payoff: f64,
    pub feasible: bool,
    pub violated_constraints: Vec<Constraint>,
}

impl StrategyReport {
    pub fn evaluate(strategy: Strategy, profiles: &Lineup5, allocation: Allocation, limits: &Limits) -> Self {
        let violated_constraints = violations(profiles, &allocation, limits);
        Self {
            strategy,
            payoff: payoff_unchecked(profiles, &allocation),
            allocation,
            feasible: violated_constraints.is_empty(),
            violated_constraints,
        }
    }

    pub fn from_solve(profiles: &Lineup5, report: &SolveReport, limits: &Limits) -> Self {
        Self::evaluate(Strategy::Optimal, profiles, report.allocation, limits)
    }
}

/// Constraints the allocation breaks, in declaration order.
pub fn violations(profiles: &Lineup5, allocation: &Allocation, limits: &Limits) -> Vec<Constraint> {
    let x = allocation.shares();
    let mut out = Vec::new();
    if (allocation.sum() - 1.0).abs() > SUM_TOLERANCE {
        out.push(Constraint::SharesSumToOne);
    }
    if x.iter().any(|&v| !(0.0..=limits.shot_cap).contains(&v)) {
        out.push(Constraint::ShareCap);
    }
    if profiles.iter().zip(x).any(|(p, &v)| p.utility(v) < -UTILITY_TOLERANCE) {
        out.push(Constraint::NonNegativeUtility);
    }
    out
}

/// Index of the highest-intercept player, ties to the smallest player id.
fn star_index(profiles: &Lineup5) -> usize {
    (0..LINEUP_SIZE)
        .max_by(|&a, &b| {
            profiles[a]
                .intercept
                .total_cmp(&profiles[b].intercept)
                .then_with(|| profiles[b].player_id.cmp(&profiles[a].player_id))
        })
        .expect("non-empty lineup")
}

/// The best shooter takes the cap; the other four split the remainder evenly.
pub fn star_feed(profiles: &Lineup5, limits: &Limits) -> StrategyReport {
    let star = star_index(profiles);
    let rest = (1.0 - limits.shot_cap) / (LINEUP_SIZE - 1) as f64;
    let x = std::array::from_fn(|i| if i == star { limits.shot_cap } else { rest });
    StrategyReport::evaluate(Strategy::StarFeed, profiles, Allocation(x), limits)
}

pub fn equal_shots(profiles: &Lineup5, limits: &Limits) -> StrategyReport {
    let x = [1.0 / LINEUP_SIZE as f64; LINEUP_SIZE];
    StrategyReport::evaluate(Strategy::EqualShots, profiles, Allocation(x), limits)
}

/// Usage range over which a player's utility rises from zero with the
/// smallest root, and the utility reached at its end.
fn utility_reach(p: &ShootingProfile, limits: &Limits) -> (f64, f64) {
    let upper = effective_upper_bound(p, limits);
    if upper == 0.0 || p.intercept <= 0.0 {
        return (0.0, 0.0);
    }
    let top = if p.slope < 0.0 { upper.min(p.intercept / (-2.0 * p.slope)) } else { upper };
    (top, p.utility(top))
}

/// Smallest non-negative share with `slope x^2 + intercept x = u`, for
/// `0 <= u <=` the player's reach.
fn share_for_utility(p: &ShootingProfile, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let disc = (p.intercept * p.intercept + 4.0 * p.slope * u).max(0.0);
    // rationalized root, stable for slope -> 0
    2.0 * u / (p.intercept + disc.sqrt())
}

/// Every player contributes the same utility; shares sum to one.
pub fn equal_utility(profiles: &Lineup5, limits: &Limits) -> Result<StrategyReport, StrategyError> {
    let reach: Vec<(f64, f64)> = profiles.iter().map(|p| utility_reach(p, limits)).collect();
    let u_max = reach.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    if u_max <= 0.0 {
        return Err(StrategyError::NoEqualUtilitySolution);
    }
    let shares =
        |u: f64| -> [f64; LINEUP_SIZE] { std::array::from_fn(|i| share_for_utility(&profiles[i], u).min(reach[i].0)) };
    let total = |u: f64| shares(u).iter().sum::<f64>();
    if total(u_max) < 1.0 - EQUAL_UTILITY_TOLERANCE {
        return Err(StrategyError::NoEqualUtilitySolution);
    }

    let (mut lo, mut hi) = (0.0, u_max);
    let mut u = hi;
    for _ in 0..200 {
        u = 0.5 * (lo + hi);
        let s = total(u);
        if (s - 1.0).abs() <= EQUAL_UTILITY_TOLERANCE {
            break;
        }
        if s < 1.0 {
            lo = u;
        } else {
            hi = u;
        }
    }
    Ok(StrategyReport::evaluate(Strategy::EqualUtility, profiles, Allocation(shares(u)), limits))
}

/// Equal-efficiency equilibrium: all used players shoot at the same TS%,
/// shares clamped to `[0, shot_cap]`.
pub fn nash_equal_efficiency(profiles: &Lineup5, limits: &Limits) -> Result<StrategyReport, StrategyError> {
    if let Some(p) = profiles.iter().find(|p| p.slope >= 0.0) {
        return Err(StrategyError::NashUndefined(p.player_id.clone()));
    }
    // a x + b = mu  =>  x = (b - mu) / |a|
    let levels = profiles.each_ref().map(|p| p.intercept);
    let rates = profiles.each_ref().map(|p| -1.0 / p.slope);
    let caps = [limits.shot_cap; LINEUP_SIZE];
    let fill = crate::allocator::water_fill(&levels, &rates, &caps, 1.0);
    let x: [f64; LINEUP_SIZE] = fill.shares.try_into().expect("five shares");
    Ok(StrategyReport::evaluate(Strategy::Nash, profiles, Allocation(x), limits))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedStrategy {
    pub strategy: Strategy,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    /// Sorted by payoff descending, ties by strategy name.
    pub reports: Vec<StrategyReport>,
    pub skipped: Vec<SkippedStrategy>,
    pub optimal: SolveReport,
    pub poa: Option<PoaMetrics>,
}

impl Comparison {
    pub fn get(&self, strategy: Strategy) -> Option<&StrategyReport> {
        self.reports.iter().find(|r| r.strategy == strategy)
    }
}

/// Runs every strategy on one lineup.
pub fn compare(profiles: &Lineup5, limits: &Limits) -> Result<Comparison, StrategyError> {
    let optimal = solve_optimal(profiles, limits)?;
    let mut reports = vec![
        StrategyReport::from_solve(profiles, &optimal, limits),
        star_feed(profiles, limits),
        equal_shots(profiles, limits),
    ];
    let mut skipped = Vec::new();
    let mut poa = None;
    match equal_utility(profiles, limits) {
        Ok(r) => reports.push(r),
        Err(e) => skipped.push(SkippedStrategy { strategy: Strategy::EqualUtility, reason: e.to_string() }),
    }
    match nash_equal_efficiency(profiles, limits) {
        Ok(r) => {
            poa = Some(price_of_anarchy(&r, &optimal));
            reports.push(r);
        }
        Err(e) => skipped.push(SkippedStrategy { strategy: Strategy::Nash, reason: e.to_string() }),
    }
    sort_reports(&mut reports);
    Ok(Comparison { reports, skipped, optimal, poa })
}

/// Payoffs are compared on a 1e-9 lattice so that round-off never reorders
/// strategies that coincide.
pub(crate) fn sort_reports(reports: &mut [StrategyReport]) {
    let key = |r: &StrategyReport| (r.payoff * 1e9).round();
    reports.sort_by(|a, b| match key(b).total_cmp(&key(a)) {
        Ordering::Equal => a.strategy.name().cmp(b.strategy.name()),
        o => o,
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn lineup(lines: [(f64, f64); 5]) -> Lineup5 {
        std::array::from_fn(|i| ShootingProfile::from_line(format!("p{i}"), lines[i].0, lines[i].1))
    }

    fn flat_star() -> Lineup5 {
        lineup([(0.0, 0.7), (-1.0, 0.5), (-1.0, 0.5), (-1.0, 0.5), (-1.0, 0.5)])
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn star_feed_flat_star() {
        let r = star_feed(&flat_star(), &Limits::default());
        assert!(close(&r.allocation.0, &[0.4, 0.15, 0.15, 0.15, 0.15], 1e-15));
        assert!(r.feasible);
        assert!((r.payoff - 0.49).abs() < 1e-12);
    }

    #[test]
    fn star_feed_ties_go_to_smallest_id() {
        let mut ps = lineup([(-0.5, 0.6); 5]);
        ps.swap(0, 3); // p3 now first, p0 fourth
        let r = star_feed(&ps, &Limits::default());
        assert_eq!(r.allocation.0[3], 0.4);
    }

    #[test]
    fn star_feed_negative_utility_flagged() {
        let ps = lineup([(-2.0, 0.7), (-1.0, 0.5), (-1.0, 0.5), (-1.0, 0.5), (-1.0, 0.5)]);
        let r = star_feed(&ps, &Limits::default());
        assert!(!r.feasible);
        assert_eq!(r.violated_constraints, vec![Constraint::NonNegativeUtility]);
        // 0.4 * (0.7 - 0.8) + 4 * 0.15 * 0.35
        assert!((r.payoff - (-0.04 + 0.21)).abs() < 1e-12);
    }

    #[test]
    fn equal_shots_cases() {
        let lim = Limits::default();
        let r = equal_shots(&lineup([(-0.5, 0.6); 5]), &lim);
        assert!(r.feasible);
        assert!((r.payoff - 0.5).abs() < 1e-12);

        let r = equal_shots(&lineup([(-1.0, 0.1), (-0.5, 0.6), (-0.5, 0.6), (-0.5, 0.6), (-0.5, 0.6)]), &lim);
        assert!(!r.feasible);
        assert!(r.violated_constraints.contains(&Constraint::NonNegativeUtility));
        assert!((r.allocation.sum() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equal_utility_symmetric() {
        let r = equal_utility(&lineup([(-0.5, 0.6); 5]), &Limits::default()).unwrap();
        assert!(close(&r.allocation.0, &[0.2; 5], 1e-9));
        assert!((r.payoff - 0.5).abs() < 1e-9);
    }

    #[test]
    fn equal_utility_flat_star_against_dense_scan() {
        let ps = flat_star();
        let r = equal_utility(&ps, &Limits::default()).unwrap();
        let us: Vec<f64> = ps.iter().zip(r.allocation.0).map(|(p, x)| p.utility(x)).collect();
        for u in &us {
            assert!((u - us[0]).abs() < 1e-8, "{us:?}");
        }
        assert!((r.allocation.sum() - 1.0).abs() < 1e-9);

        // Dense scan of u: flat player x = u / 0.7, others smaller root of
        // -x^2 + 0.5 x = u.
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=200_000 {
            let u = 0.0625 * k as f64 / 200_000.0;
            let s = u / 0.7 + 4.0 * (0.5 - (0.25 - 4.0 * u).max(0.0).sqrt()) / 2.0;
            if (s - 1.0).abs() < best.0 {
                best = ((s - 1.0).abs(), u);
            }
        }
        assert!((us[0] - best.1).abs() < 1e-6, "bisection {} vs scan {}", us[0], best.1);
    }

    #[test]
    fn equal_utility_zero_intercept_has_no_solution() {
        let ps = lineup([(-0.5, 0.0), (-0.5, 0.6), (-0.5, 0.6), (-0.5, 0.6), (-0.5, 0.6)]);
        assert_eq!(equal_utility(&ps, &Limits::default()), Err(StrategyError::NoEqualUtilitySolution));
    }

    #[test]
    fn nash_closed_form() {
        let ps = lineup([(-1.0, 0.7), (-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)]);
        let r = nash_equal_efficiency(&ps, &Limits::default()).unwrap();
        let mu = 3.7 / 9.0;
        assert!((r.allocation.0[0] - (0.7 - mu)).abs() < 1e-12);
        for x in &r.allocation.0[1..] {
            assert!((x - (0.5 - mu) / 0.5).abs() < 1e-12);
        }
        assert!((r.allocation.0[0] - 0.2889).abs() < 1e-4);
        assert!((r.allocation.0[1] - 0.1778).abs() < 1e-4);
        let f: Vec<f64> = ps.iter().zip(r.allocation.0).map(|(p, x)| p.efficiency(x)).collect();
        for v in &f {
            assert!((v - mu).abs() < 1e-12);
        }
    }

    #[test]
    fn nash_symmetric_matches_optimal() {
        let ps = lineup([(-0.5, 0.6); 5]);
        let r = nash_equal_efficiency(&ps, &Limits::default()).unwrap();
        assert!(close(&r.allocation.0, &[0.2; 5], 1e-12));
    }

    #[test]
    fn nash_undefined_for_flat_player() {
        assert_eq!(
            nash_equal_efficiency(&flat_star(), &Limits::default()),
            Err(StrategyError::NashUndefined("p0".into()))
        );
    }

    #[test]
    fn compare_symmetric_lineup() {
        let c = compare(&lineup([(-0.5, 0.6); 5]), &Limits::default()).unwrap();
        assert_eq!(c.reports.len(), 5);
        for r in c.reports.iter().filter(|r| r.strategy != Strategy::StarFeed) {
            assert!((r.payoff - 0.5).abs() < 1e-9, "{r:?}");
        }
        // The star rule still hands the cap to the first id:
        // 0.4 * 0.4 + 4 * 0.15 * 0.525
        assert!((c.get(Strategy::StarFeed).unwrap().payoff - 0.475).abs() < 1e-12);
        let names: Vec<_> = c.reports.iter().map(|r| r.strategy.name()).collect();
        assert_eq!(names, ["equal_shots", "equal_utility", "nash", "optimal", "star_feed"]);
        let poa = c.poa.unwrap();
        assert!((poa.ratio.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compare_flat_star() {
        let c = compare(&flat_star(), &Limits::default()).unwrap();
        assert_eq!(c.skipped.len(), 1);
        assert_eq!(c.skipped[0].strategy, Strategy::Nash);
        let opt = c.get(Strategy::Optimal).unwrap().payoff;
        let star = c.get(Strategy::StarFeed).unwrap().payoff;
        let eq = c.get(Strategy::EqualShots).unwrap().payoff;
        assert!((opt - star).abs() < 1e-12);
        assert!(eq < opt - 1e-6);
        assert!(c.poa.is_none());
        for w in c.reports.windows(2) {
            assert!(w[0].payoff >= w[1].payoff - 1e-9);
        }
    }

    #[test]
    fn compare_propagates_infeasible() {
        let err = compare(&lineup([(-0.5, 0.0); 5]), &Limits::default()).unwrap_err();
        assert!(matches!(err, StrategyError::Alloc(AllocError::InfeasibleLineup { .. })));
    }
}
