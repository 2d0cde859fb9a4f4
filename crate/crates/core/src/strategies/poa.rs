use serde::Serialize;

use super::{StrategyError, StrategyReport};
use crate::allocator::SolveReport;
use crate::numfmt;

/// Whether the compared values are payoffs (higher is better) or costs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoaConvention {
    Payoff,
    Cost,
}

/// Gap between the selfish equilibrium and the coordinated optimum.
///
/// `ratio` is `optimal / nash` for payoffs and `nash / optimal` for costs, so
/// it is at least one whenever selfish play loses something. `difference` is
/// always `optimal - nash`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoaMetrics {
    pub convention: PoaConvention,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub nash_value: f64,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub optimal_value: f64,
    #[serde(serialize_with = "numfmt::ser_opt_f64")]
    pub ratio: Option<f64>,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub difference: f64,
}

impl PoaMetrics {
    pub fn from_payoffs(nash: f64, optimal: f64) -> Self {
        Self {
            convention: PoaConvention::Payoff,
            nash_value: nash,
            optimal_value: optimal,
            ratio: (nash > 0.0).then(|| optimal / nash),
            difference: optimal - nash,
        }
    }

    pub fn from_costs(nash: f64, optimal: f64) -> Self {
        Self {
            convention: PoaConvention::Cost,
            nash_value: nash,
            optimal_value: optimal,
            ratio: (optimal > 0.0).then(|| nash / optimal),
            difference: optimal - nash,
        }
    }

    /// The ratio, or [`StrategyError::DegenerateNash`] when it is undefined.
    pub fn checked_ratio(&self) -> Result<f64, StrategyError> {
        self.ratio.ok_or(StrategyError::DegenerateNash(self.nash_value))
    }
}

/// Price of anarchy between an equilibrium report and the optimum on the same
/// lineup. The ratio is omitted when the equilibrium payoff is not positive.
pub fn price_of_anarchy(nash: &StrategyReport, optimal: &SolveReport) -> PoaMetrics {
    PoaMetrics::from_payoffs(nash.payoff, optimal.payoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocator::{solve_optimal, Limits};
    use crate::strategies::{nash_equal_efficiency, tests::lineup};

    #[test]
    fn symmetric_lineup_has_unit_ratio() {
        let ps = lineup([(-0.5, 0.6); 5]);
        let lim = Limits::default();
        let m = price_of_anarchy(&nash_equal_efficiency(&ps, &lim).unwrap(), &solve_optimal(&ps, &lim).unwrap());
        assert!((m.ratio.unwrap() - 1.0).abs() < 1e-12);
        assert!(m.difference.abs() < 1e-12);
    }

    #[test]
    fn asymmetric_lineup_ratio_at_least_one() {
        let ps = lineup([(-1.0, 0.7), (-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5), (-0.5, 0.5)]);
        let lim = Limits::default();
        let nash = nash_equal_efficiency(&ps, &lim).unwrap();
        let opt = solve_optimal(&ps, &lim).unwrap();
        let m = price_of_anarchy(&nash, &opt);
        assert_eq!(m.ratio.unwrap(), opt.payoff / nash.payoff);
        assert!(m.ratio.unwrap() >= 1.0);
        assert!((m.difference - (opt.payoff - nash.payoff)).abs() <= 1e-12);
    }

    #[test]
    fn zero_nash_payoff_is_degenerate() {
        let m = PoaMetrics::from_payoffs(0.0, 0.4);
        assert_eq!(m.ratio, None);
        assert_eq!(m.checked_ratio(), Err(StrategyError::DegenerateNash(0.0)));
        assert!((m.difference - 0.4).abs() < 1e-15);
    }
}
