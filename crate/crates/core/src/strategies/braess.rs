//! Two-link routing game: a fixed-cost highway next to a lane whose travel
//! time grows linearly with the number of agents using it.

use serde::Serialize;

use super::{PoaMetrics, StrategyError};
use crate::numfmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLinkNetwork {
    n_agents: u32,
    constant_cost: f64,
    linear_coeff: f64,
}

impl TwoLinkNetwork {
    pub fn new(n_agents: u32, constant_cost: f64, linear_coeff: f64) -> Result<Self, StrategyError> {
        if n_agents == 0 {
            return Err(StrategyError::InvalidNetwork("need at least one agent".into()));
        }
        if !(constant_cost > 0.0 && constant_cost.is_finite()) {
            return Err(StrategyError::InvalidNetwork(format!("highway cost must be positive, got {constant_cost}")));
        }
        if !(linear_coeff > 0.0 && linear_coeff.is_finite()) {
            return Err(StrategyError::InvalidNetwork(format!(
                "lane coefficient must be positive, got {linear_coeff}"
            )));
        }
        Ok(Self { n_agents, constant_cost, linear_coeff })
    }

    pub fn n_agents(&self) -> u32 {
        self.n_agents
    }

    /// Per-agent time on the lane with `k` agents on it.
    pub fn lane_cost(&self, k: u32) -> f64 {
        self.linear_coeff * f64::from(k)
    }

    /// Total time with `k` agents on the lane and the rest on the highway.
    pub fn total_cost(&self, k: u32) -> f64 {
        f64::from(k) * self.lane_cost(k) + f64::from(self.n_agents - k) * self.constant_cost
    }

    /// No lane agent gains by moving to the highway and no highway agent
    /// gains by moving to the lane. Indifference counts as no gain.
    pub fn is_equilibrium(&self, k: u32) -> bool {
        let lane_stays = k == 0 || self.lane_cost(k) <= self.constant_cost;
        let highway_stays = k == self.n_agents || self.constant_cost <= self.lane_cost(k + 1);
        lane_stays && highway_stays
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub lane_agents: u32,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub total_cost: f64,
    #[serde(serialize_with = "numfmt::ser_f64_slice")]
    pub per_agent_costs: Vec<f64>,
}

/// Pure equilibrium split. When several splits qualify the one with the most
/// lane agents is returned, matching the selfish drift onto the lane.
pub fn braess_equilibrium(net: &TwoLinkNetwork) -> Equilibrium {
    let k = (0..=net.n_agents)
        .rev()
        .find(|&k| net.is_equilibrium(k))
        .expect("a two-link congestion game always has a pure equilibrium");
    let mut per_agent_costs = vec![net.lane_cost(k); k as usize];
    per_agent_costs.extend(std::iter::repeat_n(net.constant_cost, (net.n_agents - k) as usize));
    Equilibrium { lane_agents: k, total_cost: per_agent_costs.iter().sum(), per_agent_costs }
}

/// Cost-minimizing split by brute force over `k`, ties to the smaller `k`.
pub fn braess_optimal(net: &TwoLinkNetwork) -> (u32, f64) {
    (0..=net.n_agents)
        .map(|k| (k, net.total_cost(k)))
        .fold(None, |best: Option<(u32, f64)>, (k, c)| match best {
            Some((_, bc)) if bc <= c => best,
            _ => Some((k, c)),
        })
        .expect("at least one split")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BraessOutcome {
    pub n_agents: u32,
    pub equilibrium: Equilibrium,
    pub optimal_lane_agents: u32,
    #[serde(serialize_with = "numfmt::ser_f64")]
    pub optimal_total_cost: f64,
    pub poa: PoaMetrics,
}

impl BraessOutcome {
    pub fn run(net: &TwoLinkNetwork) -> Self {
        let equilibrium = braess_equilibrium(net);
        let (k, cost) = braess_optimal(net);
        let poa = PoaMetrics::from_costs(equilibrium.total_cost, cost);
        Self { n_agents: net.n_agents(), equilibrium, optimal_lane_agents: k, optimal_total_cost: cost, poa }
    }
}
