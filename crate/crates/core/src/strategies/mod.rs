//! Buyer-facing pricing strategies.
//!
//! Every strategy follows the same pipeline: sellers report costs, each cost
//! is replaced by its virtual cost `θ_i(c_i)`, and the strategy then solves a
//! pricing problem in which the intermediary itself owns item `i` at cost
//! `θ_i`. Equivalently it prices the cost-free problem whose value
//! distributions are moved down by `θ_i`; a value `v` of item `i` then carries
//! the net virtual value `φ_i(v) − θ_i`.

mod anonymous;
mod best_single;
mod cascade;
mod greedy;

use serde::Serialize;

pub use anonymous::{anonymous_reserve, median_of_virtual_max, AnonymousReserve};
pub use best_single::{best_single_item, BestSingleItem};
pub use cascade::{cascade_prices, incremental_revenue_curve, Cascade, CascadeOrder};
pub use greedy::{
    expected_positive_max, greedy_k_select, k_limited_strategy, DiscreteExpectedMax, Estimate, ExpectedMax, KLimited,
    MonteCarloExpectedMax, Selection,
};

use crate::buyer::PriceMenu;
use crate::error::{Error, Result};
use crate::market::MarketInstance;

/// Strategy-specific by-products.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Anonymous virtual reserve actually used (floored at zero).
    pub reserve: Option<f64>,
    /// Median of the maximum net virtual value before flooring.
    pub median: Option<f64>,
    /// Per-item optimal stand-alone revenue net of virtual cost.
    pub myerson_revenues: Vec<f64>,
    /// Cascade: incremental revenue of each shown item, in menu order.
    pub incremental_revenues: Vec<f64>,
    /// Cascade: `R_1, …, R_m`, the revenue from the last `k` shown items.
    pub cumulative_revenues: Vec<f64>,
    /// k-limited: estimated expected positive max virtual value of the
    /// selected set.
    pub selection: Option<Estimate>,
}

/// A strategy's output: the menu plus the virtual costs it was computed for.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyResult {
    pub menu: PriceMenu,
    pub virtual_costs: Vec<f64>,
    pub diagnostics: Diagnostics,
}

/// A pricing protocol for the buyer, computed from virtual costs.
pub trait PricingStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Menu for the given virtual costs.
    fn price(&self, instance: &MarketInstance, virtual_costs: &[f64]) -> StrategyResult;

    /// Menu for reported costs: reduces them to virtual costs first.
    fn run(&self, instance: &MarketInstance, costs: &[f64]) -> Result<StrategyResult> {
        let virtual_costs = reduce_costs(instance, costs)?;
        Ok(self.price(instance, &virtual_costs))
    }
}

/// Component-wise virtual cost of the reported costs. Reports outside the
/// cost support are refused.
pub fn reduce_costs(instance: &MarketInstance, costs: &[f64]) -> Result<Vec<f64>> {
    if costs.len() != instance.len() {
        return Err(Error::Domain(format!(
            "{} costs reported for {} items",
            costs.len(),
            instance.len()
        )));
    }
    costs
        .iter()
        .enumerate()
        .map(|(i, &c)| instance.cost(i).virtual_cost(c))
        .collect()
}
