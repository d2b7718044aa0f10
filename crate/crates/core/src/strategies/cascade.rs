use serde::{Deserialize, Serialize};

use super::{Diagnostics, PricingStrategy, StrategyResult};
use crate::buyer::{AttentionMode, PriceMenu};
use crate::error::{Error, Result};
use crate::market::MarketInstance;
use crate::single_item::quote;

/// How the cascade strategy orders the items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CascadeOrder {
    /// A fixed permutation (or prefix of items) in menu order.
    Fixed(Vec<usize>),
    /// Descending stand-alone Myerson revenue of the value distributions;
    /// ties by index. Costs are ignored: an order that reacted to reports
    /// would let a seller move its item and raise its own sale probability.
    ByMyersonRevenue,
}

/// Sequential pricing for a cascade buyer: the last item in the order is
/// priced as a lone item, and each earlier item is priced with the revenue of
/// the items after it as its outside option.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    pub order: CascadeOrder,
}

impl Default for Cascade {
    fn default() -> Self {
        Self {
            order: CascadeOrder::ByMyersonRevenue,
        }
    }
}

impl Cascade {
    pub fn fixed(order: Vec<usize>) -> Self {
        Self {
            order: CascadeOrder::Fixed(order),
        }
    }

    fn resolve(&self, instance: &MarketInstance) -> Vec<usize> {
        match &self.order {
            CascadeOrder::Fixed(order) => order.clone(),
            CascadeOrder::ByMyersonRevenue => {
                let rev: Vec<f64> = (0..instance.len())
                    .map(|i| quote(instance.value(i), 0.0, 0.0).revenue)
                    .collect();
                let mut order: Vec<usize> = (0..instance.len()).collect();
                order.sort_by(|&a, &b| rev[b].total_cmp(&rev[a]).then(a.cmp(&b)));
                order
            }
        }
    }
}

impl PricingStrategy for Cascade {
    fn name(&self) -> &'static str {
        "cascade"
    }

    fn price(&self, instance: &MarketInstance, virtual_costs: &[f64]) -> StrategyResult {
        let order = self.resolve(instance);
        let m = order.len();
        let mut prices = vec![0.0; m];
        let mut incremental = vec![0.0; m];
        let mut cumulative = Vec::with_capacity(m);
        let mut r = 0.0;
        for (pos, &i) in order.iter().enumerate().rev() {
            let q = quote(instance.value(i), virtual_costs[i], r);
            prices[pos] = q.price;
            incremental[pos] = q.incremental_revenue;
            r = q.revenue;
            cumulative.push(r);
        }
        StrategyResult {
            menu: PriceMenu {
                shown: order,
                prices,
                mode: AttentionMode::Cascade,
            },
            virtual_costs: virtual_costs.to_vec(),
            diagnostics: Diagnostics {
                incremental_revenues: incremental,
                cumulative_revenues: cumulative,
                ..Diagnostics::default()
            },
        }
    }

    fn run(&self, instance: &MarketInstance, costs: &[f64]) -> Result<StrategyResult> {
        if let CascadeOrder::Fixed(order) = &self.order {
            check_order(instance, order)?;
        }
        let virtual_costs = super::reduce_costs(instance, costs)?;
        Ok(self.price(instance, &virtual_costs))
    }
}

fn check_order(instance: &MarketInstance, order: &[usize]) -> Result<()> {
    if order.is_empty() {
        return Err(Error::Domain("cascade order is empty".into()));
    }
    let mut seen = vec![false; instance.len()];
    for &i in order {
        if i >= instance.len() {
            return Err(Error::Domain(format!("cascade order names item {i} of {}", instance.len())));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::Domain(format!("cascade order repeats item {i}")));
        }
    }
    Ok(())
}

/// Cascade prices for reported costs in the given order.
pub fn cascade_prices(instance: &MarketInstance, costs: &[f64], order: &[usize]) -> Result<StrategyResult> {
    Cascade::fixed(order.to_vec()).run(instance, costs)
}

/// Incremental revenue of each shown item of a cascade result, in menu order.
pub fn incremental_revenue_curve(result: &StrategyResult) -> Result<Vec<f64>> {
    if result.menu.mode != AttentionMode::Cascade {
        return Err(Error::Domain("incremental revenues exist only for cascade menus".into()));
    }
    Ok(result.diagnostics.incremental_revenues.clone())
}
