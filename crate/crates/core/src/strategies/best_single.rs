use super::{Diagnostics, PricingStrategy, StrategyResult};
use crate::buyer::{AttentionMode, PriceMenu};
use crate::error::Result;
use crate::market::MarketInstance;
use crate::single_item::quote;

/// Shows only the item with the largest optimal stand-alone revenue net of
/// its virtual cost, at its optimal price.
#[derive(Debug, Clone, Copy, Default)]
pub struct BestSingleItem;

impl PricingStrategy for BestSingleItem {
    fn name(&self) -> &'static str {
        "best-single"
    }

    fn price(&self, instance: &MarketInstance, virtual_costs: &[f64]) -> StrategyResult {
        let quotes: Vec<_> = (0..instance.len())
            .map(|i| quote(instance.value(i), virtual_costs[i], 0.0))
            .collect();
        let mut best = 0;
        for (i, q) in quotes.iter().enumerate().skip(1) {
            if q.incremental_revenue > quotes[best].incremental_revenue {
                best = i;
            }
        }
        StrategyResult {
            menu: PriceMenu {
                shown: vec![best],
                prices: vec![quotes[best].price],
                mode: AttentionMode::Full,
            },
            virtual_costs: virtual_costs.to_vec(),
            diagnostics: Diagnostics {
                myerson_revenues: quotes.iter().map(|q| q.incremental_revenue).collect(),
                ..Diagnostics::default()
            },
        }
    }
}

pub fn best_single_item(instance: &MarketInstance, costs: &[f64]) -> Result<StrategyResult> {
    BestSingleItem.run(instance, costs)
}
