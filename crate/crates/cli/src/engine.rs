//! One experiment end to end: costs, virtual costs, menu, analytic and
//! simulated revenue, seller payments and, optionally, the oracle optimum.

use std::time::Instant;

use intermediary_core::buyer::{choose, expected_revenue, purchase_probabilities};
use intermediary_core::oracle::{discretize, oracle_best_k_full, oracle_cascade, oracle_full};
use intermediary_core::payments::seller_payment;
use intermediary_core::rng::stream;
use intermediary_core::strategies::{
    reduce_costs, DiscreteExpectedMax, ExpectedMax, MonteCarloExpectedMax, StrategyResult,
};
use intermediary_core::{
    AnonymousReserve, BestSingleItem, Cascade, CascadeOrder, KLimited, MarketInstance, PricingStrategy,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CostMode, EstimatorKind, ExperimentConfig, StrategyKind};
use crate::error::HarnessError;

/// Draws per Monte Carlo block. Each block has its own random stream, so the
/// estimate does not depend on how blocks are scheduled.
pub const MC_BLOCK: usize = 8192;
const COST_STREAM: u64 = 0;
const MC_STREAM_BASE: u64 = 1 << 32;
const ESTIMATOR_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemReport {
    pub cost: f64,
    pub virtual_cost: f64,
    /// `None` when the item is not shown.
    pub price: Option<f64>,
    pub sale_prob: f64,
    pub payment: Option<f64>,
    pub payment_if_sold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevenueReport {
    pub instance_id: usize,
    pub strategy: StrategyKind,
    pub n: usize,
    pub k: Option<usize>,
    pub seed: u64,
    /// Shown items in menu order.
    pub shown: Vec<usize>,
    pub items: Vec<ItemReport>,
    pub revenue_analytic: f64,
    pub revenue_mc: f64,
    pub mc_stderr: f64,
    pub oracle_revenue: Option<f64>,
    pub ratio: Option<f64>,
    pub runtime_ms: f64,
}

/// The strategy object a config describes.
pub fn build_strategy(config: &ExperimentConfig) -> Result<Box<dyn PricingStrategy>, HarnessError> {
    let inst = &config.instance;
    Ok(match config.strategy {
        StrategyKind::BestSingle => Box::new(BestSingleItem),
        StrategyKind::AnonymousReserve => Box::new(AnonymousReserve),
        StrategyKind::Cascade => Box::new(Cascade {
            order: match &config.params.order {
                Some(o) => CascadeOrder::Fixed(o.clone()),
                None => CascadeOrder::ByMyersonRevenue,
            },
        }),
        StrategyKind::KLimited => {
            let k = config
                .params
                .k
                .ok_or_else(|| HarnessError::config("params.k", "required for k-limited"))?;
            let size = config.params.estimator_size;
            match config.params.estimator {
                EstimatorKind::MonteCarlo => {
                    let est = MonteCarloExpectedMax::new(inst, size, config.seed ^ ESTIMATOR_SEED_MIX)?;
                    boxed_k_limited(k, est)?
                }
                EstimatorKind::Discrete => boxed_k_limited(k, DiscreteExpectedMax::new(inst, size)?)?,
            }
        }
    })
}

fn boxed_k_limited<E: ExpectedMax + 'static>(k: usize, est: E) -> Result<Box<dyn PricingStrategy>, HarnessError> {
    Ok(Box::new(KLimited::new(k, est)?))
}

/// The cost vector of a config: fixed, or drawn from the cost distributions.
pub fn resolve_costs(config: &ExperimentConfig) -> Vec<f64> {
    match &config.costs {
        CostMode::Fixed { values } => values.clone(),
        CostMode::Sampled => config.instance.draw_costs(&mut stream(config.seed, COST_STREAM)),
    }
}

/// Mean per-buyer revenue `p_b − θ_b` over `samples` simulated buyers, with
/// its standard error.
pub fn simulate_revenue(instance: &MarketInstance, result: &StrategyResult, samples: usize, seed: u64) -> (f64, f64) {
    let blocks = samples.div_ceil(MC_BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, MC_STREAM_BASE + b as u64);
            let draws = MC_BLOCK.min(samples - b * MC_BLOCK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..draws {
                let v = instance.draw_values(&mut rng);
                if let Some(i) = choose(&v, &result.menu).bought {
                    let r = result.menu.price_of(i).expect("bought item is shown") - result.virtual_costs[i];
                    s += r;
                    s2 += r * r;
                }
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let k = samples as f64;
    let mean = s / k;
    let se = if samples > 1 {
        (((s2 - k * mean * mean) / (k - 1.0)).max(0.0) / k).sqrt()
    } else {
        0.0
    };
    (mean, se)
}

/// Oracle optimum matching the strategy's buyer model.
pub fn oracle_revenue(config: &ExperimentConfig, virtual_costs: &[f64]) -> Result<f64, HarnessError> {
    let disc = discretize(&config.instance, config.oracle.m)?;
    let r = match config.strategy {
        StrategyKind::BestSingle | StrategyKind::AnonymousReserve => oracle_full(&disc, virtual_costs)?,
        StrategyKind::KLimited => oracle_best_k_full(&disc, virtual_costs, config.params.k.unwrap_or(1))?,
        StrategyKind::Cascade => oracle_cascade(&disc, virtual_costs)?,
    };
    Ok(r.revenue)
}

pub fn run_experiment(config: &ExperimentConfig, instance_id: usize) -> Result<RevenueReport, HarnessError> {
    let start = Instant::now();
    config.validate()?;
    let inst = &config.instance;
    let n = inst.len();
    let strategy = build_strategy(config)?;
    let costs = resolve_costs(config);
    let virtual_costs = reduce_costs(inst, &costs)?;
    let result = strategy.price(inst, &virtual_costs);
    let probs = purchase_probabilities(inst, &result.menu);
    let revenue_analytic = expected_revenue(inst, &result.menu, &virtual_costs);
    let (revenue_mc, mc_stderr) = simulate_revenue(inst, &result, config.samples, config.seed);

    let mut items: Vec<ItemReport> = (0..n)
        .map(|i| ItemReport {
            cost: costs[i],
            virtual_cost: virtual_costs[i],
            price: result.menu.price_of(i),
            sale_prob: probs[i],
            payment: None,
            payment_if_sold: None,
        })
        .collect();
    if config.payments {
        for &i in &result.menu.shown {
            let s = seller_payment(strategy.as_ref(), inst, &costs, i)?;
            items[i].payment = Some(s.payment);
            items[i].payment_if_sold = Some(s.payment_if_sold);
        }
    }

    let (oracle, ratio) = if config.oracle.enabled {
        let o = oracle_revenue(config, &virtual_costs)?;
        (Some(o), (o > 0.0).then(|| revenue_analytic / o))
    } else {
        (None, None)
    };

    Ok(RevenueReport {
        instance_id,
        strategy: config.strategy,
        n,
        k: match config.strategy {
            StrategyKind::KLimited => config.params.k,
            _ => None,
        },
        seed: config.seed,
        shown: result.menu.shown.clone(),
        items,
        revenue_analytic,
        revenue_mc,
        mc_stderr,
        oracle_revenue: oracle,
        ratio,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
