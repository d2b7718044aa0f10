//! Truthful seller payments.
//!
//! Seller `i`'s expected transfer, other reports fixed, is
//! `c_i·x̄_i(c_i) + ∫_{c_i}^{top} x̄_i(u) du`, where `x̄_i(u)` is the probability
//! that the buyer takes item `i` when `i` reports `u`, averaged over buyer
//! values. Truthfulness follows from `x̄_i` being nonincreasing. The transfer
//! only depends on the buyer through `x̄_i`, so it is charged as a flat
//! `payment_if_sold` whenever item `i` sells.
//!
//! The literal expression this replaces, `−c_i x(t, c) − ∫_0^{c_i} x(t, c_{−i}u) du`,
//! is nonpositive; the sign-corrected form above is the one under which the
//! revenue rearrangement into virtual-cost margins holds.

use rayon::prelude::*;
use serde::Serialize;

use crate::buyer::{choose, purchase_probabilities};
use crate::error::{Error, Result};
use crate::market::MarketInstance;
use crate::rng::stream;
use crate::strategies::PricingStrategy;

/// Expected transfer to one seller at a cost report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PaymentSchedule {
    pub item: usize,
    pub cost: f64,
    pub sale_probability: f64,
    pub payment: f64,
    /// `payment / sale_probability`, or zero for an item that never sells.
    pub payment_if_sold: f64,
}

/// Trapezoid refinement settings for the payment integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaymentOptions {
    pub initial_intervals: usize,
    /// Stop doubling once successive estimates differ by less than this.
    pub tolerance: f64,
    pub max_intervals: usize,
}

impl Default for PaymentOptions {
    fn default() -> Self {
        Self {
            initial_intervals: 64,
            tolerance: 1e-5,
            max_intervals: 1 << 14,
        }
    }
}

fn check_item(instance: &MarketInstance, costs: &[f64], item: usize) -> Result<()> {
    if item >= instance.len() {
        return Err(Error::Domain(format!("item {item} out of range")));
    }
    if costs.len() != instance.len() {
        return Err(Error::Domain(format!("{} costs for {} items", costs.len(), instance.len())));
    }
    Ok(())
}

fn sale_probability_at(
    strategy: &dyn PricingStrategy,
    instance: &MarketInstance,
    costs: &[f64],
    item: usize,
    u: f64,
) -> Result<f64> {
    let mut c = costs.to_vec();
    c[item] = u;
    let res = strategy.run(instance, &c)?;
    Ok(purchase_probabilities(instance, &res.menu)[item])
}

/// `x̄_i(c_{−i}, u)` for each `u` in `grid`, from exact purchase probabilities.
pub fn sale_probability_profile(
    strategy: &dyn PricingStrategy,
    instance: &MarketInstance,
    costs: &[f64],
    item: usize,
    grid: &[f64],
) -> Result<Vec<f64>> {
    check_item(instance, costs, item)?;
    grid.par_iter()
        .map(|&u| sale_probability_at(strategy, instance, costs, item, u))
        .collect()
}

/// Upper end of the payment integral: the cost support top, or a far
/// quantile when the support is unbounded.
fn integration_top(instance: &MarketInstance, item: usize) -> f64 {
    instance.cost(item).grid_upper()
}

pub fn seller_payment(
    strategy: &dyn PricingStrategy,
    instance: &MarketInstance,
    costs: &[f64],
    item: usize,
) -> Result<PaymentSchedule> {
    seller_payment_with(strategy, instance, costs, item, &PaymentOptions::default())
}

pub fn seller_payment_with(
    strategy: &dyn PricingStrategy,
    instance: &MarketInstance,
    costs: &[f64],
    item: usize,
    opts: &PaymentOptions,
) -> Result<PaymentSchedule> {
    check_item(instance, costs, item)?;
    let c = costs[item];
    let x0 = sale_probability_at(strategy, instance, costs, item, c)?;
    let top = integration_top(instance, item);
    let tail = if c < top && x0 > 0.0 {
        refine_trapezoid(c, top, x0, opts, |grid| {
            sale_probability_profile(strategy, instance, costs, item, grid)
        })?
    } else {
        0.0
    };
    let payment = c * x0 + tail;
    Ok(PaymentSchedule {
        item,
        cost: c,
        sale_probability: x0,
        payment,
        payment_if_sold: if x0 > 0.0 { payment / x0 } else { 0.0 },
    })
}

/// Trapezoid integral of a function on `[a, b]`, doubling the interval count
/// (reusing old nodes) until successive estimates agree. `f_a` is the
/// already known value at `a`; `eval` evaluates a batch of nodes.
fn refine_trapezoid<E>(a: f64, b: f64, f_a: f64, opts: &PaymentOptions, eval: E) -> Result<f64>
where
    E: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut n = opts.initial_intervals.max(1);
    let h0 = (b - a) / n as f64;
    let nodes: Vec<f64> = (1..=n).map(|j| if j == n { b } else { a + j as f64 * h0 }).collect();
    let vals = eval(&nodes)?;
    let f_b = vals[n - 1];
    // Sum over interior nodes.
    let mut interior: f64 = vals[..n - 1].iter().sum();
    let mut estimate = h0 * (interior + 0.5 * (f_a + f_b));
    while n < opts.max_intervals {
        let h = (b - a) / (2 * n) as f64;
        let mids: Vec<f64> = (0..n).map(|j| a + (2 * j + 1) as f64 * h).collect();
        interior += eval(&mids)?.iter().sum::<f64>();
        n *= 2;
        let next = h * (interior + 0.5 * (f_a + f_b));
        let done = (next - estimate).abs() < opts.tolerance;
        estimate = next;
        if done {
            break;
        }
    }
    Ok(estimate)
}

/// Seller `item`'s expected utility at its true cost, `payment − c·x̄`, for
/// each misreport in `reports`.
pub fn truthfulness_probe(
    strategy: &dyn PricingStrategy,
    instance: &MarketInstance,
    costs: &[f64],
    item: usize,
    reports: &[f64],
) -> Result<Vec<f64>> {
    check_item(instance, costs, item)?;
    let truth = costs[item];
    reports
        .iter()
        .map(|&r| {
            let mut c = costs.to_vec();
            c[item] = r;
            let s = seller_payment(strategy, instance, &c, item)?;
            Ok(s.payment - truth * s.sale_probability)
        })
        .collect()
}

/// Payment estimated from a finite sample of buyer values rather than exact
/// purchase probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalPayment {
    pub schedule: PaymentSchedule,
    pub payment_if_sold_std_error: f64,
}

/// Like [`seller_payment`], but `x̄_i` is the fraction of `values` whose
/// buyer takes item `i`, on a fixed grid of `intervals` trapezoid intervals.
pub fn empirical_payment(
    strategy: &dyn PricingStrategy,
    instance: &MarketInstance,
    costs: &[f64],
    item: usize,
    values: &[Vec<f64>],
    intervals: usize,
) -> Result<EmpiricalPayment> {
    check_item(instance, costs, item)?;
    if values.len() < 2 || intervals == 0 {
        return Err(Error::Domain("need at least two value samples and one interval".into()));
    }
    let c = costs[item];
    let top = integration_top(instance, item).max(c);
    let h = (top - c) / intervals as f64;
    let menus = (0..=intervals)
        .into_par_iter()
        .map(|j| {
            let mut cs = costs.to_vec();
            cs[item] = if j == intervals { top } else { c + j as f64 * h };
            strategy.run(instance, &cs).map(|r| r.menu)
        })
        .collect::<Result<Vec<_>>>()?;
    // Per sample: sold-at-truth indicator and its own payment integral.
    let per_sample: Vec<(f64, f64)> = values
        .par_iter()
        .map(|v| {
            let sold: Vec<f64> = menus
                .iter()
                .map(|m| f64::from(u8::from(choose(v, m).bought == Some(item))))
                .collect();
            let inner: f64 = sold.iter().sum::<f64>() - 0.5 * (sold[0] + sold[intervals]);
            (sold[0], c * sold[0] + h * inner)
        })
        .collect();
    let k = per_sample.len() as f64;
    let x = per_sample.iter().map(|s| s.0).sum::<f64>() / k;
    let g = per_sample.iter().map(|s| s.1).sum::<f64>() / k;
    let (pis, se) = if x > 0.0 {
        let pis = g / x;
        // Delta method for the ratio of means.
        let var = per_sample.iter().map(|s| (s.1 - pis * s.0).powi(2)).sum::<f64>() / (k - 1.0);
        (pis, (var / k).sqrt() / x)
    } else {
        (0.0, 0.0)
    };
    Ok(EmpiricalPayment {
        schedule: PaymentSchedule {
            item,
            cost: c,
            sale_probability: x,
            payment: g,
            payment_if_sold: pis,
        },
        payment_if_sold_std_error: se,
    })
}

/// `cost_draws` cost vectors and `value_draws` value vectors, all from
/// independent streams of `seed`.
pub fn identity_samples(
    instance: &MarketInstance,
    cost_draws: usize,
    value_draws: usize,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut rng = stream(seed, 0);
    let costs = (0..cost_draws).map(|_| instance.draw_costs(&mut rng)).collect();
    let mut rng = stream(seed, 1);
    let values = (0..value_draws).map(|_| instance.draw_values(&mut rng)).collect();
    (costs, values)
}

/// Both sides of the revenue identity and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// Mean of buyer payment minus seller payment.
    pub profit: f64,
    /// Mean of `p_b − θ_b` for the bought item `b`.
    pub virtual_margin: f64,
    pub discrepancy: f64,
    /// Standard error of the discrepancy, clustered by cost sample.
    pub std_error: f64,
}

/// Checks `E[buyer payment − seller payment] = E[Σ_i x_i (p_i − θ_i)]` on
/// every pairing of a cost sample with a value sample. Cost samples must be
/// drawn from the cost distributions: the identity holds in expectation over
/// costs, not for each cost vector.
pub fn revenue_identity_check(
    strategy: &dyn PricingStrategy,
    instance: &MarketInstance,
    cost_samples: &[Vec<f64>],
    value_samples: &[Vec<f64>],
) -> Result<IdentityCheck> {
    if cost_samples.len() < 2 || value_samples.is_empty() {
        return Err(Error::Domain("need at least two cost samples and one value sample".into()));
    }
    // (profit, margin) averaged over values, per cost sample.
    let per_cost = cost_samples
        .par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let res = strategy.run(instance, c)?;
            let mut q = vec![0.0; instance.len()];
            for &i in &res.menu.shown {
                q[i] = seller_payment(strategy, instance, c, i)?.payment_if_sold;
            }
            let (mut profit, mut margin) = (0.0, 0.0);
            for v in value_samples {
                if let Some(b) = choose(v, &res.menu).bought {
                    let p = res.menu.price_of(b).expect("bought item is shown");
                    profit += p - q[b];
                    margin += p - res.virtual_costs[b];
                }
            }
            let k = value_samples.len() as f64;
            Ok((profit / k, margin / k))
        })
        .collect::<Result<Vec<_>>>()?;
    let s = per_cost.len() as f64;
    let profit = per_cost.iter().map(|x| x.0).sum::<f64>() / s;
    let virtual_margin = per_cost.iter().map(|x| x.1).sum::<f64>() / s;
    let discrepancy = profit - virtual_margin;
    let var = per_cost
        .iter()
        .map(|x| (x.0 - x.1 - discrepancy).powi(2))
        .sum::<f64>()
        / (s - 1.0);
    Ok(IdentityCheck {
        profit,
        virtual_margin,
        discrepancy,
        std_error: (var / s).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistributionSpec;
    use crate::strategies::{AnonymousReserve, BestSingleItem, StrategyResult};

    fn unif() -> DistributionSpec {
        DistributionSpec::uniform(0.0, 1.0).unwrap()
    }

    fn single() -> MarketInstance {
        MarketInstance::with_common_cost(&[unif()], unif()).unwrap()
    }

    /// Shows every item at a fixed price regardless of costs.
    struct Constant(f64);

    impl PricingStrategy for Constant {
        fn name(&self) -> &'static str {
            "constant"
        }

        fn price(&self, instance: &MarketInstance, virtual_costs: &[f64]) -> StrategyResult {
            StrategyResult {
                menu: crate::buyer::PriceMenu {
                    shown: (0..instance.len()).collect(),
                    prices: vec![self.0; instance.len()],
                    mode: crate::buyer::AttentionMode::Full,
                },
                virtual_costs: virtual_costs.to_vec(),
                diagnostics: Default::default(),
            }
        }
    }

    #[test]
    fn profile_examples() {
        let p = sale_probability_profile(&BestSingleItem, &single(), &[0.0], 0, &[0.0, 0.25, 0.5, 1.0]).unwrap();
        let want = [0.5, 0.25, 0.0, 0.0];
        for (a, b) in p.iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{p:?}");
        }
        let p = sale_probability_profile(&Constant(0.4), &single(), &[0.0], 0, &[0.0, 0.5, 1.0]).unwrap();
        assert!(p.iter().all(|&x| (x - 0.6).abs() < 1e-12));
    }

    #[test]
    fn payment_examples() {
        let s = seller_payment(&BestSingleItem, &single(), &[0.0], 0).unwrap();
        assert!((s.payment - 0.125).abs() < 1e-5, "{s:?}");
        assert!((s.payment_if_sold - 0.25).abs() < 2e-5);
        assert!((s.payment_if_sold * s.sale_probability - s.payment).abs() < 1e-15);

        let s = seller_payment(&BestSingleItem, &single(), &[0.7], 0).unwrap();
        assert_eq!((s.payment, s.payment_if_sold), (0.0, 0.0));

        let s = seller_payment(&Constant(0.4), &single(), &[1.0], 0).unwrap();
        assert!((s.payment - 0.6).abs() < 1e-12);
    }

    #[test]
    fn individual_rationality() {
        for c in [0.0, 0.1, 0.2, 0.3, 0.45] {
            let s = seller_payment(&BestSingleItem, &single(), &[c], 0).unwrap();
            assert!(s.payment >= c * s.sale_probability - 1e-12);
        }
    }

    #[test]
    fn truthful_report_is_best() {
        let u = truthfulness_probe(&BestSingleItem, &single(), &[0.3], 0, &[0.1, 0.3, 0.5]).unwrap();
        assert!(u[1] >= u[0] - 1e-6 && u[1] >= u[2] - 1e-6, "{u:?}");
        assert!(u[1] >= 0.0);
        // x̄(u) = 1/2 − u, so the truthful utility is ∫_{0.3}^{0.5} x̄ = 0.02.
        assert!((u[1] - 0.02).abs() < 1e-5, "{u:?}");
        let flat = truthfulness_probe(&Constant(0.4), &single(), &[0.3], 0, &[0.1, 0.3, 0.5]).unwrap();
        assert!((flat[0] - flat[1]).abs() < 1e-9 && (flat[1] - flat[2]).abs() < 1e-9);
    }

    #[test]
    fn empirical_tracks_analytic() {
        let inst = single();
        let (_, values) = identity_samples(&inst, 0, 40_000, 11);
        let e = empirical_payment(&BestSingleItem, &inst, &[0.1], 0, &values, 256).unwrap();
        let a = seller_payment(&BestSingleItem, &inst, &[0.1], 0).unwrap();
        assert!((e.schedule.payment_if_sold - a.payment_if_sold).abs() < 4.0 * e.payment_if_sold_std_error + 1e-3);
    }

    #[test]
    fn identity_single_item() {
        let inst = single();
        let (costs, values) = identity_samples(&inst, 200, 2000, 5);
        let chk = revenue_identity_check(&BestSingleItem, &inst, &costs, &values).unwrap();
        assert!(chk.discrepancy.abs() < 4.0 * chk.std_error, "{chk:?}");
    }

    #[test]
    fn identity_zero_margin() {
        // A constant menu far above every value never sells: both sides vanish.
        let inst = single();
        let (costs, values) = identity_samples(&inst, 10, 100, 5);
        let chk = revenue_identity_check(&Constant(2.0), &inst, &costs, &values).unwrap();
        assert_eq!((chk.profit, chk.virtual_margin), (0.0, 0.0));
    }

    #[test]
    fn anonymous_reserve_is_monotone_for_sellers() {
        let inst = MarketInstance::with_common_cost(&[unif(), unif()], unif()).unwrap();
        let grid: Vec<f64> = (0..20).map(|j| j as f64 / 19.0).collect();
        let p = sale_probability_profile(&AnonymousReserve, &inst, &[0.2, 0.1], 0, &grid).unwrap();
        assert!(p.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{p:?}");
    }
}
