use super::{Diagnostics, PricingStrategy, StrategyResult};
use crate::buyer::{AttentionMode, PriceMenu};
use crate::error::{Error, Result};
use crate::market::MarketInstance;
use crate::numeric::{bisect_increasing, ROOT_MAX_ITER, ROOT_TOL};

/// Anonymous virtual reserve: all items share one threshold `r` on net
/// virtual values, `p_i = φ_i⁻¹(r + θ_i)`, with `r` the median of
/// `max_i (φ_i(v_i) − θ_i)` floored at zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnonymousReserve;

impl PricingStrategy for AnonymousReserve {
    fn name(&self) -> &'static str {
        "anonymous-reserve"
    }

    fn price(&self, instance: &MarketInstance, virtual_costs: &[f64]) -> StrategyResult {
        let all: Vec<usize> = (0..instance.len()).collect();
        reserve_menu(instance, virtual_costs, all, AttentionMode::Full, Diagnostics::default())
    }
}

pub fn anonymous_reserve(instance: &MarketInstance, costs: &[f64]) -> Result<StrategyResult> {
    AnonymousReserve.run(instance, costs)
}

/// Prices `subset` with the anonymous reserve computed over that subset.
pub(super) fn reserve_menu(
    instance: &MarketInstance,
    virtual_costs: &[f64],
    subset: Vec<usize>,
    mode: AttentionMode,
    mut diagnostics: Diagnostics,
) -> StrategyResult {
    if subset.is_empty() {
        return StrategyResult {
            menu: PriceMenu::empty(mode),
            virtual_costs: virtual_costs.to_vec(),
            diagnostics,
        };
    }
    let median = median_of_virtual_max(instance, virtual_costs, &subset).expect("subset is valid");
    let reserve = median.max(0.0);
    let prices = subset
        .iter()
        .map(|&i| instance.value(i).inverse_virtual_value(reserve + virtual_costs[i]))
        .collect();
    diagnostics.reserve = Some(reserve);
    diagnostics.median = Some(median);
    StrategyResult {
        menu: PriceMenu {
            shown: subset,
            prices,
            mode,
        },
        virtual_costs: virtual_costs.to_vec(),
        diagnostics,
    }
}

/// Median of `max_{i ∈ subset} (φ_i(v_i) − θ_i)`, i.e. the `r` solving
/// `∏_i P(φ_i(v_i) − θ_i ≤ r) = 1/2`. Not floored; may be negative.
pub fn median_of_virtual_max(instance: &MarketInstance, virtual_costs: &[f64], subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::Domain("median over an empty set of items".into()));
    }
    if virtual_costs.len() != instance.len() {
        return Err(Error::Domain(format!(
            "{} virtual costs for {} items",
            virtual_costs.len(),
            instance.len()
        )));
    }
    if let Some(&i) = subset.iter().find(|&&i| i >= instance.len()) {
        return Err(Error::Domain(format!("item {i} out of range")));
    }
    if virtual_costs.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("virtual costs must be finite".into()));
    }
    let net_range = |i: usize| {
        let d = instance.value(i);
        (d.phi(d.lo()) - virtual_costs[i], d.phi(d.grid_upper()) - virtual_costs[i])
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &i in subset {
        let (a, b) = net_range(i);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let joint_cdf = |r: f64| {
        subset
            .iter()
            .map(|&i| {
                let d = instance.value(i);
                d.cdf(d.inverse_virtual_value(r + virtual_costs[i]))
            })
            .product::<f64>()
    };
    Ok(bisect_increasing(joint_cdf, 0.5, lo, hi, ROOT_TOL, ROOT_MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buyer::expected_revenue;
    use crate::dist::DistributionSpec;

    fn inst(values: &[DistributionSpec]) -> MarketInstance {
        let c = DistributionSpec::uniform(0.0, 1.0).unwrap();
        MarketInstance::with_common_cost(values, c).unwrap()
    }

    #[test]
    fn single_exponential_median() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        let m = median_of_virtual_max(&inst(&[e]), &[0.0], &[0]).unwrap();
        assert!((m - (std::f64::consts::LN_2 - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn single_item_floors_to_myerson() {
        let e = DistributionSpec::exponential(1.0).unwrap();
        let res = AnonymousReserve.price(&inst(&[e]), &[0.0]);
        assert_eq!(res.diagnostics.reserve, Some(0.0));
        assert!((res.menu.prices[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn iid_uniform_pair() {
        // max of two 2v − 1 has median 2/√2 − 1.
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let i2 = inst(&[u, u]);
        let m = median_of_virtual_max(&i2, &[0.0, 0.0], &[0, 1]).unwrap();
        assert!((m - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-9);
        let res = AnonymousReserve.price(&i2, &[0.0, 0.0]);
        let p = std::f64::consts::FRAC_1_SQRT_2;
        assert!((res.menu.prices[0] - p).abs() < 1e-9 && (res.menu.prices[1] - p).abs() < 1e-9);
        // Sold iff max v ≥ p: revenue p (1 − p²) = p / 2.
        let rev = expected_revenue(&i2, &res.menu, &res.virtual_costs);
        assert!((rev - p / 2.0).abs() < 1e-9);
    }

    #[test]
    fn virtual_costs_shift_prices() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let i2 = inst(&[u, u]);
        let res = AnonymousReserve.price(&i2, &[0.2, 0.0]);
        let r = res.diagnostics.reserve.unwrap();
        // φ(p) = 2p − 1 = r + θ.
        assert!((res.menu.prices[0] - (r + 1.2) / 2.0).abs() < 1e-12);
        assert!((res.menu.prices[1] - (r + 1.0) / 2.0).abs() < 1e-12);
        assert!(res.menu.prices[0] > res.menu.prices[1]);
    }

    #[test]
    fn unreachable_costs_price_at_top() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let res = AnonymousReserve.price(&inst(&[u, u]), &[5.0, 5.0]);
        assert_eq!(res.menu.prices, vec![1.0, 1.0]);
    }

    #[test]
    fn rejects_bad_input() {
        let u = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let i2 = inst(&[u, u]);
        assert!(median_of_virtual_max(&i2, &[0.0, 0.0], &[]).is_err());
        assert!(median_of_virtual_max(&i2, &[0.0], &[0]).is_err());
        assert!(median_of_virtual_max(&i2, &[0.0, 0.0], &[2]).is_err());
    }
}
