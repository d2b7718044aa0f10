//! Optimal pricing of one item to one buyer, with an optional cost and
//! outside option.
//!
//! With cost `k` (always a *virtual* cost here) and outside option `R_out`,
//! the optimal price `η` solves `η − k − R_out = 1 / hr(η)`, i.e.
//! `φ(η) = k + R_out`. Under MHR the left side minus the right side is
//! nondecreasing, so the root is found by the same bisection that inverts
//! the virtual value. When no interior root exists the price sits at a
//! support end.

use serde::Serialize;

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};

/// Price, sale probability and revenue of a single posted price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleItemQuote {
    pub price: f64,
    pub sale_prob: f64,
    /// Expected revenue including the outside option, net of the cost.
    pub revenue: f64,
    /// `revenue − R_out`.
    pub incremental_revenue: f64,
}

/// Myerson's optimal price: `φ(p) = 0`.
pub fn myerson_price(v_dist: &DistributionSpec) -> SingleItemQuote {
    quote(v_dist, 0.0, 0.0)
}

/// Optimal price facing virtual cost `cost` and outside option `r_out`.
///
/// When `cost + r_out` is at or beyond the upper end of the value support,
/// the quote never sells and has zero incremental revenue.
pub fn price_with_outside_option(v_dist: &DistributionSpec, cost: f64, r_out: f64) -> Result<SingleItemQuote> {
    if !cost.is_finite() {
        return Err(Error::Domain(format!("cost must be finite, got {cost}")));
    }
    if !(r_out.is_finite() && r_out >= 0.0) {
        return Err(Error::Domain(format!("outside option must be finite and nonnegative, got {r_out}")));
    }
    Ok(quote(v_dist, cost, r_out))
}

pub(crate) fn quote(v_dist: &DistributionSpec, cost: f64, r_out: f64) -> SingleItemQuote {
    let price = v_dist.inverse_virtual_value(cost + r_out);
    quote_at(v_dist, price, cost, r_out)
}

/// Quote for a fixed posted price.
pub fn quote_at(v_dist: &DistributionSpec, price: f64, cost: f64, r_out: f64) -> SingleItemQuote {
    let sale_prob = v_dist.survival(price);
    let incremental_revenue = if sale_prob > 0.0 {
        sale_prob * (price - cost - r_out)
    } else {
        0.0
    };
    SingleItemQuote {
        price,
        sale_prob,
        revenue: r_out + incremental_revenue,
        incremental_revenue,
    }
}

/// Upper bound on the incremental revenue of any MHR distribution whose
/// Myerson revenue is `r_myerson`, facing outside option `r_out`: the
/// exponential distribution with the same Myerson revenue attains it.
///
/// With `γ = 1 / (e · r_myerson)` the bound is `e^{−γ r_out} / (e γ)`.
pub fn exponential_bound(r_myerson: f64, r_out: f64) -> Result<f64> {
    if !(r_myerson.is_finite() && r_myerson > 0.0) {
        return Err(Error::Domain(format!("Myerson revenue must be positive, got {r_myerson}")));
    }
    if !(r_out.is_finite() && r_out >= 0.0) {
        return Err(Error::Domain(format!("outside option must be finite and nonnegative, got {r_out}")));
    }
    let gamma = 1.0 / (std::f64::consts::E * r_myerson);
    Ok((-gamma * r_out).exp() / (std::f64::consts::E * gamma))
}

/// Revenue-optimal bilateral trade rule: trade iff `φ(v) ≥ θ(c)`.
pub fn ms_trade_rule(v_dist: &DistributionSpec, c_dist: &DistributionSpec, v: f64, c: f64) -> Result<bool> {
    Ok(v_dist.virtual_value(v)? >= c_dist.virtual_cost(c)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn exp(rate: f64) -> DistributionSpec {
        DistributionSpec::exponential(rate).unwrap()
    }

    fn unif(lo: f64, hi: f64) -> DistributionSpec {
        DistributionSpec::uniform(lo, hi).unwrap()
    }

    #[test]
    fn myerson_examples() {
        let q = myerson_price(&exp(1.0));
        close(q.price, 1.0, 1e-12);
        close(q.revenue, 1.0 / E, 1e-12);
        let q = myerson_price(&unif(0.0, 1.0));
        close(q.price, 0.5, 1e-12);
        close(q.revenue, 0.25, 1e-12);
        let q = myerson_price(&exp(2.0));
        close(q.price, 0.5, 1e-12);
        close(q.revenue, 0.5 / E, 1e-12);
    }

    #[test]
    fn outside_option_examples() {
        close(price_with_outside_option(&exp(1.0), 0.0, 0.0).unwrap().price, 1.0, 1e-12);
        close(price_with_outside_option(&exp(1.0), 0.5, 0.25).unwrap().price, 1.75, 1e-12);
        close(price_with_outside_option(&unif(0.0, 1.0), 0.0, 0.2).unwrap().price, 0.6, 1e-12);
    }

    #[test]
    fn hopeless_cost_never_sells() {
        let q = price_with_outside_option(&unif(0.0, 1.0), 0.8, 0.5).unwrap();
        assert_eq!(q.sale_prob, 0.0);
        assert_eq!(q.incremental_revenue, 0.0);
        close(q.revenue, 0.5, 0.0);
    }

    #[test]
    fn invalid_outside_option_rejected() {
        assert!(price_with_outside_option(&exp(1.0), 0.0, -1.0).is_err());
        assert!(price_with_outside_option(&exp(1.0), f64::NAN, 0.0).is_err());
    }

    #[test]
    fn quote_revenue_identity() {
        let d = unif(0.2, 1.7);
        for (cost, r_out) in [(0.0, 0.0), (0.3, 0.1), (0.1, 0.9)] {
            let q = price_with_outside_option(&d, cost, r_out).unwrap();
            let direct = q.sale_prob * q.price + (1.0 - q.sale_prob) * r_out - q.sale_prob * cost;
            close(q.revenue, direct, 1e-12);
            assert!(q.incremental_revenue >= 0.0);
        }
    }

    #[test]
    fn exponential_bound_examples() {
        close(exponential_bound(1.0 / E, 0.0).unwrap(), 1.0 / E, 1e-15);
        close(exponential_bound(1.0 / E, 1.0).unwrap(), (-2f64).exp(), 1e-15);
        let q = price_with_outside_option(&unif(0.0, 1.0), 0.0, 0.2).unwrap();
        assert!(q.incremental_revenue <= exponential_bound(0.25, 0.2).unwrap());
        assert!(exponential_bound(0.0, 0.0).is_err());
        assert!(exponential_bound(-1.0, 0.0).is_err());
    }

    #[test]
    fn trade_rule_examples() {
        let u = unif(0.0, 1.0);
        assert!(ms_trade_rule(&u, &u, 0.9, 0.1).unwrap());
        assert!(!ms_trade_rule(&u, &u, 0.6, 0.2).unwrap());
        // At the shared lower end φ(0) = −1 < θ(0) = 0.
        assert!(!ms_trade_rule(&u, &u, 0.0, 0.0).unwrap());
        assert!(ms_trade_rule(&u, &u, 1.5, 0.0).is_err());
    }

    #[test]
    fn trade_rule_with_negligible_cost_is_the_myerson_rule() {
        let v = exp(1.3);
        let c = unif(0.0, 1e-9);
        for x in [0.1, 0.5, 0.76, 0.77, 2.0] {
            assert_eq!(ms_trade_rule(&v, &c, x, 0.0).unwrap(), v.virtual_value(x).unwrap() >= 0.0);
        }
    }
}
