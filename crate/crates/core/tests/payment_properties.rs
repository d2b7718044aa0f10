mod common;

use intermediary_core::payments::{
    empirical_payment, identity_samples, revenue_identity_check, seller_payment, truthfulness_probe,
};
use intermediary_core::rng::stream;
use intermediary_core::strategies::DiscreteExpectedMax;
use intermediary_core::{AnonymousReserve, BestSingleItem, Cascade, KLimited, PricingStrategy};

#[test]
fn truthful_report_maximizes_utility() {
    for seed in 0..3u64 {
        let m = common::market(800 + seed, 2);
        let costs = m.draw_costs(&mut stream(seed, 8));
        let k_limited = KLimited::new(1, DiscreteExpectedMax::new(&m, 200).unwrap()).unwrap();
        let strategies: [&dyn PricingStrategy; 4] = [&BestSingleItem, &AnonymousReserve, &k_limited, &Cascade::default()];
        let c = m.cost(0);
        let top = c.grid_upper().min(c.quantile(0.999));
        let mut reports: Vec<f64> = (0..20).map(|j| c.lo() + (top - c.lo()) * j as f64 / 19.0).collect();
        reports.push(costs[0]);
        for s in strategies {
            let u = truthfulness_probe(s, &m, &costs, 0, &reports).unwrap();
            let truthful = u[20];
            let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert!(truthful >= best - 1e-4, "{} seed {seed}: {truthful} < {best}", s.name());
            assert!(truthful >= -1e-9);
        }
    }
}

#[test]
fn payments_are_individually_rational() {
    for seed in 0..5u64 {
        let m = common::market(900 + seed, 3);
        let costs = m.draw_costs(&mut stream(seed, 9));
        for i in 0..3 {
            let s = seller_payment(&AnonymousReserve, &m, &costs, i).unwrap();
            assert!(s.payment >= costs[i] * s.sale_probability - 1e-12);
            if s.sale_probability > 0.0 {
                assert!((s.payment_if_sold * s.sale_probability - s.payment).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn revenue_identity_holds_for_every_strategy() {
    let m = common::market(1000, 2);
    let k_limited = KLimited::new(1, DiscreteExpectedMax::new(&m, 200).unwrap()).unwrap();
    let strategies: [&dyn PricingStrategy; 4] = [&BestSingleItem, &AnonymousReserve, &k_limited, &Cascade::default()];
    let (costs, values) = identity_samples(&m, 150, 2000, 17);
    for s in strategies {
        let chk = revenue_identity_check(s, &m, &costs, &values).unwrap();
        assert!(chk.discrepancy.abs() < 4.0 * chk.std_error, "{}: {chk:?}", s.name());
    }
}

#[test]
fn payment_if_sold_does_not_depend_on_buyer_values() {
    let m = common::market(1100, 2);
    let costs = m.draw_costs(&mut stream(1, 10));
    let (_, values) = identity_samples(&m, 0, 40_000, 23);
    let (a, b) = values.split_at(20_000);
    let pa = empirical_payment(&AnonymousReserve, &m, &costs, 0, a, 256).unwrap();
    let pb = empirical_payment(&AnonymousReserve, &m, &costs, 0, b, 256).unwrap();
    let se = pa.payment_if_sold_std_error.hypot(pb.payment_if_sold_std_error);
    assert!((pa.schedule.payment_if_sold - pb.schedule.payment_if_sold).abs() < 4.0 * se, "{pa:?} {pb:?}");
    let exact = seller_payment(&AnonymousReserve, &m, &costs, 0).unwrap();
    assert!((pa.schedule.payment_if_sold - exact.payment_if_sold).abs() < 4.0 * pa.payment_if_sold_std_error + 1e-3);
}
