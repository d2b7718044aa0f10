mod common;

use intermediary_core::buyer::{expected_revenue, purchase_probabilities};
use intermediary_core::market::Item;
use intermediary_core::oracle::{discretize, oracle_best_subset};
use intermediary_core::payments::sale_probability_profile;
use intermediary_core::rng::stream;
use intermediary_core::single_item::exponential_bound;
use intermediary_core::strategies::{
    greedy_k_select, median_of_virtual_max, DiscreteExpectedMax, ExpectedMax, MonteCarloExpectedMax,
};
use intermediary_core::{
    myerson_price, AnonymousReserve, BestSingleItem, Cascade, DistributionSpec, KLimited, MarketInstance, PricingStrategy,
};
use rand::seq::SliceRandom;
use rand::Rng;

fn shifted(m: &MarketInstance, delta: f64) -> MarketInstance {
    m.map_values(|_, d| d.shift(delta)).unwrap()
}

#[test]
fn sellers_face_nonincreasing_sale_probabilities() {
    for seed in 0..20u64 {
        let n = 1 + seed as usize % 4;
        let m = common::market(100 + seed, n);
        let costs = m.draw_costs(&mut stream(seed, 4));
        let k_limited = KLimited::new(n.min(2), DiscreteExpectedMax::new(&m, 200).unwrap()).unwrap();
        let strategies: [&dyn PricingStrategy; 4] = [&BestSingleItem, &AnonymousReserve, &k_limited, &Cascade::default()];
        for i in 0..n {
            let c = m.cost(i);
            let top = c.grid_upper().min(c.quantile(0.999));
            let grid: Vec<f64> = (0..20).map(|j| c.lo() + (top - c.lo()) * j as f64 / 19.0).collect();
            for s in strategies {
                let p = sale_probability_profile(s, &m, &costs, i, &grid).unwrap();
                for w in p.windows(2) {
                    assert!(w[1] <= w[0] + 1e-6, "{} seed {seed} item {i}: {p:?}", s.name());
                }
            }
        }
    }
}

#[test]
fn anonymous_reserve_moves_with_values_and_costs() {
    for seed in 0..20u64 {
        let m = common::market(200 + seed, 2 + seed as usize % 3);
        let theta: Vec<f64> = m.draw_costs(&mut stream(seed, 5));
        let delta = stream(seed, 6).random_range(0.1..2.0);
        let base = AnonymousReserve.price(&m, &theta);
        let moved_theta: Vec<f64> = theta.iter().map(|t| t + delta).collect();
        let moved_m = shifted(&m, delta);
        let moved = AnonymousReserve.price(&moved_m, &moved_theta);
        for (a, b) in base.menu.prices.iter().zip(&moved.menu.prices) {
            assert!((b - a - delta).abs() < 1e-8, "seed {seed}: {a} → {b}, δ = {delta}");
        }
        let pa = purchase_probabilities(&m, &base.menu);
        let pb = purchase_probabilities(&moved_m, &moved.menu);
        for (a, b) in pa.iter().zip(&pb) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn anonymous_reserve_shifts_with_values_when_median_is_positive() {
    let mut checked = 0;
    for seed in 0..60u64 {
        let m = common::market(300 + seed, 3);
        let zero = vec![0.0; 3];
        if median_of_virtual_max(&m, &zero, &[0, 1, 2]).unwrap() < 0.0 {
            continue;
        }
        checked += 1;
        let base = AnonymousReserve.price(&m, &zero);
        let moved_m = shifted(&m, 0.5);
        let moved = AnonymousReserve.price(&moved_m, &zero);
        for (a, b) in base.menu.prices.iter().zip(&moved.menu.prices) {
            assert!((b - a - 0.5).abs() < 1e-8);
        }
        let pa = purchase_probabilities(&m, &base.menu);
        let pb = purchase_probabilities(&moved_m, &moved.menu);
        assert!(pa.iter().zip(&pb).all(|(a, b)| (a - b).abs() < 1e-8));
    }
    assert!(checked >= 10, "only {checked} instances had a nonnegative median");
}

#[test]
fn cascade_steps_are_exponentially_bounded() {
    for seed in 0..30u64 {
        let m = common::market(400 + seed, 5);
        let zero = vec![0.0; 5];
        let res = Cascade::default().price(&m, &zero);
        let mut r_after = 0.0;
        for (pos, &i) in res.menu.shown.iter().enumerate().rev() {
            let dr = res.diagnostics.incremental_revenues[pos];
            let rm = myerson_price(m.value(i)).revenue;
            assert!(dr <= exponential_bound(rm, r_after).unwrap() + 1e-9);
            r_after += dr;
        }
        assert!((expected_revenue(&m, &res.menu, &zero) - r_after).abs() < 1e-9);
    }
}

#[test]
fn expected_max_is_monotone_submodular() {
    let mut rng = stream(9, 0);
    for seed in 0..20u64 {
        let n = 6;
        let m = common::market(500 + seed, n);
        let theta: Vec<f64> = m.draw_costs(&mut stream(seed, 7)).iter().enumerate().map(|(i, &c)| m.cost(i).virtual_cost(c).unwrap()).collect();
        let est = DiscreteExpectedMax::new(&m, 100).unwrap();
        let mut items: Vec<usize> = (0..n).collect();
        items.shuffle(&mut rng);
        let x = items[0];
        let b: Vec<usize> = items[1..].iter().copied().filter(|_| rng.random_bool(0.6)).collect();
        let a: Vec<usize> = b.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
        let gain = |s: &[usize]| {
            let mut with = s.to_vec();
            with.push(x);
            est.estimate(&with, &theta).value - est.estimate(s, &theta).value
        };
        assert!(gain(&a) >= gain(&b) - 1e-12, "seed {seed}");
        assert!(gain(&b) >= -1e-12);
    }
}

#[test]
fn greedy_is_within_one_minus_one_over_e() {
    let bound = 1.0 - (-1.0f64).exp();
    for seed in 0..15u64 {
        let n = 4 + seed as usize % 5;
        let m = common::market(600 + seed, n);
        let theta = vec![0.2; n];
        let disc = discretize(&m, 60).unwrap();
        let est = DiscreteExpectedMax::new(&m, 60).unwrap();
        for k in 1..=3 {
            let g = greedy_k_select(&est, &theta, k).unwrap();
            let (_, best) = oracle_best_subset(&disc, &theta, k).unwrap();
            assert!(g.value.value >= bound * best - 1e-9);
            assert!(g.value.value <= best + 1e-12);
        }
    }
}

#[test]
fn monte_carlo_greedy_tracks_exact_value() {
    let m = common::market(700, 5);
    let theta = vec![0.1; 5];
    let mc = MonteCarloExpectedMax::new(&m, 100_000, 1).unwrap();
    let exact = DiscreteExpectedMax::new(&m, 2000).unwrap();
    let sel = greedy_k_select(&mc, &theta, 2).unwrap();
    let truth = exact.estimate(&sel.items, &theta).value;
    assert!((sel.value.value - truth).abs() < 4.0 * sel.value.std_error + 1e-3);
}

#[test]
fn iid_exponential_cascade_grows_at_most_logarithmically() {
    let e = DistributionSpec::exponential(1.0).unwrap();
    let rm = myerson_price(&e).revenue;
    for n in [2usize, 4, 8, 16] {
        let items = vec![Item { value: e, cost: common::uniform01() }; n];
        let m = MarketInstance::new(items).unwrap();
        let res = Cascade::default().price(&m, &vec![0.0; n]);
        let total = res.diagnostics.cumulative_revenues.last().copied().unwrap();
        assert!(total <= std::f64::consts::E * (n as f64).ln() * rm + 1e-9, "n = {n}: {total}");
        assert!(total >= rm);
    }
}
