//! The acceptance checks, each a function of a root seed.
//!
//! Every check returns its individual comparisons as [`Measurement`]s; a
//! criterion passes when all of them hold. Ratio checks against discretized
//! oracles allow a budget of 2% of the oracle revenue for discretization
//! error, and criterion 3 measures that budget with an m-convergence sweep.

use std::f64::consts::E;

use intermediary_core::buyer::expected_revenue;
use intermediary_core::market::{random_instance, random_value_distribution, Item};
use intermediary_core::oracle::{
    discrete_cascade, discrete_full_revenue, discretize, oracle_best_subset, oracle_cascade, oracle_full,
};
use intermediary_core::payments::{
    empirical_payment, identity_samples, revenue_identity_check, sale_probability_profile, seller_payment,
    truthfulness_probe,
};
use intermediary_core::rng::{stream, Stream};
use intermediary_core::single_item::exponential_bound;
use intermediary_core::strategies::{
    greedy_k_select, reduce_costs, DiscreteExpectedMax, MonteCarloExpectedMax,
};
use intermediary_core::{
    myerson_price, price_with_outside_option, AnonymousReserve, BestSingleItem, Cascade, DistributionSpec, FamilyKind,
    KLimited, MarketInstance, PricingStrategy,
};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::{CostMode, EstimatorKind, ExperimentConfig, OracleConfig, StrategyKind, StrategyParams, SCHEMA_VERSION};
use crate::error::HarnessError;
use crate::report::{to_csv_string, CsvOptions};
use crate::suite::run_suite;

/// Share of the oracle revenue allowed for discretization error.
pub const DISCRETIZATION_BUDGET: f64 = 0.02;
pub const ORACLE_M: usize = 50;
pub const CRITERIA: [u8; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub seed: u64,
    /// Fewer instances and samples; same comparisons and tolerances.
    pub quick: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { seed: 2024, quick: false }
    }
}

impl CheckOptions {
    fn count(&self, full: usize) -> usize {
        if self.quick {
            (full / 5).max(2)
        } else {
            full
        }
    }

    fn draws(&self, full: usize) -> usize {
        if self.quick {
            (full / 10).max(1000)
        } else {
            full
        }
    }

    /// Independent stream `j` of criterion `id`.
    fn rng(&self, id: u8, j: u64) -> Stream {
        stream(self.seed, (u64::from(id) << 32) | j)
    }

    fn sub_seed(&self, id: u8, j: u64) -> u64 {
        self.rng(id, j).random()
    }
}

/// One comparison: `measured` against `bound` under `relation`.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub case: String,
    pub measured: f64,
    pub relation: &'static str,
    pub bound: f64,
    pub pass: bool,
}

impl Measurement {
    pub fn at_least(case: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            case: case.into(),
            measured,
            relation: ">=",
            bound,
            pass: measured >= bound,
        }
    }

    pub fn at_most(case: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            case: case.into(),
            measured,
            relation: "<=",
            bound,
            pass: measured <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub measurements: Vec<Measurement>,
}

impl CriterionOutcome {
    pub fn passed(&self) -> bool {
        !self.measurements.is_empty() && self.measurements.iter().all(|m| m.pass)
    }

    /// The failing measurement furthest past its bound, if any.
    pub fn worst_failure(&self) -> Option<&Measurement> {
        self.measurements
            .iter()
            .filter(|m| !m.pass)
            .max_by(|a, b| (a.measured - a.bound).abs().total_cmp(&(b.measured - b.bound).abs()))
    }

    /// `criterion N (name): PASS|FAIL`, with the worst failure appended.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut line = format!(
            "criterion {:>2} ({}): {verdict} [{} comparisons]",
            self.id,
            self.name,
            self.measurements.len()
        );
        if let Some(m) = self.worst_failure() {
            line.push_str(&format!(" worst: {} {} {} {}", m.case, m.measured, m.relation, m.bound));
        }
        line
    }
}

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "closed-form anchors",
        2 => "hazard identity and MHR grid",
        3 => "anonymous reserve half approximation",
        4 => "random-order cascade half approximation",
        5 => "best single item log bound",
        6 => "greedy subset selection",
        7 => "k-limited pipeline",
        8 => "seller monotonicity",
        9 => "payments",
        10 => "exponential domination",
        11 => "determinism across thread counts",
        _ => "unknown",
    }
}

pub fn run_criterion(id: u8, opts: &CheckOptions) -> Result<CriterionOutcome, HarnessError> {
    let measurements = match id {
        1 => anchors()?,
        2 => hazard_identity(opts)?,
        3 => anonymous_reserve_ratio(opts)?,
        4 => cascade_ratio(opts)?,
        5 => best_single_ratio(opts)?,
        6 => greedy_selection(opts)?,
        7 => k_limited_ratio(opts)?,
        8 => seller_monotonicity(opts)?,
        9 => payments(opts)?,
        10 => exponential_domination(opts)?,
        11 => determinism(opts)?,
        _ => return Err(HarnessError::config("criterion", format!("no criterion {id}"))),
    };
    Ok(CriterionOutcome {
        id,
        name: criterion_name(id),
        measurements,
    })
}

pub fn run_all(opts: &CheckOptions) -> Result<Vec<CriterionOutcome>, HarnessError> {
    CRITERIA.iter().map(|&id| run_criterion(id, opts)).collect()
}

/// `criterion,case,measured,relation,bound,pass`, one row per comparison.
pub fn outcomes_csv(outcomes: &[CriterionOutcome]) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["criterion", "case", "measured", "relation", "bound", "pass"])?;
    for o in outcomes {
        for m in &o.measurements {
            w.write_record([
                o.id.to_string(),
                m.case.clone(),
                format!("{}", m.measured),
                m.relation.to_string(),
                format!("{}", m.bound),
                m.pass.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Resource(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn mixed_instance(opts: &CheckOptions, id: u8, j: u64, n: usize) -> Result<MarketInstance, HarnessError> {
    Ok(random_instance(&mut opts.rng(id, j), n, &FamilyKind::ALL)?)
}

fn experiment(instance: MarketInstance, strategy: StrategyKind, params: StrategyParams, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        instance,
        strategy,
        params,
        costs: CostMode::Sampled,
        seed,
        samples: 10_000,
        oracle: OracleConfig {
            enabled: true,
            m: ORACLE_M,
        },
        payments: false,
        output: None,
    }
}

/// Runs a suite and turns each row's ratio into a measurement against
/// `bound − budget`.
fn ratio_rows(
    jobs: &[(usize, ExperimentConfig)],
    label: impl Fn(usize) -> String,
    bound: impl Fn(&ExperimentConfig) -> f64,
) -> Result<Vec<Measurement>, HarnessError> {
    let out = run_suite(jobs);
    let mut ms = Vec::with_capacity(jobs.len());
    for ((pos, (_, cfg)), row) in jobs.iter().enumerate().zip(&out.rows) {
        let Some(r) = row.report() else {
            return Err(HarnessError::Resource(format!("{} failed: {row:?}", label(pos))));
        };
        let oracle = r.oracle_revenue.unwrap_or(0.0);
        let b = bound(cfg);
        ms.push(Measurement::at_least(
            label(pos),
            r.revenue_analytic,
            b * oracle - DISCRETIZATION_BUDGET * oracle,
        ));
    }
    Ok(ms)
}

fn anchors() -> Result<Vec<Measurement>, HarnessError> {
    let exp = myerson_price(&DistributionSpec::exponential(1.0)?);
    let uni = myerson_price(&DistributionSpec::uniform(0.0, 1.0)?);
    Ok(vec![
        Measurement::at_most("exponential price error", (exp.price - 1.0).abs(), 1e-6),
        Measurement::at_most("exponential revenue error", (exp.revenue - (-1.0f64).exp()).abs(), 1e-6),
        Measurement::at_most("uniform price error", (uni.price - 0.5).abs(), 1e-6),
        Measurement::at_most("uniform revenue error", (uni.revenue - 0.25).abs(), 1e-6),
    ])
}

fn hazard_identity(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let mut ms = Vec::new();
    for j in 0..opts.count(100) {
        let family = FamilyKind::ALL[j % 4];
        let d = random_value_distribution(&mut opts.rng(2, j as u64), family);
        let dip = [d.hazard_violation(1000), d.virtual_value_violation(1000), d.virtual_cost_violation(1000)]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max);
        ms.push(Measurement::at_most(format!("dist {j} {family:?} monotone dip"), dip, 0.0));
        let err = d
            .grid(40)
            .map(|z| (d.cdf(z) - (1.0 - (-d.integrated_hazard(z, 10_000)).exp())).abs())
            .fold(0.0, f64::max);
        ms.push(Measurement::at_most(format!("dist {j} {family:?} cdf vs hazard"), err, 1e-6));
    }
    Ok(ms)
}

fn anonymous_reserve_ratio(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let count = opts.count(50);
    let mut jobs = Vec::with_capacity(count);
    for j in 0..count {
        let n = 2 + j % 2;
        let inst = mixed_instance(opts, 3, j as u64, n)?;
        jobs.push((j, experiment(inst, StrategyKind::AnonymousReserve, StrategyParams::default(), opts.sub_seed(3, 1_000 + j as u64))));
    }
    let mut ms = ratio_rows(&jobs, |j| format!("instance {j} revenue vs oracle"), |_| 0.5)?;

    // Budget validation: the optimum moves little when m doubles, and the
    // strategy's menu is valued about the same on the grid as exactly.
    for (j, cfg) in jobs.iter().take(opts.count(10)) {
        let costs = crate::engine::resolve_costs(cfg);
        let theta = reduce_costs(&cfg.instance, &costs)?;
        let coarse = discretize(&cfg.instance, ORACLE_M)?;
        let fine = discretize(&cfg.instance, 2 * ORACLE_M)?;
        let o50 = oracle_full(&coarse, &theta)?.revenue;
        let o100 = oracle_full(&fine, &theta)?.revenue;
        ms.push(Measurement::at_most(
            format!("instance {j} oracle m=50 vs m=100"),
            (o100 - o50).abs(),
            DISCRETIZATION_BUDGET * o100,
        ));
        let revenue = expected_revenue(&cfg.instance, &AnonymousReserve.price(&cfg.instance, &theta).menu, &theta);
        ms.push(Measurement::at_least(
            format!("instance {j} revenue vs oracle m=100"),
            revenue,
            (0.5 - DISCRETIZATION_BUDGET) * o100,
        ));
        let menu = AnonymousReserve.price(&cfg.instance, &theta).menu;
        let on_grid = discrete_full_revenue(&coarse, &theta, &menu)?;
        ms.push(Measurement::at_most(
            format!("instance {j} menu on grid vs exact"),
            (revenue - on_grid).abs(),
            DISCRETIZATION_BUDGET * o50,
        ));
    }
    Ok(ms)
}

fn cascade_ratio(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let count = opts.count(50);
    let mut jobs = Vec::with_capacity(count);
    for j in 0..count {
        let n = 3 + j % 4;
        let inst = mixed_instance(opts, 4, j as u64, n)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut opts.rng(4, 1_000 + j as u64));
        let params = StrategyParams {
            order: Some(order),
            ..StrategyParams::default()
        };
        jobs.push((j, experiment(inst, StrategyKind::Cascade, params, opts.sub_seed(4, 2_000 + j as u64))));
    }
    let mut ms = ratio_rows(&jobs, |j| format!("instance {j} revenue vs oracle"), |_| 0.5)?;
    // On the grid itself the oracle is exact, so no budget is needed there.
    for (j, cfg) in &jobs {
        let theta = reduce_costs(&cfg.instance, &crate::engine::resolve_costs(cfg))?;
        let disc = discretize(&cfg.instance, ORACLE_M)?;
        let order = cfg.params.order.as_deref().expect("order is set");
        let mine = discrete_cascade(&disc, &theta, order)?.revenue;
        let best = oracle_cascade(&disc, &theta)?.revenue;
        ms.push(Measurement::at_least(format!("instance {j} on grid"), mine, 0.5 * best - 1e-6));
    }
    Ok(ms)
}

fn best_single_ratio(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let count = opts.count(30);
    let mut jobs = Vec::with_capacity(count);
    for j in 0..count {
        let n = if j % 2 == 0 { 4 } else { 8 };
        let inst = mixed_instance(opts, 5, j as u64, n)?;
        let mut cfg = experiment(inst, StrategyKind::BestSingle, StrategyParams::default(), opts.sub_seed(5, 1_000 + j as u64));
        // The yardstick is the best cascade, not the best full-attention menu.
        cfg.oracle.enabled = false;
        jobs.push((j, cfg));
    }
    let out = run_suite(&jobs);
    let mut ms = Vec::new();
    for ((j, cfg), row) in jobs.iter().zip(&out.rows) {
        let r = row
            .report()
            .ok_or_else(|| HarnessError::Resource(format!("instance {j} failed: {row:?}")))?;
        let theta: Vec<f64> = r.items.iter().map(|it| it.virtual_cost).collect();
        let best = oracle_cascade(&discretize(&cfg.instance, ORACLE_M)?, &theta)?.revenue;
        let n = cfg.instance.len() as f64;
        ms.push(Measurement::at_least(
            format!("instance {j} n={n} revenue vs cascade oracle"),
            r.revenue_analytic,
            best / (E * n.ln()) - DISCRETIZATION_BUDGET * best,
        ));
    }
    let e1 = DistributionSpec::exponential(1.0)?;
    let free = DistributionSpec::uniform(0.0, 1.0)?;
    for n in [2usize, 4, 8, 16] {
        let inst = MarketInstance::new(vec![Item { value: e1, cost: free }; n])?;
        let zero = vec![0.0; n];
        let cascade = expected_revenue(&inst, &Cascade::default().price(&inst, &zero).menu, &zero);
        let single = expected_revenue(&inst, &BestSingleItem.price(&inst, &zero).menu, &zero);
        ms.push(Measurement::at_most(
            format!("iid exponential n={n} cascade/single"),
            cascade / single,
            E * (n as f64).ln(),
        ));
    }
    Ok(ms)
}

fn greedy_selection(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let bound = 1.0 - (-1.0f64).exp();
    let m = 60;
    let mut ms = Vec::new();
    for j in 0..opts.count(30) {
        let mut rng = opts.rng(6, 1_000 + j as u64);
        let n = rng.random_range(2..=10usize);
        let k = rng.random_range(1..=n.min(4));
        let inst = mixed_instance(opts, 6, j as u64, n)?;
        let theta = reduce_costs(&inst, &inst.draw_costs(&mut rng))?;

        let exact = DiscreteExpectedMax::new(&inst, m)?;
        let g = greedy_k_select(&exact, &theta, k)?;
        let (_, best) = oracle_best_subset(&discretize(&inst, m)?, &theta, k)?;
        ms.push(Measurement::at_least(format!("instance {j} n={n} k={k} exact"), g.value.value, bound * best - 1e-9));

        let mc = MonteCarloExpectedMax::new(&inst, opts.draws(100_000), rng.random())?;
        let sel = greedy_k_select(&mc, &theta, k)?;
        let (_, truth) = oracle_best_subset(&discretize(&inst, 2000)?, &theta, k)?;
        if truth > 0.0 {
            ms.push(Measurement::at_least(
                format!("instance {j} n={n} k={k} monte carlo ratio"),
                sel.value.value / truth,
                bound - 3.0 * sel.value.std_error / truth,
            ));
        }
    }
    Ok(ms)
}

fn k_limited_ratio(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let count = opts.count(20);
    let mut jobs = Vec::with_capacity(count);
    for j in 0..count {
        let n = 2 + j % 3;
        let k = 1 + (j / 3) % 2;
        let inst = mixed_instance(opts, 7, j as u64, n)?;
        let params = StrategyParams {
            k: Some(k),
            estimator: EstimatorKind::MonteCarlo,
            estimator_size: opts.draws(100_000),
            ..StrategyParams::default()
        };
        jobs.push((j, experiment(inst, StrategyKind::KLimited, params, opts.sub_seed(7, 1_000 + j as u64))));
    }
    let bound = (E - 1.0) / (2.0 * E);
    ratio_rows(
        &jobs,
        |j| format!("instance {j} n={} k={} revenue vs oracle", jobs[j].1.instance.len(), jobs[j].1.params.k.unwrap_or(0)),
        |_| bound,
    )
}

/// A 20-point sweep over the bulk of `dist`'s support.
fn cost_sweep(dist: &DistributionSpec, points: usize) -> Vec<f64> {
    let top = dist.grid_upper().min(dist.quantile(0.999));
    (0..points)
        .map(|j| dist.lo() + (top - dist.lo()) * j as f64 / (points - 1) as f64)
        .collect()
}

fn all_strategies(inst: &MarketInstance, k: usize) -> Result<Vec<Box<dyn PricingStrategy>>, HarnessError> {
    Ok(vec![
        Box::new(BestSingleItem),
        Box::new(AnonymousReserve),
        Box::new(KLimited::new(k, DiscreteExpectedMax::new(inst, 200)?)?),
        Box::new(Cascade::default()),
    ])
}

fn seller_monotonicity(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let slack = 1e-6 + 1e-8;
    let mut ms = Vec::new();
    for j in 0..opts.count(20) {
        let n = 1 + j % 4;
        let inst = mixed_instance(opts, 8, j as u64, n)?;
        let costs = inst.draw_costs(&mut opts.rng(8, 1_000 + j as u64));
        for s in all_strategies(&inst, n.min(2))? {
            for i in 0..n {
                let p = sale_probability_profile(s.as_ref(), &inst, &costs, i, &cost_sweep(inst.cost(i), 20))?;
                let rise = p.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
                ms.push(Measurement::at_most(format!("instance {j} {} item {i} largest rise", s.name()), rise, slack));
            }
        }
    }
    Ok(ms)
}

fn payments(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let mut ms = Vec::new();
    for j in 0..opts.count(5) {
        let inst = mixed_instance(opts, 9, j as u64, 2)?;
        let costs = inst.draw_costs(&mut opts.rng(9, 1_000 + j as u64));
        let mut reports = cost_sweep(inst.cost(0), 20);
        reports.push(costs[0]);
        for s in all_strategies(&inst, 1)? {
            let u = truthfulness_probe(s.as_ref(), &inst, &costs, 0, &reports)?;
            let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            ms.push(Measurement::at_least(format!("instance {j} {} truthful utility", s.name()), u[20], best - 1e-4));
        }
    }

    // 10⁶ (cost, value) pairings: 500 cost draws against 2000 value draws.
    let (cost_draws, value_draws) = if opts.quick { (100, 1000) } else { (500, 2000) };
    let u = DistributionSpec::uniform(0.0, 1.0)?;
    let single = MarketInstance::with_common_cost(&[u], u)?;
    let three = mixed_instance(opts, 9, 2_000, 3)?;
    let cases: [(&str, &MarketInstance, &dyn PricingStrategy); 2] = [
        ("single uniform item", &single, &BestSingleItem),
        ("three items anonymous reserve", &three, &AnonymousReserve),
    ];
    for (label, inst, s) in cases {
        let (cs, vs) = identity_samples(inst, cost_draws, value_draws, opts.sub_seed(9, 3_000));
        let chk = revenue_identity_check(s, inst, &cs, &vs)?;
        ms.push(Measurement::at_most(
            format!("{label} identity discrepancy"),
            chk.discrepancy.abs(),
            4.0 * chk.std_error,
        ));
    }

    let inst = mixed_instance(opts, 9, 4_000, 2)?;
    let costs = inst.draw_costs(&mut opts.rng(9, 4_001));
    let half = opts.draws(20_000);
    let (_, values) = identity_samples(&inst, 0, 2 * half, opts.sub_seed(9, 4_002));
    let (a, b) = values.split_at(half);
    let pa = empirical_payment(&AnonymousReserve, &inst, &costs, 0, a, 256)?;
    let pb = empirical_payment(&AnonymousReserve, &inst, &costs, 0, b, 256)?;
    let se = pa.payment_if_sold_std_error.hypot(pb.payment_if_sold_std_error);
    ms.push(Measurement::at_most(
        "payment_if_sold across value halves",
        (pa.schedule.payment_if_sold - pb.schedule.payment_if_sold).abs(),
        4.0 * se,
    ));
    let exact = seller_payment(&AnonymousReserve, &inst, &costs, 0)?;
    ms.push(Measurement::at_most(
        "payment_if_sold sampled vs exact",
        (pa.schedule.payment_if_sold - exact.payment_if_sold).abs(),
        4.0 * pa.payment_if_sold_std_error + 1e-3,
    ));
    Ok(ms)
}

fn exponential_domination(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let mut ms = Vec::new();
    for j in 0..opts.count(100) {
        let mut rng = opts.rng(10, j as u64);
        let family = FamilyKind::ALL[j % 4];
        let d = random_value_distribution(&mut rng, family);
        let r_out = rng.random_range(0.0..2.0);
        let rm = myerson_price(&d).revenue;
        let dr = price_with_outside_option(&d, 0.0, r_out)?.incremental_revenue;
        ms.push(Measurement::at_most(
            format!("pair {j} {family:?} r_out={r_out:.4}"),
            dr,
            exponential_bound(rm, r_out)? + 1e-9,
        ));
    }
    Ok(ms)
}

/// A small mixed suite, rendered to CSV under one and eight worker threads.
fn determinism(opts: &CheckOptions) -> Result<Vec<Measurement>, HarnessError> {
    let generator = crate::config::GeneratorSpec {
        count: 3,
        n_min: 2,
        n_max: 3,
        families: FamilyKind::ALL.to_vec(),
        seed: opts.sub_seed(11, 0),
        strategies: StrategyKind::ALL.to_vec(),
        params: StrategyParams {
            k: Some(2),
            estimator_size: 20_000,
            ..StrategyParams::default()
        },
        samples: 20_000,
        oracle: OracleConfig { enabled: true, m: 20 },
        payments: true,
    };
    let jobs = generator.expand()?;
    let render = |threads: usize| -> Result<String, HarnessError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| HarnessError::Resource(e.to_string()))?;
        pool.install(|| to_csv_string(&run_suite(&jobs).rows, CsvOptions::default()))
    };
    let one = render(1)?;
    let eight = render(8)?;
    let again = render(8)?;
    let same = |a: &str, b: &str| f64::from(u8::from(a == b));
    Ok(vec![
        Measurement::at_least("suite csv 1 vs 8 threads identical", same(&one, &eight), 1.0),
        Measurement::at_least("suite csv repeated run identical", same(&eight, &again), 1.0),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_pass() {
        let o = run_criterion(1, &CheckOptions::default()).unwrap();
        assert!(o.passed(), "{}", o.summary_line());
    }

    #[test]
    fn unknown_criterion_is_a_config_error() {
        assert_eq!(run_criterion(12, &CheckOptions::default()).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn csv_lists_every_measurement() {
        let o = run_criterion(1, &CheckOptions::default()).unwrap();
        let text = outcomes_csv(&[o]).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("criterion,case,measured,relation,bound,pass\n"));
    }
}
