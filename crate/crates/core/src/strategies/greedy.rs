use serde::Serialize;

use super::anonymous::reserve_menu;
use super::{Diagnostics, PricingStrategy, StrategyResult};
use crate::buyer::AttentionMode;
use crate::error::{Error, Result};
use crate::market::MarketInstance;
use crate::rng::stream;

/// Estimated value with its standard error (zero for exact estimators).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// `E[max(0, max_{i ∈ set} φ_i(v_i) − θ_i)]` for arbitrary subsets.
///
/// Implementations hold the raw virtual values and subtract the virtual costs
/// at estimate time, so one estimator serves every cost report.
pub trait ExpectedMax: Send + Sync {
    fn items(&self) -> usize;
    fn estimate(&self, set: &[usize], virtual_costs: &[f64]) -> Estimate;
}

/// Monte Carlo estimator on common random numbers: every subset is scored on
/// the same draws, so marginal gains are not swamped by sampling noise.
#[derive(Debug, Clone)]
pub struct MonteCarloExpectedMax {
    n: usize,
    draws: usize,
    /// Row-major `draws × n` virtual values.
    phi: Vec<f64>,
}

impl MonteCarloExpectedMax {
    pub const DEFAULT_DRAWS: usize = 100_000;

    /// Item `i`'s draws come from stream `i` of `seed`, so they do not depend
    /// on the other items.
    pub fn new(instance: &MarketInstance, draws: usize, seed: u64) -> Result<Self> {
        if draws < 2 {
            return Err(Error::Domain(format!("need at least 2 draws, got {draws}")));
        }
        let n = instance.len();
        let mut phi = vec![0.0; draws * n];
        for i in 0..n {
            let d = instance.value(i);
            let mut rng = stream(seed, i as u64);
            for r in 0..draws {
                phi[r * n + i] = d.phi(d.sample(&mut rng));
            }
        }
        Ok(Self { n, draws, phi })
    }
}

impl ExpectedMax for MonteCarloExpectedMax {
    fn items(&self) -> usize {
        self.n
    }

    fn estimate(&self, set: &[usize], virtual_costs: &[f64]) -> Estimate {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for row in self.phi.chunks_exact(self.n) {
            let m = set.iter().fold(0.0f64, |m, &i| m.max(row[i] - virtual_costs[i]));
            sum += m;
            sum_sq += m * m;
        }
        let k = self.draws as f64;
        let mean = sum / k;
        let var = ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0);
        Estimate {
            value: mean,
            std_error: (var / k).sqrt(),
        }
    }
}

/// Exact expectation for the discretized instance: each value distribution is
/// replaced by `m` equal-mass atoms at the quantile midpoints.
#[derive(Debug, Clone)]
pub struct DiscreteExpectedMax {
    /// Per item, ascending virtual values of its atoms.
    phi: Vec<Vec<f64>>,
}

impl DiscreteExpectedMax {
    pub fn new(instance: &MarketInstance, atoms: usize) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::Domain("need at least one atom".into()));
        }
        let phi = (0..instance.len())
            .map(|i| {
                let d = instance.value(i);
                (0..atoms)
                    .map(|a| d.phi(d.quantile((a as f64 + 0.5) / atoms as f64)))
                    .collect()
            })
            .collect();
        Ok(Self { phi })
    }
}

impl ExpectedMax for DiscreteExpectedMax {
    fn items(&self) -> usize {
        self.phi.len()
    }

    fn estimate(&self, set: &[usize], virtual_costs: &[f64]) -> Estimate {
        let net: Vec<Vec<f64>> = set
            .iter()
            .map(|&i| self.phi[i].iter().map(|z| z - virtual_costs[i]).collect())
            .collect();
        Estimate {
            value: expected_positive_max(&net),
            std_error: 0.0,
        }
    }
}

/// `E[max(0, max_i Z_i)]` for independent `Z_i`, each uniform over the
/// ascending atoms `atoms[i]`. Computed as `∫₀^∞ 1 − ∏ G_i(t) dt`.
pub fn expected_positive_max(atoms: &[Vec<f64>]) -> f64 {
    let mut below: Vec<usize> = atoms.iter().map(|a| a.partition_point(|&z| z <= 0.0)).collect();
    let mut events: Vec<(f64, usize)> = atoms
        .iter()
        .enumerate()
        .flat_map(|(i, a)| a.iter().filter(|&&z| z > 0.0).map(move |&z| (z, i)))
        .collect();
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let joint = |below: &[usize]| {
        below
            .iter()
            .zip(atoms)
            .map(|(&c, a)| c as f64 / a.len() as f64)
            .product::<f64>()
    };
    let mut total = 0.0;
    let mut t = 0.0;
    let mut g = joint(&below);
    for (z, i) in events {
        total += (z - t) * (1.0 - g);
        t = z;
        below[i] += 1;
        g = joint(&below);
    }
    total
}

/// Greedy selection outcome; `items` in the order they were added.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub items: Vec<usize>,
    pub value: Estimate,
}

/// Adds, one at a time, the item with the largest marginal gain in expected
/// positive max virtual value, until `k` items are chosen or no item helps.
/// Ties go to the lowest index.
pub fn greedy_k_select(estimator: &dyn ExpectedMax, virtual_costs: &[f64], k: usize) -> Result<Selection> {
    let n = estimator.items();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k must be in 1..={n}, got {k}")));
    }
    if virtual_costs.len() != n {
        return Err(Error::Domain(format!("{} virtual costs for {n} items", virtual_costs.len())));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut current = Estimate {
        value: 0.0,
        std_error: 0.0,
    };
    while chosen.len() < k {
        let mut best: Option<(f64, usize, Estimate)> = None;
        for x in 0..n {
            if chosen.contains(&x) {
                continue;
            }
            chosen.push(x);
            let est = estimator.estimate(&chosen, virtual_costs);
            chosen.pop();
            let gain = est.value - current.value;
            if best.is_none_or(|(g, _, _)| gain > g) {
                best = Some((gain, x, est));
            }
        }
        match best {
            Some((gain, x, est)) if gain > 1e-12 * current.value.max(1.0) => {
                chosen.push(x);
                current = est;
            }
            _ => break,
        }
    }
    Ok(Selection {
        items: chosen,
        value: current,
    })
}

/// Greedy item selection followed by anonymous virtual pricing of the chosen
/// items. Shows nothing if no item has positive expected net virtual value.
#[derive(Debug, Clone)]
pub struct KLimited<E> {
    pub k: usize,
    pub estimator: E,
}

impl<E: ExpectedMax> KLimited<E> {
    pub fn new(k: usize, estimator: E) -> Result<Self> {
        if k == 0 || k > estimator.items() {
            return Err(Error::Domain(format!("k must be in 1..={}, got {k}", estimator.items())));
        }
        Ok(Self { k, estimator })
    }
}

impl<E: ExpectedMax> PricingStrategy for KLimited<E> {
    fn name(&self) -> &'static str {
        "k-limited"
    }

    fn price(&self, instance: &MarketInstance, virtual_costs: &[f64]) -> StrategyResult {
        let sel = greedy_k_select(&self.estimator, virtual_costs, self.k).expect("k validated at construction");
        let diagnostics = Diagnostics {
            selection: Some(sel.value),
            ..Diagnostics::default()
        };
        reserve_menu(instance, virtual_costs, sel.items, AttentionMode::KLimited, diagnostics)
    }
}

pub fn k_limited_strategy(
    instance: &MarketInstance,
    costs: &[f64],
    k: usize,
    estimator: &dyn ExpectedMax,
) -> Result<StrategyResult> {
    let strategy = KLimited::new(k, estimator)?;
    strategy.run(instance, costs)
}

impl<T: ExpectedMax + ?Sized> ExpectedMax for &T {
    fn items(&self) -> usize {
        (**self).items()
    }

    fn estimate(&self, set: &[usize], virtual_costs: &[f64]) -> Estimate {
        (**self).estimate(set, virtual_costs)
    }
}
