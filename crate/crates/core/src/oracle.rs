//! Exact optima on discretized instances, used as the yardstick for every
//! approximation guarantee.
//!
//! Each value distribution becomes `m` equal-mass atoms at its quantile
//! midpoints. All searches run on net quantities: an atom `v` of item `i`
//! becomes `v − θ_i` and a price `p` becomes `p − θ_i`, which leaves buyer
//! surpluses unchanged and turns revenue into `Σ P(buy i)·(p_i − θ_i)`.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::buyer::{AttentionMode, PriceMenu};
use crate::error::{Error, Result};
use crate::market::MarketInstance;
use crate::strategies::expected_positive_max;

/// Upper limit on `n·m` stored atoms.
pub const MAX_ATOMS: usize = 50_000_000;
/// Upper limit on price combinations enumerated by [`oracle_full`].
pub const MAX_FULL_COMBINATIONS: f64 = 2e7;
/// Largest `n` whose orders [`oracle_cascade`] enumerates.
pub const MAX_CASCADE_ITEMS: usize = 8;
/// Largest `n` for [`oracle_best_subset`].
pub const MAX_SUBSET_ITEMS: usize = 15;

/// `m` equal-mass atoms per item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedInstance {
    pub atoms: usize,
    /// Per item, ascending support points.
    pub points: Vec<Vec<f64>>,
    /// Per item, the virtual value `φ_i` of the continuous distribution at
    /// each point.
    pub virtual_values: Vec<Vec<f64>>,
    /// Largest bucket width times bucket mass over all items.
    pub error_bound: f64,
}

impl DiscretizedInstance {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mass(&self) -> f64 {
        1.0 / self.atoms as f64
    }

    fn net_points(&self, virtual_costs: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_costs(virtual_costs)?;
        Ok(self
            .points
            .iter()
            .zip(virtual_costs)
            .map(|(pts, t)| pts.iter().map(|v| v - t).collect())
            .collect())
    }

    fn check_costs(&self, virtual_costs: &[f64]) -> Result<()> {
        if virtual_costs.len() != self.len() {
            return Err(Error::Domain(format!(
                "{} virtual costs for {} items",
                virtual_costs.len(),
                self.len()
            )));
        }
        if virtual_costs.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("virtual costs must be finite".into()));
        }
        Ok(())
    }
}

/// Quantile-midpoint discretization with `m` atoms per item.
pub fn discretize(instance: &MarketInstance, m: usize) -> Result<DiscretizedInstance> {
    if m < 2 {
        return Err(Error::Domain(format!("need at least 2 atoms, got {m}")));
    }
    if instance.len().saturating_mul(m) > MAX_ATOMS {
        return Err(Error::Resource(format!(
            "{} items × {m} atoms exceeds the budget of {MAX_ATOMS} atoms",
            instance.len()
        )));
    }
    let mf = m as f64;
    let mut points = Vec::with_capacity(instance.len());
    let mut virtual_values = Vec::with_capacity(instance.len());
    let mut widest: f64 = 0.0;
    for i in 0..instance.len() {
        let d = instance.value(i);
        let pts: Vec<f64> = (0..m).map(|a| d.quantile((a as f64 + 0.5) / mf)).collect();
        let edges: Vec<f64> = (0..=m)
            .map(|a| match a {
                0 => d.lo(),
                a if a == m => d.grid_upper(),
                a => d.quantile(a as f64 / mf),
            })
            .collect();
        widest = edges.windows(2).fold(widest, |w, e| w.max(e[1] - e[0]));
        virtual_values.push(pts.iter().map(|&v| d.phi(v)).collect());
        points.push(pts);
    }
    Ok(DiscretizedInstance {
        atoms: m,
        points,
        virtual_values,
        error_bound: widest / mf,
    })
}

/// Optimal menu found by an oracle, with its exact discretized revenue.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub menu: PriceMenu,
    pub revenue: f64,
}

/// Exact full-attention revenue on the discretized instance.
///
/// `prices[i]` is item `i`'s net price, `None` when not shown. The buyer
/// takes the highest nonnegative surplus and breaks ties toward the lowest
/// index, so a rival `j < i` must be strictly worse and a rival `j > i` only
/// weakly worse for item `i` to be bought.
fn full_revenue(net: &[Vec<f64>], prices: &[Option<f64>]) -> f64 {
    let shown: Vec<(usize, f64)> = prices
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|p| (i, p)))
        .collect();
    let mut revenue = 0.0;
    let mut ptr = vec![0usize; shown.len()];
    for (si, &(i, pi)) in shown.iter().enumerate() {
        ptr.iter_mut().for_each(|p| *p = 0);
        let m_i = net[i].len() as f64;
        let mut sold = 0.0;
        for &v in &net[i] {
            let s = v - pi;
            if s < 0.0 {
                continue;
            }
            let mut prob = 1.0;
            for (sj, &(j, pj)) in shown.iter().enumerate() {
                if sj == si {
                    continue;
                }
                let atoms = &net[j];
                let p = &mut ptr[sj];
                if j < i {
                    while *p < atoms.len() && atoms[*p] - pj < s {
                        *p += 1;
                    }
                } else {
                    while *p < atoms.len() && atoms[*p] - pj <= s {
                        *p += 1;
                    }
                }
                prob *= *p as f64 / atoms.len() as f64;
                if prob == 0.0 {
                    break;
                }
            }
            sold += prob;
        }
        revenue += pi * sold / m_i;
    }
    revenue
}

fn to_menu(prices: &[Option<f64>], virtual_costs: &[f64], mode: AttentionMode) -> PriceMenu {
    let (shown, raw) = prices
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|p| (i, p + virtual_costs[i])))
        .unzip();
    PriceMenu { shown, prices: raw, mode }
}

/// Exact full-attention (or k-limited) revenue of `menu` on the discretized
/// instance.
pub fn discrete_full_revenue(disc: &DiscretizedInstance, virtual_costs: &[f64], menu: &PriceMenu) -> Result<f64> {
    let net = disc.net_points(virtual_costs)?;
    let mut prices = vec![None; disc.len()];
    for (&i, &p) in menu.shown.iter().zip(&menu.prices) {
        if i >= disc.len() {
            return Err(Error::Domain(format!("menu shows item {i} of {}", disc.len())));
        }
        prices[i] = Some(p - virtual_costs[i]);
    }
    Ok(full_revenue(&net, &prices))
}

/// Revenue-maximizing full-attention menu over all items.
pub fn oracle_full(disc: &DiscretizedInstance, virtual_costs: &[f64]) -> Result<OracleResult> {
    let all: Vec<usize> = (0..disc.len()).collect();
    oracle_full_subset(disc, virtual_costs, &all)
}

/// Net price candidates of one item: its own nonnegative net atoms, ascending.
fn candidates(atoms: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = atoms.iter().copied().filter(|&v| v >= 0.0).collect();
    c.dedup();
    c
}

/// Revenue-maximizing menu restricted to the items of `subset`.
///
/// Every combination of candidate prices (each item's own net atoms, or not
/// shown) is evaluated exactly. Between atoms, an item's revenue is linear in
/// its own price until some buyer type switches items, so the grid optimum is
/// then polished by coordinate ascent over those switching points.
pub fn oracle_full_subset(disc: &DiscretizedInstance, virtual_costs: &[f64], subset: &[usize]) -> Result<OracleResult> {
    let net = disc.net_points(virtual_costs)?;
    if subset.iter().any(|&i| i >= disc.len()) {
        return Err(Error::Domain("subset names a missing item".into()));
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();
    let grids: Vec<Vec<f64>> = subset.iter().map(|&i| candidates(&net[i])).collect();
    let combos: f64 = grids.iter().map(|g| (g.len() + 1) as f64).product();
    if combos > MAX_FULL_COMBINATIONS {
        return Err(Error::Resource(format!(
            "{combos:.3e} price combinations for {} items at m = {}; the oracle handles at most {MAX_FULL_COMBINATIONS:.0e}",
            subset.len(),
            disc.atoms
        )));
    }
    let n = disc.len();
    let empty = OracleResult {
        menu: PriceMenu::empty(AttentionMode::Full),
        revenue: 0.0,
    };
    if subset.is_empty() {
        return Ok(empty);
    }

    // Choice index c for an item: 0 = not shown, c ≥ 1 = grids[k][c − 1].
    let decode = |choice: &[usize]| {
        let mut prices = vec![None; n];
        for (k, &c) in choice.iter().enumerate() {
            if c > 0 {
                prices[subset[k]] = Some(grids[k][c - 1]);
            }
        }
        prices
    };
    let radices: Vec<usize> = grids.iter().map(|g| g.len() + 1).collect();
    let best = (0..radices[0])
        .into_par_iter()
        .map(|first| {
            let mut choice = vec![0usize; radices.len()];
            choice[0] = first;
            let mut best: (f64, Vec<usize>) = (f64::NEG_INFINITY, choice.clone());
            loop {
                let r = full_revenue(&net, &decode(&choice));
                if r > best.0 {
                    best = (r, choice.clone());
                }
                // Odometer over positions 1.., last position fastest.
                let mut k = radices.len();
                loop {
                    if k == 1 {
                        return best;
                    }
                    k -= 1;
                    choice[k] += 1;
                    if choice[k] < radices[k] {
                        break;
                    }
                    choice[k] = 0;
                }
            }
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("at least one candidate");

    let mut prices = decode(&best.1);
    let mut revenue = best.0;
    polish(&net, &subset, &mut prices, &mut revenue);
    if revenue <= 0.0 {
        return Ok(empty);
    }
    Ok(OracleResult {
        menu: to_menu(&prices, virtual_costs, AttentionMode::Full),
        revenue,
    })
}

/// Coordinate ascent over each item's exact switching prices: its own atoms
/// (zero surplus) and `v_i − v_j + p_j` (indifference with a rival), each
/// also approached from just below for ties that break against the item.
fn polish(net: &[Vec<f64>], subset: &[usize], prices: &mut [Option<f64>], revenue: &mut f64) {
    const MAX_SWEEPS: usize = 20;
    for _ in 0..MAX_SWEEPS {
        let mut improved = false;
        for &i in subset {
            let mut cands: Vec<f64> = net[i].clone();
            for &j in subset {
                if let (true, Some(pj)) = (j != i, prices[j]) {
                    for &vi in &net[i] {
                        cands.extend(net[j].iter().map(|vj| vi - vj + pj));
                    }
                }
            }
            cands.retain(|&p| p >= 0.0);
            cands.sort_by(f64::total_cmp);
            cands.dedup();
            let current = prices[i];
            let mut best = (*revenue, current);
            let mut try_price = |p: Option<f64>, prices: &mut [Option<f64>]| {
                prices[i] = p;
                let r = full_revenue(net, prices);
                if r > best.0 * (1.0 + 1e-14) + 1e-300 {
                    best = (r, p);
                }
            };
            try_price(None, prices);
            for &p in &cands {
                try_price(Some(p), prices);
                let below = p - 1e-9 * p.abs().max(1.0);
                if below >= 0.0 {
                    try_price(Some(below), prices);
                }
            }
            prices[i] = best.1;
            if best.1 != current {
                *revenue = best.0;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

/// Best full-attention menu showing at most `k` items: the k-limited optimum.
pub fn oracle_best_k_full(disc: &DiscretizedInstance, virtual_costs: &[f64], k: usize) -> Result<OracleResult> {
    if k == 0 || k > disc.len() {
        return Err(Error::Domain(format!("k must be in 1..={}, got {k}", disc.len())));
    }
    let mut best: Option<OracleResult> = None;
    for size in 1..=k {
        for subset in (0..disc.len()).combinations(size) {
            let r = oracle_full_subset(disc, virtual_costs, &subset)?;
            if best.as_ref().is_none_or(|b| r.revenue > b.revenue) {
                best = Some(r);
            }
        }
    }
    let mut best = best.expect("k ≥ 1");
    best.menu.mode = AttentionMode::KLimited;
    Ok(best)
}

/// Optimal net price of one item in a cascade given the net revenue `r_out`
/// of the items after it: `max_p P(v ≥ p)(p − r_out)` over the item's atoms.
/// Returns `(net price, revenue including r_out)`; the price is `None` when
/// no atom beats the outside option.
fn cascade_step(atoms: &[f64], r_out: f64) -> (Option<f64>, f64) {
    let m = atoms.len() as f64;
    let mut best = (None, r_out);
    let mut a = 0;
    while a < atoms.len() {
        let p = atoms[a];
        // First index of this value: everything from here up is ≥ p.
        let gain = (atoms.len() - a) as f64 / m * (p - r_out);
        if r_out + gain > best.1 {
            best = (Some(p), r_out + gain);
        }
        while a < atoms.len() && atoms[a] == p {
            a += 1;
        }
    }
    best
}

/// Optimal cascade prices for a fixed order on the discretized instance.
/// Items that cannot beat their outside option are priced out of reach
/// (at their top atom plus one) and never sell.
pub fn discrete_cascade(disc: &DiscretizedInstance, virtual_costs: &[f64], order: &[usize]) -> Result<OracleResult> {
    let net = disc.net_points(virtual_costs)?;
    let mut seen = vec![false; disc.len()];
    for &i in order {
        if i >= disc.len() || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Domain(format!("invalid cascade order {order:?}")));
        }
    }
    let mut prices = vec![0.0; order.len()];
    let mut r = 0.0;
    for (pos, &i) in order.iter().enumerate().rev() {
        let (p, next) = cascade_step(&net[i], r);
        prices[pos] = p.unwrap_or(net[i][net[i].len() - 1] + 1.0) + virtual_costs[i];
        r = next;
    }
    Ok(OracleResult {
        menu: PriceMenu {
            shown: order.to_vec(),
            prices,
            mode: AttentionMode::Cascade,
        },
        revenue: r,
    })
}

fn cascade_revenue_on_net(net: &[Vec<f64>], order: &[usize]) -> f64 {
    order.iter().rev().fold(0.0, |r, &i| cascade_step(&net[i], r).1)
}

/// Exact cascade revenue of `menu` on the discretized instance.
pub fn discrete_cascade_revenue(disc: &DiscretizedInstance, virtual_costs: &[f64], menu: &PriceMenu) -> Result<f64> {
    let net = disc.net_points(virtual_costs)?;
    let mut reach = 1.0;
    let mut revenue = 0.0;
    for (&i, &p) in menu.shown.iter().zip(&menu.prices) {
        let atoms = net.get(i).ok_or_else(|| Error::Domain(format!("menu shows item {i}")))?;
        let np = p - virtual_costs[i];
        let below = atoms.partition_point(|&v| v < np) as f64 / atoms.len() as f64;
        revenue += reach * (1.0 - below) * np;
        reach *= below;
    }
    Ok(revenue)
}

/// Best cascade over all orders of all items, each with optimal prices.
pub fn oracle_cascade(disc: &DiscretizedInstance, virtual_costs: &[f64]) -> Result<OracleResult> {
    let n = disc.len();
    if n > MAX_CASCADE_ITEMS {
        return Err(Error::Resource(format!(
            "cascade oracle enumerates {n}! orders; at most {MAX_CASCADE_ITEMS} items are supported"
        )));
    }
    let net = disc.net_points(virtual_costs)?;
    let best = (0..n)
        .into_par_iter()
        .map(|first| {
            let rest: Vec<usize> = (0..n).filter(|&i| i != first).collect();
            let mut best: Option<(f64, Vec<usize>)> = None;
            for tail in rest.iter().copied().permutations(rest.len()) {
                let mut order = Vec::with_capacity(n);
                order.push(first);
                order.extend(tail);
                let r = cascade_revenue_on_net(&net, &order);
                if best.as_ref().is_none_or(|b| r > b.0) {
                    best = Some((r, order));
                }
            }
            best.expect("n ≥ 1")
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .ok_or_else(|| Error::Domain("empty instance".into()))?;
    discrete_cascade(disc, virtual_costs, &best.1)
}

/// Subset of exactly `k` items maximizing `E[max(0, max_{i∈S} φ_i(v_i) − θ_i)]`
/// on the discretization, with that value. Ties go to the lexicographically
/// smallest subset.
pub fn oracle_best_subset(disc: &DiscretizedInstance, virtual_costs: &[f64], k: usize) -> Result<(Vec<usize>, f64)> {
    let n = disc.len();
    if n > MAX_SUBSET_ITEMS {
        return Err(Error::Resource(format!(
            "subset oracle supports at most {MAX_SUBSET_ITEMS} items, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k must be in 1..={n}, got {k}")));
    }
    disc.check_costs(virtual_costs)?;
    let net: Vec<Vec<f64>> = disc
        .virtual_values
        .iter()
        .zip(virtual_costs)
        .map(|(z, t)| z.iter().map(|z| z - t).collect())
        .collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in (0..n).combinations(k) {
        let atoms: Vec<Vec<f64>> = subset.iter().map(|&i| net[i].clone()).collect();
        let value = expected_positive_max(&atoms);
        if best.as_ref().is_none_or(|b| value > b.1) {
            best = Some((subset, value));
        }
    }
    Ok(best.expect("k ≥ 1"))
}
