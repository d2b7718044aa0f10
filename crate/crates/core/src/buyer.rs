//! Buyer choice under the three attention models, and exact purchase
//! probabilities for a posted price menu.
//!
//! Rules shared by every consumer (strategies, oracles, simulation):
//! a buyer buys at zero surplus, and among equal surpluses the lowest item
//! index wins. A k-limited buyer is a full-attention buyer who only sees the
//! shown items.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::MarketInstance;
use crate::numeric::adaptive_simpson;

/// Absolute tolerance of each purchase-probability quadrature piece.
pub const QUADRATURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttentionMode {
    /// The buyer compares every shown item.
    Full,
    /// Full attention restricted to at most `k` shown items.
    KLimited,
    /// The buyer scans the shown items in order and takes the first one whose
    /// value is at least its price.
    Cascade,
}

/// Items shown to the buyer and their prices. `shown[j]` is priced at
/// `prices[j]`; order matters only in cascade mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceMenu {
    pub shown: Vec<usize>,
    pub prices: Vec<f64>,
    pub mode: AttentionMode,
}

impl PriceMenu {
    pub fn new(shown: Vec<usize>, prices: Vec<f64>, mode: AttentionMode) -> Result<Self> {
        if shown.len() != prices.len() {
            return Err(Error::Domain(format!(
                "{} shown items but {} prices",
                shown.len(),
                prices.len()
            )));
        }
        if prices.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("menu prices must be finite".into()));
        }
        let mut seen = shown.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("shown items must be distinct".into()));
        }
        Ok(Self { shown, prices, mode })
    }

    pub fn empty(mode: AttentionMode) -> Self {
        Self {
            shown: Vec::new(),
            prices: Vec::new(),
            mode,
        }
    }

    pub fn len(&self) -> usize {
        self.shown.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shown.is_empty()
    }

    pub fn price_of(&self, item: usize) -> Option<f64> {
        self.shown.iter().position(|&i| i == item).map(|j| self.prices[j])
    }

    /// Checks that every shown index refers to an item of `instance`.
    pub fn validate_for(&self, instance: &MarketInstance) -> Result<()> {
        match self.shown.iter().find(|&&i| i >= instance.len()) {
            Some(i) => Err(Error::Domain(format!("menu shows item {i} but the instance has {} items", instance.len()))),
            None => Ok(()),
        }
    }

    fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.shown.iter().copied().zip(self.prices.iter().copied())
    }
}

/// A realized buyer valuation: one value per item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuyerValuation {
    pub values: Vec<f64>,
}

/// What the buyer did.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BuyerOutcome {
    pub bought: Option<usize>,
    pub price_paid: f64,
    pub surplus: f64,
}

impl BuyerOutcome {
    pub const NONE: BuyerOutcome = BuyerOutcome {
        bought: None,
        price_paid: 0.0,
        surplus: 0.0,
    };
}

/// Dispatches on the menu's attention mode.
pub fn choose(values: &[f64], menu: &PriceMenu) -> BuyerOutcome {
    match menu.mode {
        AttentionMode::Full | AttentionMode::KLimited => choose_full(values, menu),
        AttentionMode::Cascade => choose_cascade(values, menu),
    }
}

/// Surplus-maximizing choice among the shown items.
pub fn choose_full(values: &[f64], menu: &PriceMenu) -> BuyerOutcome {
    let mut best: Option<(f64, usize, f64)> = None;
    for (item, price) in menu.entries() {
        let surplus = values[item] - price;
        let better = match best {
            None => true,
            Some((s, i, _)) => surplus > s || (surplus == s && item < i),
        };
        if better {
            best = Some((surplus, item, price));
        }
    }
    match best {
        Some((surplus, item, price)) if surplus >= 0.0 => BuyerOutcome {
            bought: Some(item),
            price_paid: price,
            surplus,
        },
        _ => BuyerOutcome::NONE,
    }
}

/// First shown item, in menu order, with value at least its price.
pub fn choose_cascade(values: &[f64], menu: &PriceMenu) -> BuyerOutcome {
    menu.entries()
        .find(|&(item, price)| values[item] >= price)
        .map(|(item, price)| BuyerOutcome {
            bought: Some(item),
            price_paid: price,
            surplus: values[item] - price,
        })
        .unwrap_or(BuyerOutcome::NONE)
}

/// Probability that the buyer purchases each item (indexed by item; zero for
/// items not shown).
pub fn purchase_probabilities(instance: &MarketInstance, menu: &PriceMenu) -> Vec<f64> {
    let mut probs = vec![0.0; instance.len()];
    match menu.mode {
        AttentionMode::Cascade => {
            let mut reach = 1.0;
            for (item, price) in menu.entries() {
                let d = instance.value(item);
                probs[item] = reach * d.survival(price);
                reach *= d.cdf(price);
            }
        }
        AttentionMode::Full | AttentionMode::KLimited => {
            for (item, price) in menu.entries() {
                probs[item] = full_attention_probability(instance, menu, item, price);
            }
        }
    }
    probs
}

/// `∫_{v ≥ p_i} f_i(v) ∏_{j ≠ i} F_j(v − p_i + p_j) dv`.
fn full_attention_probability(instance: &MarketInstance, menu: &PriceMenu, item: usize, price: f64) -> f64 {
    let d = instance.value(item);
    let a = price.max(d.lo());
    let b = d.grid_upper();
    if a >= b {
        return 0.0;
    }
    let rivals: Vec<(&crate::dist::DistributionSpec, f64)> = menu
        .entries()
        .filter(|&(j, _)| j != item)
        .map(|(j, pj)| (instance.value(j), pj - price))
        .collect();
    let beaten = |v: f64| rivals.iter().map(|(dj, off)| dj.cdf(v + off)).product::<f64>();
    if rivals.is_empty() {
        return d.survival(a);
    }

    // The rival CDFs have kinks where their arguments cross a support end.
    let mut cuts = vec![a, b];
    for (dj, off) in &rivals {
        for end in [dj.lo(), dj.hi()] {
            let v = end - off;
            if v.is_finite() && v > a && v < b {
                cuts.push(v);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let integrand = |v: f64| d.pdf(v) * beaten(v);
    let mut total: f64 = cuts
        .windows(2)
        .map(|w| adaptive_simpson(&integrand, w[0], w[1], QUADRATURE_TOL, 4))
        .sum();
    if !d.hi().is_finite() {
        // Mass beyond the truncation point, with the rival factor frozen at
        // its value there.
        total += d.survival(b) * beaten(b);
    }
    total.clamp(0.0, 1.0)
}

/// `Σ_i P(buy i) (p_i − θ_i)`.
pub fn expected_revenue(instance: &MarketInstance, menu: &PriceMenu, virtual_costs: &[f64]) -> f64 {
    let probs = purchase_probabilities(instance, menu);
    menu.entries()
        .map(|(item, price)| probs[item] * (price - virtual_costs[item]))
        .sum()
}
