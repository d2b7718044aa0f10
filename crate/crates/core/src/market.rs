//! Market instances: one (value distribution, cost distribution) pair per
//! seller, plus a seeded generator of random MHR instances.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};

/// One seller's item: the buyer's value distribution for it and the
/// seller's cost distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub value: DistributionSpec,
    pub cost: DistributionSpec,
}

/// `n ≥ 1` items with mutually independent value and cost distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct MarketInstance {
    items: Vec<Item>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    items: Vec<Item>,
}

impl TryFrom<RawInstance> for MarketInstance {
    type Error = Error;
    fn try_from(raw: RawInstance) -> Result<Self> {
        Self::new(raw.items)
    }
}

impl From<MarketInstance> for RawInstance {
    fn from(m: MarketInstance) -> Self {
        RawInstance { items: m.items }
    }
}

impl MarketInstance {
    pub fn new(items: Vec<Item>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one item".into()));
        }
        Ok(Self { items })
    }

    /// Builds an instance from value distributions, giving every seller the
    /// same cost distribution.
    pub fn with_common_cost(values: &[DistributionSpec], cost: DistributionSpec) -> Result<Self> {
        Self::new(values.iter().map(|&value| Item { value, cost }).collect())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn value(&self, i: usize) -> &DistributionSpec {
        &self.items[i].value
    }

    pub fn cost(&self, i: usize) -> &DistributionSpec {
        &self.items[i].cost
    }

    /// Replaces every value distribution by `f(i, value)`.
    pub fn map_values<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, &DistributionSpec) -> Result<DistributionSpec>,
    {
        let items = self
            .items
            .iter()
            .enumerate()
            .map(|(i, it)| Ok(Item { value: f(i, &it.value)?, cost: it.cost }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(items)
    }

    /// One buyer valuation vector.
    pub fn draw_values<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.items.iter().map(|it| it.value.sample(rng)).collect()
    }

    /// One seller cost vector.
    pub fn draw_costs<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.items.iter().map(|it| it.cost.sample(rng)).collect()
    }

    /// Cost vector with every seller at the bottom of their cost support,
    /// where the virtual cost equals the cost.
    pub fn lowest_costs(&self) -> Vec<f64> {
        self.items.iter().map(|it| it.cost.lo()).collect()
    }
}

/// Distribution families available to the random generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Exponential,
    Uniform,
    ShiftedExponential,
    TruncatedNormal,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] = [
        FamilyKind::Exponential,
        FamilyKind::Uniform,
        FamilyKind::ShiftedExponential,
        FamilyKind::TruncatedNormal,
    ];
}

/// Random value distribution of the given family with parameters on the
/// scale of roughly one unit of value.
pub fn random_value_distribution<R: Rng + ?Sized>(rng: &mut R, kind: FamilyKind) -> DistributionSpec {
    let d = match kind {
        FamilyKind::Exponential => DistributionSpec::exponential(rng.random_range(0.5..3.0)),
        FamilyKind::Uniform => {
            let lo = rng.random_range(0.0..1.0);
            DistributionSpec::uniform(lo, lo + rng.random_range(0.2..2.0))
        }
        FamilyKind::ShiftedExponential => {
            DistributionSpec::shifted_exponential(rng.random_range(0.5..3.0), rng.random_range(0.0..1.0))
        }
        FamilyKind::TruncatedNormal => {
            DistributionSpec::truncated_normal(rng.random_range(-0.5..2.0), rng.random_range(0.3..1.5))
        }
    };
    d.expect("generator parameters are always valid")
}

/// Random cost distribution, on a smaller scale than values so trade is
/// usually worthwhile.
pub fn random_cost_distribution<R: Rng + ?Sized>(rng: &mut R, kind: FamilyKind) -> DistributionSpec {
    let d = match kind {
        FamilyKind::Exponential => DistributionSpec::exponential(rng.random_range(2.0..8.0)),
        FamilyKind::Uniform => {
            let lo = rng.random_range(0.0..0.2);
            DistributionSpec::uniform(lo, lo + rng.random_range(0.1..0.6))
        }
        FamilyKind::ShiftedExponential => {
            DistributionSpec::shifted_exponential(rng.random_range(3.0..8.0), rng.random_range(0.0..0.2))
        }
        FamilyKind::TruncatedNormal => {
            DistributionSpec::truncated_normal(rng.random_range(-0.3..0.3), rng.random_range(0.1..0.4))
        }
    };
    d.expect("generator parameters are always valid")
}

/// Random instance with `n` items whose families are drawn from `pool`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, pool: &[FamilyKind]) -> Result<MarketInstance> {
    if pool.is_empty() {
        return Err(Error::InvalidInstance("family pool is empty".into()));
    }
    let items = (0..n)
        .map(|_| {
            let vk = pool[rng.random_range(0..pool.len())];
            let ck = pool[rng.random_range(0..pool.len())];
            Item {
                value: random_value_distribution(rng, vk),
                cost: random_cost_distribution(rng, ck),
            }
        })
        .collect();
    MarketInstance::new(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn empty_instance_rejected() {
        assert!(matches!(MarketInstance::new(vec![]), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn instance_json_round_trip() {
        let text = r#"{"items":[{"value":{"family":"uniform","lo":0.0,"hi":1.0},"cost":{"family":"exponential","rate":2.0}}]}"#;
        let m: MarketInstance = serde_json::from_str(text).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(serde_json::to_string(&m).unwrap(), text);
        assert!(serde_json::from_str::<MarketInstance>(r#"{"items":[]}"#).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let a = random_instance(&mut stream(3, 0), 4, &FamilyKind::ALL).unwrap();
        let b = random_instance(&mut stream(3, 0), 4, &FamilyKind::ALL).unwrap();
        assert_eq!(a, b);
    }
}
