#![allow(dead_code)]

use intermediary_core::market::{random_instance, random_value_distribution};
use intermediary_core::rng::stream;
use intermediary_core::{DistributionSpec, FamilyKind, MarketInstance};

pub fn dist(seed: u64, family: usize) -> DistributionSpec {
    random_value_distribution(&mut stream(seed, 0), FamilyKind::ALL[family % 4])
}

pub fn market(seed: u64, n: usize) -> MarketInstance {
    random_instance(&mut stream(seed, 1), n, &FamilyKind::ALL).unwrap()
}

pub fn uniform01() -> DistributionSpec {
    DistributionSpec::uniform(0.0, 1.0).unwrap()
}
