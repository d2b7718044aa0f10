//! Experiment configuration, read from JSON.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "instance": {"items": [{"value": {"family": "uniform", "lo": 0, "hi": 1},
//!                           "cost": {"family": "exponential", "rate": 4}}]},
//!   "strategy": "cascade",
//!   "params": {"order": [0]},
//!   "costs": {"mode": "fixed", "values": [0.0]},
//!   "seed": 7,
//!   "samples": 100000,
//!   "oracle": {"enabled": true, "m": 50},
//!   "output": "out.csv"
//! }
//! ```

use std::path::{Path, PathBuf};

use intermediary_core::market::random_instance;
use intermediary_core::rng::stream;
use intermediary_core::{FamilyKind, MarketInstance};
use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    BestSingle,
    AnonymousReserve,
    KLimited,
    Cascade,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::BestSingle,
        StrategyKind::AnonymousReserve,
        StrategyKind::KLimited,
        StrategyKind::Cascade,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::BestSingle => "best-single",
            StrategyKind::AnonymousReserve => "anonymous-reserve",
            StrategyKind::KLimited => "k-limited",
            StrategyKind::Cascade => "cascade",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    #[default]
    MonteCarlo,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyParams {
    /// Items shown by the k-limited strategy.
    #[serde(default)]
    pub k: Option<usize>,
    /// Cascade order; defaults to descending Myerson revenue.
    #[serde(default)]
    pub order: Option<Vec<usize>>,
    #[serde(default)]
    pub estimator: EstimatorKind,
    /// Monte Carlo draws, or atoms for the discrete estimator.
    #[serde(default = "default_estimator_size")]
    pub estimator_size: usize,
}

fn default_estimator_size() -> usize {
    100_000
}

impl Default for StrategyParams {
    fn default() -> Self {
        Self {
            k: None,
            order: None,
            estimator: EstimatorKind::default(),
            estimator_size: default_estimator_size(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CostMode {
    /// One cost vector drawn from the cost distributions.
    Sampled,
    Fixed { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default = "default_oracle_m")]
    pub m: usize,
}

fn default_oracle_m() -> usize {
    50
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            m: default_oracle_m(),
        }
    }
}

fn default_samples() -> usize {
    100_000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub instance: MarketInstance,
    pub strategy: StrategyKind,
    #[serde(default)]
    pub params: StrategyParams,
    pub costs: CostMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub oracle: OracleConfig,
    /// Whether to integrate seller payments.
    #[serde(default = "default_true")]
    pub payments: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Checks the invariants serde cannot express.
    pub fn validate(&self) -> Result<(), HarnessError> {
        check_schema(self.schema_version)?;
        let n = self.instance.len();
        if self.samples == 0 {
            return Err(HarnessError::config("samples", "must be at least 1"));
        }
        if let CostMode::Fixed { values } = &self.costs {
            if values.len() != n {
                return Err(HarnessError::config(
                    "costs.values",
                    format!("{} costs for {n} items", values.len()),
                ));
            }
            for (i, &c) in values.iter().enumerate() {
                if !self.instance.cost(i).contains(c) {
                    return Err(HarnessError::config(
                        format!("costs.values[{i}]"),
                        format!("{c} is outside the cost support"),
                    ));
                }
            }
        }
        if self.strategy == StrategyKind::KLimited {
            match self.params.k {
                None => return Err(HarnessError::config("params.k", "required for k-limited")),
                Some(k) if k == 0 || k > n => {
                    return Err(HarnessError::config("params.k", format!("must be in 1..={n}, got {k}")))
                }
                _ => {}
            }
            if self.params.estimator_size < 2 {
                return Err(HarnessError::config("params.estimator_size", "must be at least 2"));
            }
        }
        if let Some(order) = &self.params.order {
            let mut seen = vec![false; n];
            if order.is_empty() {
                return Err(HarnessError::config("params.order", "must not be empty"));
            }
            for &i in order {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(HarnessError::config(
                        "params.order",
                        format!("{order:?} is not an ordering of distinct items below {n}"),
                    ));
                }
            }
        }
        if self.oracle.enabled && self.oracle.m < 2 {
            return Err(HarnessError::config("oracle.m", "must be at least 2"));
        }
        Ok(())
    }
}

/// Random instances for a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
    #[serde(default = "all_families")]
    pub families: Vec<FamilyKind>,
    pub seed: u64,
    pub strategies: Vec<StrategyKind>,
    #[serde(default)]
    pub params: StrategyParams,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default = "default_true")]
    pub payments: bool,
}

fn all_families() -> Vec<FamilyKind> {
    FamilyKind::ALL.to_vec()
}

impl GeneratorSpec {
    fn validate(&self) -> Result<(), HarnessError> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(HarnessError::config(
                "generator.n_min",
                format!("need 1 ≤ n_min ≤ n_max, got {}..={}", self.n_min, self.n_max),
            ));
        }
        if self.families.is_empty() {
            return Err(HarnessError::config("generator.families", "must not be empty"));
        }
        if self.count > 0 && self.strategies.is_empty() {
            return Err(HarnessError::config("generator.strategies", "must not be empty"));
        }
        if self.samples == 0 {
            return Err(HarnessError::config("generator.samples", "must be at least 1"));
        }
        Ok(())
    }

    /// One experiment per (instance, strategy), tagged with the instance's
    /// position, instances in order.
    pub fn expand(&self) -> Result<Vec<(usize, ExperimentConfig)>, HarnessError> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.count * self.strategies.len());
        for j in 0..self.count {
            let mut rng = stream(self.seed, j as u64);
            let n = rng.random_range(self.n_min..=self.n_max);
            let instance = random_instance(&mut rng, n, &self.families)?;
            for &strategy in &self.strategies {
                let mut params = self.params.clone();
                if strategy == StrategyKind::KLimited {
                    params.k = Some(params.k.unwrap_or(1).min(n));
                }
                out.push((j, ExperimentConfig {
                    schema_version: SCHEMA_VERSION,
                    instance: instance.clone(),
                    strategy,
                    params,
                    costs: CostMode::Sampled,
                    seed: self.seed.wrapping_add(j as u64),
                    samples: self.samples,
                    oracle: self.oracle,
                    payments: self.payments,
                    output: None,
                }));
            }
        }
        Ok(out)
    }
}

/// A batch: explicit experiments, generated ones, or both (explicit first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub experiments: Vec<ExperimentConfig>,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SuiteConfig {
    /// Every experiment with its instance id: explicit experiments are
    /// numbered first, generated instances after them.
    pub fn expand(&self) -> Result<Vec<(usize, ExperimentConfig)>, HarnessError> {
        check_schema(self.schema_version)?;
        let mut all: Vec<(usize, ExperimentConfig)> = self.experiments.iter().cloned().enumerate().collect();
        if let Some(g) = &self.generator {
            let offset = all.len();
            all.extend(g.expand()?.into_iter().map(|(j, c)| (offset + j, c)));
        }
        Ok(all)
    }
}

fn check_schema(version: u32) -> Result<(), HarnessError> {
    if version != SCHEMA_VERSION {
        return Err(HarnessError::config(
            "schema_version",
            format!("unsupported version {version}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

/// Parses JSON, reporting the path of the offending field on failure.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        HarnessError::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::config("--config", format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}
