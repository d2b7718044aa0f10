//! Batches of experiments: run in parallel, reported in config order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, StrategyKind};
use crate::engine::run_experiment;
use crate::error::HarnessError;
use crate::report::Row;

/// Per-strategy aggregate over the successful rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategySummary {
    pub strategy: StrategyKind,
    pub rows: usize,
    pub failed: usize,
    pub mean_revenue: f64,
    /// Over rows with a ratio; `None` when there are none.
    pub min_ratio: Option<f64>,
    pub mean_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub rows: Vec<Row>,
    pub summary: Vec<StrategySummary>,
}

impl SuiteOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.report().is_none())
    }
}

/// Validates every experiment before running any, so a bad config fails
/// fast with the offending entry named.
pub fn validate_all(jobs: &[(usize, ExperimentConfig)]) -> Result<(), HarnessError> {
    for (pos, (_, cfg)) in jobs.iter().enumerate() {
        cfg.validate().map_err(|e| match e {
            HarnessError::Config { field, reason } => {
                HarnessError::config(format!("experiments[{pos}].{field}"), reason)
            }
            other => other,
        })?;
    }
    Ok(())
}

/// Runs every job. A failing experiment becomes a flagged row; the rest of
/// the suite still runs.
pub fn run_suite(jobs: &[(usize, ExperimentConfig)]) -> SuiteOutcome {
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|(id, cfg)| match run_experiment(cfg, *id) {
            Ok(r) => Row::Done(r),
            Err(e) => Row::Failed {
                instance_id: *id,
                strategy: cfg.strategy,
                n: cfg.instance.len(),
                seed: cfg.seed,
                error: e.to_string(),
            },
        })
        .collect();
    let summary = summarize(&rows);
    SuiteOutcome { rows, summary }
}

pub fn summarize(rows: &[Row]) -> Vec<StrategySummary> {
    let mut groups: BTreeMap<StrategyKind, Vec<&Row>> = BTreeMap::new();
    for row in rows {
        let s = match row {
            Row::Done(r) => r.strategy,
            Row::Failed { strategy, .. } => *strategy,
        };
        groups.entry(s).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|(strategy, rows)| {
            let done: Vec<_> = rows.iter().filter_map(|r| r.report()).collect();
            let ratios: Vec<f64> = done.iter().filter_map(|r| r.ratio).collect();
            let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
            let revenues: Vec<f64> = done.iter().map(|r| r.revenue_analytic).collect();
            StrategySummary {
                strategy,
                rows: rows.len(),
                failed: rows.len() - done.len(),
                mean_revenue: mean(&revenues).unwrap_or(0.0),
                min_ratio: ratios.iter().copied().reduce(f64::min),
                mean_ratio: mean(&ratios),
            }
        })
        .collect()
}

/// Plain-text summary table, one line per strategy.
pub fn format_summary(summary: &[StrategySummary]) -> String {
    let mut out = String::from("strategy            rows  failed  mean_revenue  min_ratio  mean_ratio\n");
    let cell = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
    for s in summary {
        out.push_str(&format!(
            "{:<18} {:>5} {:>7} {:>13.6} {:>10} {:>11}\n",
            s.strategy.name(),
            s.rows,
            s.failed,
            s.mean_revenue,
            cell(s.min_ratio),
            cell(s.mean_ratio)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CostMode, GeneratorSpec, OracleConfig, StrategyParams};
    use intermediary_core::FamilyKind;

    fn generator(count: usize) -> GeneratorSpec {
        GeneratorSpec {
            count,
            n_min: 2,
            n_max: 3,
            families: FamilyKind::ALL.to_vec(),
            seed: 11,
            strategies: vec![StrategyKind::AnonymousReserve, StrategyKind::BestSingle],
            params: StrategyParams::default(),
            samples: 2000,
            oracle: OracleConfig { enabled: true, m: 20 },
            payments: false,
        }
    }

    #[test]
    fn empty_suite_is_empty() {
        let out = run_suite(&[]);
        assert!(out.rows.is_empty() && out.summary.is_empty());
    }

    #[test]
    fn rows_follow_config_order_and_failures_are_flagged() {
        let mut jobs = generator(3).expand().unwrap();
        // Costs outside the support pass no validation; the row fails alone.
        jobs[1].1.costs = CostMode::Fixed { values: vec![-5.0; jobs[1].1.instance.len()] };
        let out = run_suite(&jobs);
        assert_eq!(out.rows.len(), 6);
        let ids: Vec<usize> = jobs.iter().map(|j| j.0).collect();
        assert_eq!(ids, vec![0, 0, 1, 1, 2, 2]);
        assert!(out.rows[1].report().is_none());
        assert_eq!(out.failures().count(), 1);
        let bs = out.summary.iter().find(|s| s.strategy == StrategyKind::BestSingle).unwrap();
        assert_eq!((bs.rows, bs.failed), (3, 1));
        assert!(bs.min_ratio.unwrap() <= bs.mean_ratio.unwrap());
        assert!(validate_all(&jobs).is_err());
    }
}
