//! The revenue report table.
//!
//! Column order is frozen: the fixed columns come first, then one block per
//! item (`item{i}_cost`, `item{i}_virtual_cost`, `item{i}_price`,
//! `item{i}_sale_prob`, `item{i}_payment`, `item{i}_payment_if_sold`) padded
//! to the largest instance in the table, then `error`. Missing values are
//! empty cells. Floats use the shortest representation that round-trips, so
//! identical runs produce identical bytes.

use std::io::Write;

use crate::config::StrategyKind;
use crate::engine::RevenueReport;
use crate::error::HarnessError;

pub const FIXED_COLUMNS: [&str; 11] = [
    "instance_id",
    "strategy",
    "n",
    "k",
    "seed",
    "revenue_analytic",
    "revenue_mc",
    "mc_stderr",
    "oracle_revenue",
    "ratio",
    "runtime_ms",
];

pub const ITEM_COLUMNS: [&str; 6] = ["cost", "virtual_cost", "price", "sale_prob", "payment", "payment_if_sold"];

/// One table row: a finished experiment, or the identity of one that failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Row {
    Done(RevenueReport),
    Failed {
        instance_id: usize,
        strategy: StrategyKind,
        n: usize,
        seed: u64,
        error: String,
    },
}

impl Row {
    pub fn report(&self) -> Option<&RevenueReport> {
        match self {
            Row::Done(r) => Some(r),
            Row::Failed { .. } => None,
        }
    }

    fn n(&self) -> usize {
        match self {
            Row::Done(r) => r.n,
            Row::Failed { n, .. } => *n,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CsvOptions {
    /// Fill `runtime_ms`. Off by default because timings make output
    /// differ between otherwise identical runs.
    pub timings: bool,
}

pub fn header(max_n: usize) -> Vec<String> {
    let mut h: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    for i in 0..max_n {
        h.extend(ITEM_COLUMNS.iter().map(|c| format!("item{i}_{c}")));
    }
    h.push("error".into());
    h
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn record(row: &Row, max_n: usize, opts: CsvOptions) -> Vec<String> {
    let width = FIXED_COLUMNS.len() + max_n * ITEM_COLUMNS.len() + 1;
    let mut rec = Vec::with_capacity(width);
    match row {
        Row::Done(r) => {
            rec.extend([
                r.instance_id.to_string(),
                r.strategy.name().to_string(),
                r.n.to_string(),
                r.k.map(|k| k.to_string()).unwrap_or_default(),
                r.seed.to_string(),
                num(r.revenue_analytic),
                num(r.revenue_mc),
                num(r.mc_stderr),
                opt(r.oracle_revenue),
                opt(r.ratio),
                if opts.timings { num(r.runtime_ms) } else { String::new() },
            ]);
            for it in &r.items {
                rec.extend([
                    num(it.cost),
                    num(it.virtual_cost),
                    opt(it.price),
                    num(it.sale_prob),
                    opt(it.payment),
                    opt(it.payment_if_sold),
                ]);
            }
        }
        Row::Failed {
            instance_id,
            strategy,
            n,
            seed,
            ..
        } => {
            rec.extend([instance_id.to_string(), strategy.name().to_string(), n.to_string(), String::new(), seed.to_string()]);
        }
    }
    rec.resize(width - 1, String::new());
    rec.push(match row {
        Row::Failed { error, .. } => error.clone(),
        Row::Done(_) => String::new(),
    });
    rec
}

pub fn write_csv<W: Write>(rows: &[Row], out: W, opts: CsvOptions) -> Result<(), HarnessError> {
    let max_n = rows.iter().map(Row::n).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(max_n))?;
    for row in rows {
        w.write_record(record(row, max_n, opts))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[Row], opts: CsvOptions) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf, opts)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ItemReport;

    fn done(n: usize) -> Row {
        Row::Done(RevenueReport {
            instance_id: 0,
            strategy: StrategyKind::BestSingle,
            n,
            k: None,
            seed: 1,
            shown: vec![0],
            items: (0..n)
                .map(|i| ItemReport {
                    cost: 0.1,
                    virtual_cost: 0.2,
                    price: (i == 0).then_some(0.6),
                    sale_prob: if i == 0 { 0.4 } else { 0.0 },
                    payment: None,
                    payment_if_sold: None,
                })
                .collect(),
            revenue_analytic: 0.16,
            revenue_mc: 0.161,
            mc_stderr: 0.001,
            oracle_revenue: None,
            ratio: None,
            runtime_ms: 12.5,
        })
    }

    #[test]
    fn header_is_frozen() {
        let h = header(1);
        assert_eq!(&h[..11], &FIXED_COLUMNS.map(String::from));
        assert_eq!(h[11], "item0_cost");
        assert_eq!(h.last().unwrap(), "error");
        assert_eq!(h.len(), 11 + 6 + 1);
    }

    #[test]
    fn rows_are_padded_and_timings_optional() {
        let failed = Row::Failed {
            instance_id: 1,
            strategy: StrategyKind::Cascade,
            n: 3,
            seed: 2,
            error: "boom".into(),
        };
        let text = to_csv_string(&[done(1), failed], CsvOptions::default()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let widths: Vec<usize> = lines.iter().map(|l| l.split(',').count()).collect();
        assert!(widths.iter().all(|&w| w == 11 + 18 + 1), "{widths:?}");
        assert!(lines[1].starts_with("0,best-single,1,,1,0.16,0.161,0.001,,,,0.1,0.2,0.6,0.4,,,"));
        assert!(lines[2].ends_with(",boom"));
        let timed = to_csv_string(&[done(1)], CsvOptions { timings: true }).unwrap();
        assert!(timed.contains(",12.5,"));
    }

    #[test]
    fn empty_table_has_only_a_header() {
        let text = to_csv_string(&[], CsvOptions::default()).unwrap();
        assert_eq!(text.lines().count(), 1);
    }
}
