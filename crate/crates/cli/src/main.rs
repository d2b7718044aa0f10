use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harness::check::{self, CheckOptions};
use harness::config::{self, ExperimentConfig, StrategyKind, SuiteConfig};
use harness::engine::{self, run_experiment};
use harness::error::HarnessError;
use harness::report::{write_csv, CsvOptions, Row};
use harness::suite::{format_summary, run_suite, validate_all};
use intermediary_core::oracle::{discretize, oracle_best_k_full, oracle_cascade, oracle_full};
use intermediary_core::payments::seller_payment;
use intermediary_core::strategies::reduce_costs;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "intermediary", version, about = "Posted-price intermediary mechanisms: pricing, simulation, oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the root seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the Monte Carlo sample count.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Enables the oracle with this many atoms per item.
    #[arg(long = "oracle-m", global = true)]
    oracle_m: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fill the runtime_ms column.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Menu, virtual costs and seller payments for one experiment.
    Price,
    /// Analytic and Monte Carlo revenue of one experiment's menu.
    Simulate,
    /// Exact optimum on the discretized instance.
    Oracle,
    /// A batch of experiments with ratios and per-strategy aggregates.
    Suite,
    /// The acceptance checks; exits 4 if any fails.
    Check {
        /// Fewer instances and samples.
        #[arg(long)]
        quick: bool,
        /// Run only these criteria.
        #[arg(long = "criterion", value_name = "ID")]
        criteria: Vec<u8>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, HarnessError> {
    let c = &cli.common;
    if let Some(t) = c.threads {
        if t == 0 {
            return Err(HarnessError::config("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| HarnessError::Resource(e.to_string()))?;
    }
    let csv_opts = CsvOptions { timings: c.timings };
    match &cli.command {
        Command::Price => {
            let cfg = experiment(c)?;
            write_json(&price(&cfg)?, c.out.as_deref().or(cfg.output.as_deref()))?;
        }
        Command::Simulate => {
            let mut cfg = experiment(c)?;
            cfg.oracle.enabled = false;
            cfg.payments = false;
            let rows = [Row::Done(run_experiment(&cfg, 0)?)];
            write_rows(&rows, c.out.as_deref().or(cfg.output.as_deref()), csv_opts)?;
        }
        Command::Oracle => {
            let mut cfg = experiment(c)?;
            cfg.oracle.enabled = true;
            cfg.validate()?;
            write_json(&oracle(&cfg)?, c.out.as_deref().or(cfg.output.as_deref()))?;
        }
        Command::Suite => {
            let mut suite: SuiteConfig = config::load(require_config(c)?)?;
            apply_suite_overrides(&mut suite, c);
            let jobs = suite.expand()?;
            validate_all(&jobs)?;
            let out = run_suite(&jobs);
            write_rows(&out.rows, c.out.as_deref().or(suite.output.as_deref()), csv_opts)?;
            eprint!("{}", format_summary(&out.summary));
            let failed = out.failures().count();
            let first = out.failures().next();
            if let Some(Row::Failed { instance_id, error, .. }) = first {
                eprintln!("{failed} row(s) failed; first: instance {instance_id}: {error}");
                return Ok(3);
            }
        }
        Command::Check { quick, criteria } => {
            let opts = CheckOptions {
                seed: c.seed.unwrap_or(CheckOptions::default().seed),
                quick: *quick,
            };
            let ids: Vec<u8> = if criteria.is_empty() { check::CRITERIA.to_vec() } else { criteria.clone() };
            let mut outcomes = Vec::with_capacity(ids.len());
            for id in ids {
                let o = check::run_criterion(id, &opts)?;
                eprintln!("{}", o.summary_line());
                outcomes.push(o);
            }
            write_text(&check::outcomes_csv(&outcomes)?, c.out.as_deref())?;
            if outcomes.iter().any(|o| !o.passed()) {
                return Ok(4);
            }
        }
    }
    Ok(0)
}

fn require_config(c: &Common) -> Result<&Path, HarnessError> {
    c.config
        .as_deref()
        .ok_or_else(|| HarnessError::config("--config", "this subcommand needs a config file"))
}

fn experiment(c: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg: ExperimentConfig = config::load(require_config(c)?)?;
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(n) = c.samples {
        cfg.samples = n;
    }
    if let Some(m) = c.oracle_m {
        cfg.oracle.enabled = true;
        cfg.oracle.m = m;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn apply_suite_overrides(suite: &mut SuiteConfig, c: &Common) {
    let generated = suite.generator.iter_mut().map(|g| (&mut g.seed, &mut g.samples, &mut g.oracle));
    let explicit = suite.experiments.iter_mut().map(|e| (&mut e.seed, &mut e.samples, &mut e.oracle));
    for (seed, samples, oracle) in explicit.chain(generated) {
        if let Some(s) = c.seed {
            *seed = s;
        }
        if let Some(n) = c.samples {
            *samples = n;
        }
        if let Some(m) = c.oracle_m {
            oracle.enabled = true;
            oracle.m = m;
        }
    }
}

#[derive(Serialize)]
struct PriceOutput {
    strategy: StrategyKind,
    costs: Vec<f64>,
    result: intermediary_core::StrategyResult,
    payments: Vec<intermediary_core::PaymentSchedule>,
}

fn price(cfg: &ExperimentConfig) -> Result<PriceOutput, HarnessError> {
    let strategy = engine::build_strategy(cfg)?;
    let costs = engine::resolve_costs(cfg);
    let result = strategy.run(&cfg.instance, &costs)?;
    let payments = result
        .menu
        .shown
        .iter()
        .map(|&i| seller_payment(strategy.as_ref(), &cfg.instance, &costs, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PriceOutput {
        strategy: cfg.strategy,
        costs,
        result,
        payments,
    })
}

#[derive(Serialize)]
struct OracleOutput {
    strategy: StrategyKind,
    m: usize,
    costs: Vec<f64>,
    virtual_costs: Vec<f64>,
    error_bound: f64,
    menu: intermediary_core::PriceMenu,
    revenue: f64,
}

fn oracle(cfg: &ExperimentConfig) -> Result<OracleOutput, HarnessError> {
    let costs = engine::resolve_costs(cfg);
    let theta = reduce_costs(&cfg.instance, &costs)?;
    let disc = discretize(&cfg.instance, cfg.oracle.m)?;
    let r = match cfg.strategy {
        StrategyKind::BestSingle | StrategyKind::AnonymousReserve => oracle_full(&disc, &theta)?,
        StrategyKind::KLimited => oracle_best_k_full(&disc, &theta, cfg.params.k.unwrap_or(1))?,
        StrategyKind::Cascade => oracle_cascade(&disc, &theta)?,
    };
    Ok(OracleOutput {
        strategy: cfg.strategy,
        m: cfg.oracle.m,
        costs,
        virtual_costs: theta,
        error_bound: disc.error_bound,
        menu: r.menu,
        revenue: r.revenue,
    })
}

fn write_rows(rows: &[Row], out: Option<&Path>, opts: CsvOptions) -> Result<(), HarnessError> {
    match out {
        Some(p) => write_csv(rows, std::fs::File::create(p)?, opts),
        None => write_csv(rows, std::io::stdout().lock(), opts),
    }
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Resource(e.to_string()))?;
    text.push('\n');
    write_text(&text, out)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<(), HarnessError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
