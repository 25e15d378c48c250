//! Seeded Monte Carlo campaigns: random tournaments, several vertex-order
//! strategies per tournament, pipeline outcomes aggregated per strategy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use crate::constants::{constants_for, practical_constants, Constants, ConstantsMode};
use crate::error::{Error, Result};
use crate::order::{upper_bound_witness, VertexOrder};
use crate::packing::{find_clique_packing, PackingOptions, PackingResult};
use crate::seed::RngSeed;
use crate::tournament::Tournament;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStrategy {
    Random,
    Identity,
    Witness,
    DegreeSorted,
}

impl OrderStrategy {
    pub const ALL: [OrderStrategy; 4] = [Self::Random, Self::Identity, Self::Witness, Self::DegreeSorted];

    pub fn name(self) -> &'static str {
        match self {
            Self::Random => "random",
            Self::Identity => "identity",
            Self::Witness => "witness",
            Self::DegreeSorted => "degree_sorted",
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl std::str::FromStr for OrderStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::parameter(format!("unknown order strategy {s:?}")))
    }
}

/// The vertex order a strategy assigns to `t`.
pub fn strategy_order(t: &Tournament, strategy: OrderStrategy, seed: RngSeed) -> Result<VertexOrder> {
    let nv = t.num_vertices();
    Ok(match strategy {
        OrderStrategy::Random => VertexOrder::random(nv, &mut seed.rng()),
        OrderStrategy::Identity => VertexOrder::identity(nv),
        OrderStrategy::Witness => upper_bound_witness(t)?.order,
        OrderStrategy::DegreeSorted => {
            // sinks first keeps most edges pointing right-to-left
            let mut seq: Vec<usize> = (0..nv).collect();
            seq.sort_by_key(|&v| (t.out_degree(v) as i64 - t.in_degree(v) as i64, v));
            VertexOrder::from_sequence(seq)?
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSpec {
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub strategies: Vec<OrderStrategy>,
    pub mode: ConstantsMode,
    pub seed: RngSeed,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_retries")]
    pub retries: usize,
    /// Practical-mode constant overrides.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

fn default_retries() -> usize {
    PackingOptions::default().retries
}

impl CampaignSpec {
    pub fn new(k: usize, n: usize, trials: usize, strategies: Vec<OrderStrategy>, seed: RngSeed) -> Self {
        Self {
            k,
            n,
            trials,
            strategies,
            mode: ConstantsMode::Practical,
            seed,
            threads: None,
            retries: default_retries(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::parameter("trials must be at least 1"));
        }
        if self.strategies.is_empty() {
            return Err(Error::parameter("at least one order strategy is required"));
        }
        if self.threads == Some(0) {
            return Err(Error::parameter("threads must be at least 1"));
        }
        if self.k < 2 || self.n == 0 {
            return Err(Error::parameter("need k >= 2 and n >= 1"));
        }
        if self.mode == ConstantsMode::Theoretical && !self.overrides.is_empty() {
            return Err(Error::parameter("overrides apply to practical constants only"));
        }
        Ok(())
    }

    pub fn constants(&self) -> Result<Constants> {
        match self.mode {
            ConstantsMode::Practical => practical_constants(self.k, self.n, &self.overrides),
            ConstantsMode::Theoretical => constants_for(self.mode, self.k, self.n),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyStats {
    pub runs: usize,
    pub successes: usize,
    /// Clique count per run; failed runs count as 0.
    pub clique_histogram: BTreeMap<usize, usize>,
    /// Failing stage name per failed run.
    pub stage_failures: BTreeMap<String, usize>,
    /// Pipeline attempts summed over runs.
    pub attempts: usize,
}

impl StrategyStats {
    fn record(&mut self, res: &PackingResult) {
        self.runs += 1;
        self.attempts += res.trace.len();
        *self.clique_histogram.entry(res.cliques.len()).or_default() += 1;
        match res.failure() {
            None => self.successes += 1,
            Some(f) => *self.stage_failures.entry(f.stage.clone()).or_default() += 1,
        }
    }

    fn merge(&mut self, other: &StrategyStats) {
        self.runs += other.runs;
        self.successes += other.successes;
        self.attempts += other.attempts;
        for (&c, &x) in &other.clique_histogram {
            *self.clique_histogram.entry(c).or_default() += x;
        }
        for (s, &x) in &other.stage_failures {
            *self.stage_failures.entry(s.clone()).or_default() += x;
        }
    }

    pub fn success_rate(&self) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.successes as f64 / self.runs as f64
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub mean_run_seconds: f64,
    pub max_run_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub spec: CampaignSpec,
    pub per_strategy: BTreeMap<OrderStrategy, StrategyStats>,
    /// Wall-clock numbers; not part of the reproducible output.
    #[serde(default)]
    pub timing: Timing,
}

impl CampaignReport {
    /// The report with timing cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> CampaignReport {
        CampaignReport {
            timing: Timing::default(),
            ..self.clone()
        }
    }
}

/// One (trial, strategy) run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub trial: usize,
    pub strategy: OrderStrategy,
    pub order: VertexOrder,
    pub result: PackingResult,
}

/// Tournament of trial `i`.
pub fn trial_tournament(spec: &CampaignSpec, trial: usize) -> Result<Tournament> {
    Tournament::sample_random(spec.n, spec.k, spec.seed.derive(trial as u64, 0))
}

fn run_one(
    spec: &CampaignSpec,
    constants: &Constants,
    t: &Tournament,
    trial: usize,
    strategy: OrderStrategy,
) -> Result<(RunRecord, f64)> {
    let start = Instant::now();
    let s = strategy.stream();
    let pi = strategy_order(t, strategy, spec.seed.derive(trial as u64, s))?;
    let opts = PackingOptions {
        retries: spec.retries,
        ..Default::default()
    };
    let result = find_clique_packing(t, &pi, constants, spec.seed.derive(trial as u64, 100 + s), opts)?;
    Ok((
        RunRecord {
            trial,
            strategy,
            order: pi,
            result,
        },
        start.elapsed().as_secs_f64(),
    ))
}

/// Runs every (trial, strategy) pair and returns the raw records in trial order.
pub fn run_campaign_records(spec: &CampaignSpec) -> Result<(Vec<RunRecord>, Timing)> {
    spec.validate()?;
    let constants = spec.constants()?;
    let mut strategies = spec.strategies.clone();
    strategies.sort();
    strategies.dedup();
    let start = Instant::now();
    let work = || -> Result<Vec<Vec<(RunRecord, f64)>>> {
        (0..spec.trials)
            .into_par_iter()
            .map(|i| {
                let t = trial_tournament(spec, i)?;
                strategies
                    .iter()
                    .map(|&s| run_one(spec, &constants, &t, i, s))
                    .collect()
            })
            .collect()
    };
    let runs = match spec.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Resource(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let mut records = Vec::new();
    let mut times = Vec::new();
    for (rec, secs) in runs.into_iter().flatten() {
        records.push(rec);
        times.push(secs);
    }
    let timing = Timing {
        total_seconds: start.elapsed().as_secs_f64(),
        mean_run_seconds: times.iter().sum::<f64>() / times.len().max(1) as f64,
        max_run_seconds: times.iter().copied().fold(0.0, f64::max),
    };
    Ok((records, timing))
}

pub fn run_campaign(spec: &CampaignSpec) -> Result<CampaignReport> {
    let (records, timing) = run_campaign_records(spec)?;
    Ok(aggregate(spec, &records, timing))
}

/// Order-independent aggregation of run records.
pub fn aggregate(spec: &CampaignSpec, records: &[RunRecord], timing: Timing) -> CampaignReport {
    let per_strategy = records
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<OrderStrategy, StrategyStats>, r| {
            acc.entry(r.strategy).or_default().record(&r.result);
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (s, st) in b {
                a.entry(s).or_default().merge(&st);
            }
            a
        });
    CampaignReport {
        spec: spec.clone(),
        per_strategy,
        timing,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::parameter(format!("unknown report format {s:?}"))),
        }
    }
}

pub const CSV_HEADER: &str = "strategy,outcome,cliques,runs";

/// JSON is the whole report. CSV has one row per (strategy, outcome,
/// clique count) with the number of runs; `outcome` is `success` or the
/// failing stage.
pub fn emit_report(report: &CampaignReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for (s, st) in &report.per_strategy {
                let failed: usize = st.stage_failures.values().sum();
                for (&c, &x) in &st.clique_histogram {
                    // failed runs all sit in the zero bucket
                    let ok = if c == 0 { x - failed } else { x };
                    if ok > 0 {
                        writeln!(out, "{},success,{c},{ok}", s.name()).unwrap();
                    }
                }
                for (stage, &x) in &st.stage_failures {
                    writeln!(out, "{},{stage},0,{x}", s.name()).unwrap();
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_parsing() {
        for s in OrderStrategy::ALL {
            assert_eq!(s.name().parse::<OrderStrategy>().unwrap(), s);
        }
        assert!("zigzag".parse::<OrderStrategy>().is_err());
    }

    #[test]
    fn degree_sorted_puts_sinks_first() {
        let t = Tournament::from_fn(vec![2, 2], |u, _| u == 0).unwrap();
        let pi = strategy_order(&t, OrderStrategy::DegreeSorted, RngSeed(0)).unwrap();
        assert_eq!(pi.sequence().last(), Some(&0));
    }

    #[test]
    fn zero_trials_rejected() {
        let spec = CampaignSpec::new(2, 10, 0, vec![OrderStrategy::Random], RngSeed(0));
        assert!(matches!(run_campaign(&spec), Err(Error::Parameter(_))));
        let spec = CampaignSpec::new(2, 10, 1, vec![], RngSeed(0));
        assert!(run_campaign(&spec).is_err());
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let mut spec = CampaignSpec::new(3, 40, 6, OrderStrategy::ALL.to_vec(), RngSeed(9));
        spec.threads = Some(1);
        let a = run_campaign(&spec).unwrap();
        spec.threads = Some(4);
        let b = run_campaign(&spec).unwrap();
        assert_eq!(a.per_strategy, b.per_strategy);
        for st in a.per_strategy.values() {
            assert_eq!(st.runs, 6);
            assert_eq!(st.clique_histogram.values().sum::<usize>(), 6);
        }
    }

    #[test]
    fn csv_and_json() {
        let spec = CampaignSpec::new(
            2,
            30,
            5,
            vec![OrderStrategy::Random, OrderStrategy::Identity],
            RngSeed(1),
        );
        let r = run_campaign(&spec).unwrap();
        let csv = emit_report(&r, ReportFormat::Csv).unwrap();
        let total: usize = csv
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
            .sum();
        assert_eq!(total, 10);
        let json = emit_report(&r, ReportFormat::Json).unwrap();
        let back: CampaignReport = serde_json::from_str(&json).unwrap();
        assert_eq!(emit_report(&back, ReportFormat::Json).unwrap(), json);

        let empty = CampaignReport {
            spec,
            per_strategy: BTreeMap::new(),
            timing: Timing::default(),
        };
        assert_eq!(
            emit_report(&empty, ReportFormat::Csv).unwrap(),
            format!("{CSV_HEADER}\n")
        );
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
