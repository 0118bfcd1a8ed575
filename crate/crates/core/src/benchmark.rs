//! Evaluation protocol: random baseline, improvement over random, validity
//! rates and median aggregation per problem size.
//!
//! Every instance gets a baseline of `2N` random valid colorings. A solver's
//! improvement on that instance is the baseline mean switch count minus the
//! solver's best switch count. Aggregates report medians across instances.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::seed;
use crate::solvers::{self, random_valid, SolverKind, SolverSpec};

/// Random valid samples per car in the baseline.
pub const BASELINE_SAMPLES_PER_CAR: usize = 2;

/// Label of the aggregate row holding the median of per-instance baseline means.
pub const RANDOM_MEAN: &str = "random-mean";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineEstimate {
    pub n_samples: usize,
    pub mean_switches: f64,
    pub best_switches: usize,
}

/// Mean and best switch count over `2N` random valid colorings.
pub fn estimate_baseline(instance: &ProblemInstance, seed: u64) -> BaselineEstimate {
    estimate_baseline_with(instance, BASELINE_SAMPLES_PER_CAR * instance.len(), seed)
}

pub fn estimate_baseline_with(
    instance: &ProblemInstance,
    n_samples: usize,
    seed: u64,
) -> BaselineEstimate {
    let n_samples = n_samples.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0usize;
    let mut best = usize::MAX;
    for _ in 0..n_samples {
        let f = random_valid(instance, &mut rng).switches();
        total += f;
        best = best.min(f);
    }
    BaselineEstimate {
        n_samples,
        mean_switches: total as f64 / n_samples as f64,
        best_switches: best,
    }
}

/// Which baseline statistic the improvement is measured against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BaselineMode {
    #[default]
    Mean,
    Best,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub master_seed: u64,
    pub baseline: BaselineMode,
    /// Overrides the `2N` baseline sample count.
    pub baseline_samples: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            master_seed: 0,
            baseline: BaselineMode::Mean,
            baseline_samples: None,
        }
    }
}

/// One (instance, solver) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub instance: String,
    pub n_cars: usize,
    pub solver: SolverKind,
    /// Post-repair best switch count; `None` when the run failed.
    pub best_switches: Option<usize>,
    /// Whether the solver found a valid coloring before repair.
    pub valid_raw: bool,
    pub repaired: bool,
    pub baseline_mean: f64,
    pub baseline_best: usize,
    /// `baseline - best_switches` under the suite's baseline mode.
    pub improvement: Option<f64>,
    pub wall_time_ms: f64,
    pub seed: u64,
    /// Set for solvers whose output depends on a wall-clock budget.
    pub timeout_bound: bool,
    pub error: Option<String>,
}

/// Solves every instance with every solver. Failures are kept in the
/// record's `error` field. Records come back ordered by instance, then by
/// solver list position, regardless of scheduling.
///
/// Seeds: instance `i` uses `derive_tagged(master, i, 0)` for its baseline
/// and `derive_tagged(master, i, 1 + kind)` for solver `kind`.
pub fn run_suite(
    instances: &[ProblemInstance],
    solvers: &[SolverSpec],
    options: &SuiteOptions,
) -> Result<Vec<BenchmarkRecord>> {
    if instances.is_empty() {
        return Err(Error::input("benchmark needs at least one instance"));
    }
    if solvers.is_empty() {
        return Err(Error::input("benchmark needs at least one solver"));
    }
    let master = options.master_seed;
    let baselines: Vec<BaselineEstimate> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let s = seed::derive_tagged(master, i as u64, 0);
            let n = options
                .baseline_samples
                .unwrap_or(BASELINE_SAMPLES_PER_CAR * inst.len());
            estimate_baseline_with(inst, n, s)
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..solvers.len()).map(move |j| (i, j)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(i, j)| {
            let inst = &instances[i];
            let spec = &solvers[j];
            let baseline = &baselines[i];
            let s = seed::derive_tagged(master, i as u64, 1 + spec.kind as u64);
            let reference = match options.baseline {
                BaselineMode::Mean => baseline.mean_switches,
                BaselineMode::Best => baseline.best_switches as f64,
            };
            let mut record = BenchmarkRecord {
                instance: inst.name().to_string(),
                n_cars: inst.len(),
                solver: spec.kind,
                best_switches: None,
                valid_raw: false,
                repaired: false,
                baseline_mean: baseline.mean_switches,
                baseline_best: baseline.best_switches,
                improvement: None,
                wall_time_ms: 0.0,
                seed: s,
                timeout_bound: spec.kind.timeout_bound(),
                error: None,
            };
            match spec.resolve(inst.len()).and_then(|solver| solvers::solve(inst, &solver, s)) {
                Ok(r) => {
                    record.best_switches = Some(r.switches);
                    record.valid_raw = r.valid_raw;
                    record.repaired = r.repaired;
                    record.improvement = Some(reference - r.switches as f64);
                    record.wall_time_ms = duration_ms(r.wall_time);
                }
                Err(e) => record.error = Some(e.to_string()),
            }
            record
        })
        .collect();
    Ok(records)
}

fn duration_ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Median with the even-count convention (mean of the two central values).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2.0
    } else {
        v[mid]
    })
}

/// One line of the results table: a solver at a problem size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub size: usize,
    pub solver: String,
    pub instances: usize,
    pub percent_valid: f64,
    pub median_switches: f64,
    pub median_improvement: f64,
    pub median_wall_time_ms: Option<f64>,
}

fn solver_rank(name: &str) -> (usize, &str) {
    let rank = if name == RANDOM_MEAN {
        0
    } else {
        name.parse::<SolverKind>()
            .map(|k| 1 + k as usize)
            .unwrap_or(usize::MAX)
    };
    (rank, name)
}

/// Groups successful records by (size, solver) and takes medians. A
/// `random-mean` row per size holds the median of the per-instance baseline
/// means. Rows are ordered by size, then solver; the result does not depend
/// on record order.
pub fn aggregate(records: &[BenchmarkRecord]) -> Result<Vec<AggregateRow>> {
    if records.is_empty() {
        return Err(Error::input("nothing to aggregate"));
    }
    let mut groups: BTreeMap<(usize, SolverKind), Vec<&BenchmarkRecord>> = BTreeMap::new();
    let mut baselines: BTreeMap<usize, BTreeMap<&str, f64>> = BTreeMap::new();
    for r in records {
        baselines
            .entry(r.n_cars)
            .or_default()
            .insert(&r.instance, r.baseline_mean);
        if r.error.is_none() {
            groups.entry((r.n_cars, r.solver)).or_default().push(r);
        }
    }

    let mut rows = Vec::new();
    for (&size, means) in &baselines {
        let values: Vec<f64> = means.values().copied().collect();
        rows.push(AggregateRow {
            size,
            solver: RANDOM_MEAN.to_string(),
            instances: values.len(),
            percent_valid: 100.0,
            median_switches: median(&values).expect("non-empty"),
            median_improvement: 0.0,
            median_wall_time_ms: None,
        });
    }
    for ((size, kind), group) in &groups {
        let switches: Vec<f64> = group
            .iter()
            .filter_map(|r| r.best_switches.map(|f| f as f64))
            .collect();
        let improvements: Vec<f64> = group.iter().filter_map(|r| r.improvement).collect();
        let times: Vec<f64> = group.iter().map(|r| r.wall_time_ms).collect();
        let valid = group.iter().filter(|r| r.valid_raw).count();
        rows.push(AggregateRow {
            size: *size,
            solver: kind.name().to_string(),
            instances: group.len(),
            percent_valid: 100.0 * valid as f64 / group.len() as f64,
            median_switches: median(&switches).expect("non-empty group"),
            median_improvement: median(&improvements).expect("non-empty group"),
            median_wall_time_ms: median(&times),
        });
    }
    rows.sort_by(|a, b| (a.size, solver_rank(&a.solver)).cmp(&(b.size, solver_rank(&b.solver))));
    Ok(rows)
}

/// Drops wall times so that reports are reproducible byte for byte.
pub fn strip_timing(rows: &[AggregateRow]) -> Vec<AggregateRow> {
    rows.iter()
        .cloned()
        .map(|mut r| {
            r.median_wall_time_ms = None;
            r
        })
        .collect()
}

/// CSV header of [`to_csv`].
pub const CSV_HEADER: &str =
    "size,solver,instances,percent_valid,median_switches,median_improvement,median_wall_time_ms";

pub fn to_csv(rows: &[AggregateRow]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record(CSV_HEADER.split(','))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_csv(text: &str) -> Result<Vec<AggregateRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse {
            path: "<csv>".into(),
            message: format!("unexpected header {:?}", header.join(",")),
        });
    }
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Improvement-over-random series per solver, for plotting against `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub x_label: String,
    pub y_label: String,
    /// Solver name -> `(N, median improvement)` points, `N` ascending.
    pub series: BTreeMap<String, Vec<(usize, f64)>>,
}

pub fn plot_data(rows: &[AggregateRow]) -> PlotData {
    let mut series: BTreeMap<String, Vec<(usize, f64)>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.solver != RANDOM_MEAN) {
        series
            .entry(row.solver.clone())
            .or_default()
            .push((row.size, row.median_improvement));
    }
    for points in series.values_mut() {
        points.sort_by_key(|p| p.0);
    }
    PlotData {
        x_label: "cars".into(),
        y_label: "improvement over random configurations".into(),
        series,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    /// The rows as JSON.
    Json,
    PlotData,
}

pub fn render_report(rows: &[AggregateRow], format: ReportFormat) -> Result<String> {
    Ok(match format {
        ReportFormat::Csv => to_csv(rows)?,
        ReportFormat::Json => serde_json::to_string_pretty(rows)? + "\n",
        ReportFormat::PlotData => serde_json::to_string_pretty(&plot_data(rows))? + "\n",
    })
}

pub fn emit_report(rows: &[AggregateRow], format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::input("no rows to report"));
    }
    fs::write(path, render_report(rows, format)?)?;
    Ok(())
}

/// Fixed-width table for terminals.
pub fn format_table(rows: &[AggregateRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6}  {:<12} {:>5} {:>8} {:>10} {:>12} {:>10}",
        "N", "solver", "inst", "%valid", "med f(w)", "med improv", "med ms"
    );
    for r in rows {
        let time = r
            .median_wall_time_ms
            .map(|t| format!("{t:.1}"))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:>6}  {:<12} {:>5} {:>7.1}% {:>10} {:>12.3} {:>10}",
            r.size, r.solver, r.instances, r.percent_valid, r.median_switches, r.median_improvement, time
        );
    }
    out
}
