//! The `mcps` command line: `gen`, `partition`, `encode`, `solve`, `bench`.
//!
//! Exit codes: 0 success, 1 internal or I/O error, 2 input or parse error,
//! 3 capacity error (instance too large for the exact oracle).

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::benchmark::{self, BaselineMode, ReportFormat, SuiteOptions};
use crate::error::{Error, Result};
use crate::generate::{self, QuotaPolicy};
use crate::ising::{self, PenaltyWeight};
use crate::model::ProblemInstance;
use crate::seed;
use crate::solvers::{self, SaOverrides, Solver, SolverKind, SolverSpec, TabuOverrides};

/// Seed used when neither a flag nor a config file sets one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "mcps", version, about = "Multi-car paint shop optimization")]
pub struct Cli {
    /// Master random seed (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads; defaults to all cores. Output does not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Optional TOML config; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic instance files.
    Gen(GenArgs),
    /// Cut a long stream instance into equal chunks.
    Partition(PartitionArgs),
    /// Write the Ising model of an instance.
    Encode(EncodeArgs),
    /// Solve one instance and print the result.
    Solve(SolveArgs),
    /// Run a benchmark suite and write the report.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum QuotaArg {
    Uniform,
    Balanced,
}

impl From<QuotaArg> for QuotaPolicy {
    fn from(q: QuotaArg) -> Self {
        match q {
            QuotaArg::Uniform => QuotaPolicy::UniformRandom,
            QuotaArg::Balanced => QuotaPolicy::Balanced,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Cars per instance.
    #[arg(long)]
    pub cars: usize,
    /// Ensembles per instance (default: one per three cars, at least two).
    #[arg(long)]
    pub ensembles: Option<usize>,
    /// Number of instance files.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, value_enum, default_value = "uniform")]
    pub quota: QuotaArg,
    /// Only keep instances with at least 70% free cars.
    #[arg(long)]
    pub filter: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Stream instance file.
    #[arg(long)]
    pub input: PathBuf,
    /// Cars per chunk.
    #[arg(long)]
    pub chunk: usize,
    /// Write only chunks that pass the 70% free-car filter.
    #[arg(long)]
    pub accepted_only: bool,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Penalty weight (default: number of cars).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Eliminate cars whose color is forced by their quota.
    #[arg(long)]
    pub condition: bool,
    /// Output model file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct SolverFlags {
    /// Annealing sweeps (default 10 N).
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Annealing samples (default 20 N).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    /// Tabu timeout in seconds (default floor(N/3)).
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long)]
    pub tenure: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// random, greedy, sa, tabu or exact.
    #[arg(long)]
    pub solver: String,
    #[command(flatten)]
    pub params: SolverFlags,
    /// Also write the result to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaselineArg {
    Mean,
    Best,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Glob pattern of instance files.
    #[arg(long)]
    pub instances: String,
    /// Comma separated solver list (default: random,greedy,sa).
    #[arg(long)]
    pub solvers: Option<String>,
    #[command(flatten)]
    pub params: SolverFlags,
    /// Baseline statistic for the improvement column.
    #[arg(long, value_enum, default_value = "mean")]
    pub baseline: BaselineArg,
    /// Include median wall times in the CSV (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
    /// Output directory for summary.csv and plot.json.
    #[arg(long)]
    pub out: PathBuf,
}

/// Contents of the optional `--config` file.
#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub solvers: Option<String>,
    #[serde(default)]
    pub sa: SaOverrides,
    #[serde(default)]
    pub tabu: TabuOverrides,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

impl SolverFlags {
    fn overrides(&self, config: &Config) -> (SaOverrides, TabuOverrides) {
        let sa = SaOverrides {
            sweeps: self.sweeps.or(config.sa.sweeps),
            samples: self.samples.or(config.sa.samples),
            beta_min: self.beta_min.or(config.sa.beta_min),
            beta_max: self.beta_max.or(config.sa.beta_max),
        };
        let tabu = TabuOverrides {
            timeout_s: self.timeout.or(config.tabu.timeout_s),
            tenure: self.tenure.or(config.tabu.tenure),
        };
        (sa, tabu)
    }
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::input("--jobs must be at least 1"));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Io(io::Error::other(e.to_string())))?;
    // commands write into a buffer so the pool closure stays `Send`
    let mut buf = Vec::new();
    let result = pool.install(|| {
        let sink: &mut dyn Write = &mut buf;
        match &cli.command {
            Command::Gen(args) => cmd_gen(args, seed, sink),
            Command::Partition(args) => cmd_partition(args, seed, sink),
            Command::Encode(args) => cmd_encode(args, sink),
            Command::Solve(args) => cmd_solve(args, &config, seed, sink),
            Command::Bench(args) => cmd_bench(args, &config, seed, sink),
        }
    });
    out.write_all(&buf)?;
    result
}

/// Parses `args` (including the program name) and runs them.
pub fn run_args<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::input(e.to_string()))?;
    run(cli, out)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn cmd_gen(args: &GenArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let n = args.cars;
    let m = args.ensembles.unwrap_or_else(|| generate::reference_ensembles(n));
    let policy = QuotaPolicy::from(args.quota);
    let instances = if args.filter {
        generate::filtered_suite(n, m, policy, args.count, seed)?
    } else {
        (0..args.count)
            .map(|i| generate::generate_synthetic(n, m, policy, seed::derive(seed, i as u64)))
            .collect::<Result<Vec<_>>>()?
    };
    create_dir(&args.out)?;
    for (i, inst) in instances.into_iter().enumerate() {
        let name = format!("mcps_N{n}_i{i:03}");
        let path = args.out.join(format!("{name}.json"));
        inst.renamed(name).save(&path)?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

pub fn cmd_partition(args: &PartitionArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let stream = ProblemInstance::load(&args.input)?;
    // the stream's recorded coloring: a random valid production assignment
    let production = solvers::random_valid(&stream, &mut ChaCha8Rng::seed_from_u64(seed));
    let parts = generate::partition_stream(&stream, &production, args.chunk)?;
    create_dir(&args.out)?;
    let accepted = parts.iter().filter(|p| p.stats.accepted).count();
    for (i, part) in parts.iter().enumerate() {
        let s = part.stats;
        writeln!(
            out,
            "partition {i}: {} cars, {} free, {}",
            s.total_cars,
            s.non_fixed_cars,
            if s.accepted { "accepted" } else { "rejected" }
        )?;
        if s.accepted || !args.accepted_only {
            part.instance.save(args.out.join(format!("{}.json", part.instance.name())))?;
        }
    }
    writeln!(out, "{} partitions, {accepted} accepted", parts.len())?;
    Ok(())
}

pub fn cmd_encode(args: &EncodeArgs, out: &mut dyn Write) -> Result<()> {
    let inst = ProblemInstance::load(&args.input)?;
    let lambda = match args.lambda {
        Some(l) => PenaltyWeight::new(l)?,
        None => PenaltyWeight::for_instance(&inst),
    };
    let mut model = ising::encode(&inst, lambda);
    if args.condition {
        model = model.condition(&ising::forced_spins(&inst))?;
    }
    match &args.out {
        Some(path) => {
            model.save(path)?;
            let precision = model
                .precision_ratio()
                .map(|p| p.to_string())
                .unwrap_or_else(|_| "undefined".into());
            writeln!(
                out,
                "{}: {} variables, {} linear, {} quadratic, lambda {}, precision ratio {precision}",
                path.display(),
                model.n_vars(),
                model.linear_terms().count(),
                model.quadratic_terms().count(),
                lambda.value()
            )?;
        }
        None => out.write_all(model.to_json().as_bytes())?,
    }
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs, config: &Config, seed: u64, out: &mut dyn Write) -> Result<()> {
    let inst = ProblemInstance::load(&args.input)?;
    let kind: SolverKind = args.solver.parse()?;
    let (sa, tabu) = args.params.overrides(config);
    let spec = SolverSpec { kind, sa, tabu };
    let solver = spec.resolve(inst.len())?;
    let result = solvers::solve(&inst, &solver, seed)?;

    let params = match &solver {
        Solver::Sa(p) => json!({
            "sweeps": p.n_sweeps,
            "samples": p.n_samples,
            "beta_min": p.beta_min,
            "beta_max": p.beta_max,
        }),
        Solver::Tabu(p) => json!({
            "timeout_s": p.timeout.as_secs_f64(),
            "tenure": p.tenure,
        }),
        _ => json!({}),
    };
    let report = json!({
        "instance": inst.name(),
        "cars": inst.len(),
        "solver": kind.name(),
        "switches": result.switches,
        "valid": result.valid,
        "valid_raw": result.valid_raw,
        "repaired": result.repaired,
        "sample_valid_fraction": result.sample_valid_fraction,
        "energy": result.energy,
        "wall_time_ms": result.wall_time.as_secs_f64() * 1e3,
        "seed": result.seed,
        "params": params,
        "coloring": result.coloring.to_string(),
    });
    let text = serde_json::to_string_pretty(&report)? + "\n";
    out.write_all(text.as_bytes())?;
    if let Some(path) = &args.out {
        fs::write(path, &text)?;
    }
    Ok(())
}

/// Loads every file matching `pattern`, sorted by path.
pub fn load_glob(pattern: &str) -> Result<Vec<ProblemInstance>> {
    let paths = glob::glob(pattern).map_err(|e| Error::input(format!("bad glob {pattern:?}: {e}")))?;
    let mut files: Vec<PathBuf> = paths.filter_map(|p| p.ok()).filter(|p| p.is_file()).collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::input(format!("no instance files match {pattern:?}")));
    }
    files.iter().map(ProblemInstance::load).collect()
}

pub fn cmd_bench(args: &BenchArgs, config: &Config, seed: u64, out: &mut dyn Write) -> Result<()> {
    let instances = load_glob(&args.instances)?;
    let list = args
        .solvers
        .clone()
        .or_else(|| config.solvers.clone())
        .unwrap_or_else(|| "random,greedy,sa".into());
    let (sa, tabu) = args.params.overrides(config);
    let specs: Vec<SolverSpec> = SolverSpec::parse_list(&list)?
        .into_iter()
        .map(|s| SolverSpec { sa, tabu, ..s })
        .collect();
    let options = SuiteOptions {
        master_seed: seed,
        baseline: match args.baseline {
            BaselineArg::Mean => BaselineMode::Mean,
            BaselineArg::Best => BaselineMode::Best,
        },
        baseline_samples: None,
    };
    let records = benchmark::run_suite(&instances, &specs, &options)?;
    let mut rows = benchmark::aggregate(&records)?;
    if !args.timing {
        rows = benchmark::strip_timing(&rows);
    }

    create_dir(&args.out)?;
    benchmark::emit_report(&rows, ReportFormat::Csv, args.out.join("summary.csv"))?;
    benchmark::emit_report(&rows, ReportFormat::PlotData, args.out.join("plot.json"))?;

    out.write_all(benchmark::format_table(&rows).as_bytes())?;
    let failures: BTreeMap<&str, usize> =
        records
            .iter()
            .filter(|r| r.error.is_some())
            .fold(BTreeMap::new(), |mut acc, r| {
                *acc.entry(r.solver.name()).or_default() += 1;
                acc
            });
    for (solver, n) in failures {
        writeln!(out, "note: {solver} failed on {n} instance(s)")?;
    }
    if specs.iter().any(|s| s.kind.timeout_bound()) {
        writeln!(out, "note: tabu results depend on wall-clock time and are not reproducible")?;
    }
    Ok(())
}
