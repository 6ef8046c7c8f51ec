use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moments_core::{merge_many, KernelRegistry, MomentAccumulator, OpCounter, UpdateKernel};
use moments_oracles::CentralSums;
use rayon::prelude::*;
use serde::Serialize;

use crate::estimator::EstimatorRegistry;
use crate::report::{render_rows, sig6, OutputReport};
use crate::rng::{DataGenerator, DEFAULT_SEED};
use crate::stream_io::{chunk, for_each_value, open_input, parse_stream, ChunkPlan, ParseConfig};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "moments",
    version,
    about = "Streaming central-moment statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summary statistics of a stream in one pass.
    Stats(StatsArgs),
    /// Chunked parallel accumulation, merged in chunk order.
    Parallel(ParallelArgs),
    /// Stable vs naive one-pass moments on synthetic large-mean data.
    Compare(CompareArgs),
    /// Update throughput and per-update floating-point operation counts.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input file, or `-` for standard input.
    #[arg(default_value = "-")]
    pub input: PathBuf,
    /// Read CSV instead of whitespace-separated numbers.
    #[arg(long)]
    pub csv: bool,
    /// 0-based CSV column to read.
    #[arg(long, requires = "csv")]
    pub column: Option<usize>,
    #[arg(long, default_value_t = ',', requires = "csv")]
    pub delimiter: char,
    /// Skip and count unparseable tokens instead of failing.
    #[arg(long)]
    pub skip_bad: bool,
}

impl InputArgs {
    pub fn parse_config(&self) -> Result<ParseConfig, CliError> {
        let cfg = if self.csv {
            ParseConfig::csv(self.column.unwrap_or(0), self.delimiter)?
        } else {
            ParseConfig::plain()
        };
        Ok(cfg.skip_bad_tokens(self.skip_bad))
    }

    fn name(&self) -> String {
        self.input.display().to_string()
    }

    fn open(&self) -> Result<Box<dyn std::io::Read>, CliError> {
        open_input(&self.input).map_err(|source| CliError::Open {
            path: self.name(),
            source,
        })
    }
}

fn order_arg() -> clap::builder::RangedU64ValueParser<usize> {
    clap::builder::RangedU64ValueParser::new().range(2..=moments_core::MAX_ORDER as u64)
}

fn positive_arg() -> clap::builder::RangedU64ValueParser<usize> {
    clap::builder::RangedU64ValueParser::new().range(1..)
}

fn finite_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a finite number")),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match finite_f64(s)? {
        v if v > 0.0 => Ok(v),
        _ => Err(format!("`{s}` must be positive")),
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Highest central moment to track.
    #[arg(long, default_value_t = 4, value_parser = order_arg())]
    pub order: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
    /// Update kernel by name, or `auto` for the fastest one supporting the order.
    #[arg(long, default_value = "auto")]
    pub kernel: String,
}

#[derive(Debug, Args)]
pub struct ParallelArgs {
    #[command(flatten)]
    pub stats: StatsArgs,
    /// Number of chunks (default: available parallelism).
    #[arg(long, value_parser = positive_arg(), conflicts_with = "chunk_size")]
    pub chunks: Option<usize>,
    /// Values per chunk.
    #[arg(long, value_parser = positive_arg())]
    pub chunk_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = positive_arg())]
    pub n: usize,
    #[arg(long, default_value_t = 1e9, value_parser = finite_f64, allow_negative_numbers = true)]
    pub mean_offset: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    pub stddev: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 4, value_parser = order_arg())]
    pub order: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1_000_000, value_parser = positive_arg())]
    pub n: usize,
    #[arg(long, default_value_t = 4, value_parser = order_arg())]
    pub order: usize,
    /// Count floating-point operations per update.
    #[arg(long)]
    pub instrument: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Stats(args) => {
            let report = stats(&args)?;
            write_report(out, &report, args.format)
        }
        Command::Parallel(args) => {
            let report = parallel(&args)?;
            write_report(out, &report, args.stats.format)
        }
        Command::Compare(args) => {
            let cmp = compare(&args)?;
            match args.format {
                OutputFormat::Table => out.write_all(cmp.to_table().as_bytes())?,
                OutputFormat::Json => writeln!(out, "{}", cmp.to_json())?,
            }
            Ok(())
        }
        Command::Bench(args) => {
            let result = bench(&args)?;
            match args.format {
                OutputFormat::Table => out.write_all(result.to_table().as_bytes())?,
                OutputFormat::Json => writeln!(out, "{}", result.to_json())?,
            }
            Ok(())
        }
    }
}

fn write_report(
    out: &mut dyn Write,
    report: &OutputReport,
    format: OutputFormat,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Table => out.write_all(report.to_table().as_bytes())?,
        OutputFormat::Json => writeln!(out, "{}", report.to_json())?,
    }
    Ok(())
}

fn select_kernel<'r>(
    registry: &'r KernelRegistry,
    name: &str,
    order: usize,
) -> Result<&'r dyn UpdateKernel, CliError> {
    let kernel = if name == "auto" {
        registry.best_for(order)?
    } else {
        registry
            .get(name)
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    if !kernel.supports(order) {
        return Err(CliError::Usage(format!(
            "kernel `{}` does not support order {order}",
            kernel.name()
        )));
    }
    Ok(kernel)
}

fn accumulate(order: usize, kernel: &dyn UpdateKernel, values: &[f64]) -> MomentAccumulator {
    let mut acc = MomentAccumulator::new(order).expect("order validated by argument parser");
    for &x in values {
        acc.update_with(kernel, x)
            .expect("parsed values are finite");
    }
    acc
}

fn finish(
    input: String,
    acc: &MomentAccumulator,
    bad_tokens: u64,
    start: Instant,
) -> Result<OutputReport, CliError> {
    if acc.is_empty() {
        return Err(CliError::NoData);
    }
    Ok(OutputReport {
        input,
        summary: acc.summarize()?,
        bad_tokens,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn stats(args: &StatsArgs) -> Result<OutputReport, CliError> {
    let start = Instant::now();
    let registry = KernelRegistry::default();
    let kernel = select_kernel(&registry, &args.kernel, args.order)?;
    let config = args.input.parse_config()?;

    let mut acc = MomentAccumulator::new(args.order)?;
    let bad = for_each_value(args.input.open()?, &config, |x| {
        acc.update_with(kernel, x)
            .expect("parsed values are finite");
    })?;
    finish(args.input.name(), &acc, bad, start)
}

pub fn parallel(args: &ParallelArgs) -> Result<OutputReport, CliError> {
    let start = Instant::now();
    let stats = &args.stats;
    let registry = KernelRegistry::default();
    let kernel = select_kernel(&registry, &stats.kernel, stats.order)?;
    let config = stats.input.parse_config()?;
    let parsed = parse_stream(stats.input.open()?, &config)?;
    if parsed.values.is_empty() {
        return Err(CliError::NoData);
    }

    let plan = match (args.chunk_size, args.chunks) {
        (Some(size), _) => ChunkPlan::new(size)?,
        (None, Some(n)) => ChunkPlan::for_chunk_count(parsed.values.len(), n)?,
        (None, None) => {
            let n = std::thread::available_parallelism().map_or(1, |n| n.get());
            ChunkPlan::for_chunk_count(parsed.values.len(), n)?
        }
    };
    let parts: Vec<MomentAccumulator> = chunk(&parsed.values, &plan)
        .into_par_iter()
        .map(|c| accumulate(stats.order, kernel, c))
        .collect();
    let merged = merge_many(&parts)?;
    finish(stats.input.name(), &merged, parsed.bad_tokens, start)
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodError {
    pub value: f64,
    pub abs_error: f64,
    pub rel_error: f64,
}

impl MethodError {
    fn new(value: f64, truth: f64) -> Self {
        let abs_error = (value - truth).abs();
        let rel_error = if abs_error == 0.0 {
            0.0
        } else {
            abs_error / truth.abs()
        };
        Self {
            value,
            abs_error,
            rel_error,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StatisticComparison {
    pub statistic: String,
    pub oracle: f64,
    pub stable: MethodError,
    pub naive: MethodError,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub n: usize,
    pub mean_offset: f64,
    pub stddev: f64,
    pub seed: u64,
    pub order: usize,
    pub statistics: Vec<StatisticComparison>,
}

impl Comparison {
    pub fn get(&self, statistic: &str) -> Option<&StatisticComparison> {
        self.statistics.iter().find(|s| s.statistic == statistic)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("comparison is always serializable")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "n={} mean_offset={} stddev={} seed={} order={}\n",
            self.n,
            sig6(self.mean_offset),
            sig6(self.stddev),
            self.seed,
            self.order
        );
        let header = [
            "statistic",
            "oracle",
            "stable",
            "stable abs err",
            "stable rel err",
            "naive",
            "naive abs err",
            "naive rel err",
        ];
        let mut rows: Vec<[String; 8]> = vec![header.map(str::to_owned)];
        for s in &self.statistics {
            rows.push([
                s.statistic.clone(),
                sig6(s.oracle),
                sig6(s.stable.value),
                format!("{:.3e}", s.stable.abs_error),
                format!("{:.3e}", s.stable.rel_error),
                sig6(s.naive.value),
                format!("{:.3e}", s.naive.abs_error),
                format!("{:.3e}", s.naive.rel_error),
            ]);
        }
        let widths: Vec<usize> = (0..8)
            .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
            .collect();
        for row in &rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Per-statistic values derived from central sums: mean, variance, then `M_q / n` for `q ≥ 3`.
fn derived(e: &CentralSums) -> Vec<(String, f64)> {
    let n = e.count as f64;
    let mut v = vec![
        ("mean".to_owned(), e.mean),
        ("variance".to_owned(), e.sums[0] / n),
    ];
    for (q, m) in (3..).zip(&e.sums[1..]) {
        v.push((format!("m{q}"), m / n));
    }
    v
}

pub fn compare(args: &CompareArgs) -> Result<Comparison, CliError> {
    let data = DataGenerator::new(args.seed).normal_vec(args.n, args.mean_offset, args.stddev);
    let registry = EstimatorRegistry::default();
    let oracle = registry.get("twopass")?.estimate(&data, args.order)?;
    let stable = registry.get("stable")?.estimate(&data, args.order)?;
    let naive = registry.get("naive")?.estimate(&data, args.order)?;

    let statistics = derived(&oracle)
        .into_iter()
        .zip(derived(&stable))
        .zip(derived(&naive))
        .map(|(((name, truth), (_, s)), (_, nv))| StatisticComparison {
            statistic: name,
            oracle: truth,
            stable: MethodError::new(s, truth),
            naive: MethodError::new(nv, truth),
        })
        .collect();

    Ok(Comparison {
        n: args.n,
        mean_offset: args.mean_offset,
        stddev: args.stddev,
        seed: args.seed,
        order: args.order,
        statistics,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FlopStats {
    pub updates: u64,
    pub max_flops: u64,
    pub mean_flops: f64,
    pub max_divisions: u64,
    pub min_divisions: u64,
    /// Operation breakdown of the last instrumented update.
    pub last: OpCounter,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub kernel: String,
    pub order: usize,
    pub n: usize,
    pub values_per_sec: f64,
    pub flops: Option<FlopStats>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
}

impl BenchResult {
    pub fn row(&self, kernel: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.kernel == kernel)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bench result is always serializable")
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let mut rows = vec![
                ("kernel".to_owned(), r.kernel.clone()),
                ("order".to_owned(), r.order.to_string()),
                ("values".to_owned(), r.n.to_string()),
                ("values/sec".to_owned(), sig6(r.values_per_sec)),
            ];
            if let Some(f) = &r.flops {
                rows.push(("instrumented updates".into(), f.updates.to_string()));
                rows.push(("flops/update (max)".into(), f.max_flops.to_string()));
                rows.push(("flops/update (mean)".into(), sig6(f.mean_flops)));
                rows.push(("divisions/update".into(), division_range(f)));
                rows.push(("breakdown".into(), f.last.to_string()));
            }
            out.push_str(&render_rows(&rows));
            out.push('\n');
        }
        out
    }
}

fn division_range(f: &FlopStats) -> String {
    if f.min_divisions == f.max_divisions {
        f.max_divisions.to_string()
    } else {
        format!("{}..{}", f.min_divisions, f.max_divisions)
    }
}

const INSTRUMENTED_UPDATES: usize = 10_000;

pub fn bench(args: &BenchArgs) -> Result<BenchResult, CliError> {
    let data = DataGenerator::new(args.seed).uniform_vec(args.n);
    let registry = KernelRegistry::default();
    let mut rows = Vec::new();
    for name in registry.names() {
        let kernel = registry.get(name)?;
        if !kernel.supports(args.order) {
            continue;
        }
        let start = Instant::now();
        let acc = accumulate(args.order, kernel, &data);
        let secs = start.elapsed().as_secs_f64();
        std::hint::black_box(&acc);

        let flops = args
            .instrument
            .then(|| instrument(kernel, args.order, &data))
            .transpose()?;
        rows.push(BenchRow {
            kernel: name.to_owned(),
            order: args.order,
            n: args.n,
            values_per_sec: args.n as f64 / secs.max(f64::MIN_POSITIVE),
            flops,
        });
    }
    Ok(BenchResult { rows })
}

fn instrument(
    kernel: &dyn UpdateKernel,
    order: usize,
    data: &[f64],
) -> Result<FlopStats, CliError> {
    let mut acc = MomentAccumulator::new(order)?;
    let mut stats = FlopStats {
        updates: 0,
        max_flops: 0,
        mean_flops: 0.0,
        max_divisions: 0,
        min_divisions: u64::MAX,
        last: OpCounter::default(),
    };
    let mut total = 0u64;
    for &x in data.iter().take(INSTRUMENTED_UPDATES) {
        let ops = acc.update_instrumented(kernel, x)?;
        stats.updates += 1;
        total += ops.total();
        stats.max_flops = stats.max_flops.max(ops.total());
        stats.max_divisions = stats.max_divisions.max(ops.divs);
        stats.min_divisions = stats.min_divisions.min(ops.divs);
        stats.last = ops;
    }
    stats.mean_flops = total as f64 / stats.updates as f64;
    Ok(stats)
}
