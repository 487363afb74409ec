//! `tracemine` command line: generate benchmark corpora, convert trace formats,
//! run miners, and score them against ground truth.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 some miner stopped
//! early on its time or result budget.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use tracemine::eval::{self, BenchOptions, MinerSpec, RunStatus};
use tracemine::generator::{self, GenConfig, Mode};
use tracemine::io::{self, ExportFormat, FieldMap, FlattenPolicy};
use tracemine::mining::MineError;
use tracemine::{Budget, Corpus, PatternPool};

const TIMEOUT_ENV: &str = "TRACEMINE_TIMEOUT_SECS";

/// Miners listed in the benchmark summary; `seqpat` is selected by name only.
const BENCH_ALL: [&str; 4] = ["flow", "alternating", "ltl", "episode"];

#[derive(Parser)]
#[command(name = "tracemine", version, about = "SoC trace benchmarks and specification miners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus from a ground-truth pattern pool.
    Generate(GenerateArgs),
    /// Convert a canonical corpus or a bus-monitor log into another format.
    Convert(ConvertArgs),
    /// Run one miner (or all of them) over a corpus.
    Mine(MineArgs),
    /// Score a mined-output file against a pattern pool.
    Eval(EvalArgs),
    /// Run several miners with timing and scoring, and write a report.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    pool: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// key=value generator settings; flags below override them.
    #[arg(long)]
    config: Option<PathBuf>,
    /// SNI, SI or MI.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    traces: Option<usize>,
    #[arg(long)]
    reps_min: Option<usize>,
    #[arg(long)]
    reps_max: Option<usize>,
    #[arg(long)]
    max_active: Option<usize>,
    #[arg(long)]
    max_step_width: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Canonical corpus whose event declarations name the ids.
    #[arg(long)]
    vocab: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// canonical or monitor.
    #[arg(long, default_value = "canonical")]
    from: String,
    /// Column mapping (key=value) for monitor logs.
    #[arg(long)]
    field_map: Option<PathBuf>,
    /// canonical, itemset_dash, space_separated, line_per_event:<sep>, or a
    /// tool alias (spmf, perracotta, texada, trace2model, ...).
    #[arg(long, default_value = "canonical")]
    to: String,
    /// ascending, capture or random:<seed>. Non-canonical targets default to ascending.
    #[arg(long)]
    flatten: Option<FlattenPolicy>,
}

#[derive(Args)]
struct MinerArgs {
    /// Miner parameter as key=value, or miner.key=value to target one miner.
    #[arg(long = "miner-arg", value_name = "KEY=VALUE")]
    miner_args: Vec<String>,
    /// ascending, capture or random:<seed>.
    #[arg(long, default_value = "ascending")]
    flatten: FlattenPolicy,
    /// Per-miner time limit in seconds (default 7200, or $TRACEMINE_TIMEOUT_SECS).
    #[arg(long)]
    timeout: Option<f64>,
    /// Result-count guard per miner.
    #[arg(long, default_value_t = eval::DEFAULT_MAX_RESULTS)]
    max_results: usize,
}

#[derive(Args)]
struct MineArgs {
    /// seqpat, alternating, episode, ltl, flow, or all.
    #[arg(long)]
    miner: String,
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; with `--miner all`, each miner writes <stem>.<miner>.<ext>.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    common: MinerArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    miner: String,
    #[arg(long)]
    mined: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    /// Corpus the output was mined from; needed to resolve ltl message names.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    gt: PathBuf,
    /// Comma-separated miner names, or all (flow, alternating, ltl, episode).
    #[arg(long, default_value = "all")]
    miners: String,
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    common: MinerArgs,
}

enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
}

type CliResult<T> = Result<T, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn data(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(usage)
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display())).map_err(data)
}

fn read_corpus(path: &Path) -> CliResult<Corpus> {
    io::parse_canonical(&read(path)?).with_context(|| format!("{}", path.display())).map_err(data)
}

fn read_pool(path: &Path) -> CliResult<PatternPool> {
    generator::parse_pool(&read(path)?).with_context(|| format!("{}", path.display())).map_err(data)
}

fn generate(args: GenerateArgs) -> CliResult<bool> {
    let pool = read_pool(&args.pool)?;
    let mut cfg = match &args.config {
        Some(p) => GenConfig::from_kv_text(&read(p)?).with_context(|| format!("{}", p.display())).map_err(usage)?,
        None => GenConfig::default(),
    };
    cfg.mode = args.mode.unwrap_or(cfg.mode);
    cfg.n_traces = args.traces.unwrap_or(cfg.n_traces);
    cfg.reps_min = args.reps_min.unwrap_or(cfg.reps_min);
    cfg.reps_max = args.reps_max.unwrap_or(cfg.reps_max);
    cfg.max_active = args.max_active.unwrap_or(cfg.max_active);
    cfg.max_step_width = args.max_step_width.unwrap_or(cfg.max_step_width);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.validate().map_err(usage)?;

    let vocab = match &args.vocab {
        Some(p) => Some(read_corpus(p)?.vocabulary),
        None => None,
    };
    let generated = generator::generate_detailed(&pool, &cfg, vocab).map_err(data)?;
    let text = io::emit(&generated.corpus, &ExportFormat::Canonical).map_err(data)?;
    write(&args.out, &text)?;
    Ok(true)
}

fn convert(args: ConvertArgs) -> CliResult<bool> {
    let format: ExportFormat = args.to.parse().map_err(usage)?;
    let text = read(&args.input)?;
    let corpus = match args.from.as_str() {
        "canonical" => io::parse_canonical(&text).map_err(data)?,
        "monitor" => {
            let map = match &args.field_map {
                Some(p) => FieldMap::from_kv_text(&read(p)?, text.lines().find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#')))
                    .map_err(usage)?,
                None => FieldMap::default(),
            };
            io::ingest_monitor_log(&text, &map).map_err(data)?
        }
        other => return Err(usage(anyhow!("unknown input format {other:?} (expected canonical or monitor)"))),
    };
    let policy = match (args.flatten, &format) {
        (Some(p), _) => Some(p),
        (None, ExportFormat::Canonical) => None,
        (None, _) => Some(FlattenPolicy::AscendingId),
    };
    let corpus = match policy {
        Some(p) => io::flatten_corpus(&corpus, p),
        None => corpus,
    };
    write(&args.out, &io::emit(&corpus, &format).map_err(data)?)?;
    Ok(true)
}

fn timeout(flag: Option<f64>) -> CliResult<Duration> {
    let secs = match flag {
        Some(s) => Some(s),
        None => match std::env::var(TIMEOUT_ENV) {
            Ok(v) => Some(v.trim().parse::<f64>().map_err(|_| usage(anyhow!("{TIMEOUT_ENV}={v:?} is not a number")))?),
            Err(_) => None,
        },
    };
    match secs {
        None => Ok(eval::DEFAULT_TIMEOUT),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Duration::from_secs_f64(s)),
        Some(s) => Err(usage(anyhow!("timeout {s} is not a non-negative number of seconds"))),
    }
}

/// Splits `--miner-arg` values per selected miner. Unprefixed keys go to every
/// selected miner that accepts them and must be accepted by at least one.
fn miner_specs(names: &[&str], raw: &[String]) -> CliResult<Vec<MinerSpec>> {
    let mut per: BTreeMap<&str, BTreeMap<String, String>> = names.iter().map(|n| (*n, BTreeMap::new())).collect();
    for item in raw {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| usage(anyhow!("--miner-arg {item:?} is not key=value")))?;
        let (target, key) = match key.split_once('.') {
            Some((m, k)) => (Some(m), k),
            None => (None, key),
        };
        let mut used = false;
        for name in names {
            let accepts = MinerSpec::parameter_names(name).is_some_and(|ks| ks.contains(&key));
            if target.map_or(accepts, |t| t == *name) {
                per.get_mut(name).unwrap().insert(key.to_string(), value.to_string());
                used = true;
            }
        }
        if !used {
            return Err(usage(anyhow!("--miner-arg {item:?} matches no selected miner")));
        }
    }
    names
        .iter()
        .map(|n| MinerSpec::with_args(n, &per[n]).map_err(usage))
        .collect()
}

fn suffixed(out: &Path, miner: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match out.extension() {
        Some(ext) => format!("{stem}.{miner}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{miner}"),
    };
    out.with_file_name(name)
}

fn mine(args: MineArgs) -> CliResult<bool> {
    let names: Vec<&str> = if args.miner == "all" {
        eval::MINER_NAMES.to_vec()
    } else {
        vec![args.miner.as_str()]
    };
    if MinerSpec::parameter_names(&args.miner).is_none() && args.miner != "all" {
        return Err(usage(anyhow!("unknown miner {:?}", args.miner)));
    }
    let specs = miner_specs(&names, &args.common.miner_args)?;
    let limit = timeout(args.common.timeout)?;
    let corpus = io::flatten_corpus(&read_corpus(&args.input)?, args.common.flatten);

    let mut complete = true;
    for spec in &specs {
        let out_path = if specs.len() == 1 { args.out.clone() } else { suffixed(&args.out, spec.name()) };
        let budget = Budget::new(Some(limit), Some(args.common.max_results));
        let text = match eval::run_miner(spec, &corpus, &budget) {
            Ok(out) => {
                for note in &out.notes {
                    eprintln!("{}: {note}", spec.name());
                }
                out.rendered
            }
            Err(MineError::Interrupted { reason, partial }) => {
                eprintln!("{}: stopped early ({reason}); writing {} partial results", spec.name(), partial.len());
                complete = false;
                eval::render_patterns(spec.name(), &partial, &corpus.vocabulary)
            }
            Err(e) => return Err(data(anyhow!("{}: {e}", spec.name()))),
        };
        write(&out_path, &text)?;
    }
    Ok(complete)
}

fn evaluate(args: EvalArgs) -> CliResult<bool> {
    let gt = read_pool(&args.gt)?;
    let vocab = match &args.input {
        Some(p) => read_corpus(p)?.vocabulary,
        None if args.miner == "ltl" => return Err(usage(anyhow!("ltl output names messages; pass the corpus with --in"))),
        None => Default::default(),
    };
    let text = read(&args.mined)?;
    let patterns = eval::parse_mined(&args.miner, &text, &vocab).map_err(|e| match e {
        eval::EvalError::UnknownMiner(_) => usage(e),
        _ => data(e),
    })?;
    let corpus_name = args.mined.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let report = eval::EvalReport::from_patterns(&args.miner, &corpus_name, patterns, &gt);
    let reports = [report];
    print!("{}", eval::render_table(&reports));
    if let Some(p) = &args.report {
        write(p, &eval::render_csv(&reports))?;
    }
    Ok(true)
}

fn bench(args: BenchArgs) -> CliResult<bool> {
    let names: Vec<&str> = if args.miners == "all" {
        BENCH_ALL.to_vec()
    } else {
        args.miners.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    };
    if names.is_empty() {
        return Err(usage(anyhow!("no miners selected")));
    }
    if let Some(bad) = names.iter().find(|n| MinerSpec::parameter_names(n).is_none()) {
        return Err(usage(anyhow!("unknown miner {bad:?}")));
    }
    let specs = miner_specs(&names, &args.common.miner_args)?;
    let opts = BenchOptions {
        timeout: timeout(args.common.timeout)?,
        max_results: Some(args.common.max_results),
        flatten: args.common.flatten,
        corpus_name: args.input.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    let corpus = read_corpus(&args.input)?;
    let gt = read_pool(&args.gt)?;
    let reports = eval::run_benchmark(&corpus, &gt, &specs, &opts).map_err(data)?;
    print!("{}", eval::render_table(&reports));
    if let Some(p) = &args.report {
        write(p, &eval::render_csv(&reports))?;
    }
    Ok(reports.iter().all(|r| r.status == RunStatus::Complete))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Convert(a) => convert(a),
        Command::Mine(a) => mine(a),
        Command::Eval(a) => evaluate(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
