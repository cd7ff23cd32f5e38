//! Command-line interface for the optimizer library: single runs, full
//! benchmark comparisons, report generation, and convergence plots.
//!
//! Option precedence is flag > config file > environment (`SCCSA_OUT` for
//! the output directory) > built-in default. Exit codes: 0 on success, 1
//! for configuration or data errors, 2 for I/O failures.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use sccsa::algorithms::{Algorithm, ConfigError, DiffMode, R1Mode, RunRecord};
use sccsa::benchmarks::{BenchmarkError, BenchmarkSpec, DEFAULT_DIMENSION};
use sccsa::harness::{
    comparison_report, derive_run_seed, export_convergence, parse_reference_csv, parse_stats_csv,
    run_experiment, summarize_cells, ExperimentPlan, HarnessError, ReferenceEntry,
};
use sccsa::plot::{parse_convergence_csv, render_svg, PlotError, Series};

#[derive(Debug, Parser)]
#[command(
    name = "sccsa",
    version,
    about = "Population-based global optimization benchmarks: a sine cosine crow search hybrid \
             against its parent heuristics"
)]
struct Cli {
    /// Flat key=value config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one algorithm once on one benchmark and write its trace.
    Run(RunArgs),
    /// Run the full comparison grid and write report, stats, and traces.
    Bench(BenchArgs),
    /// Render a Markdown comparison report from a stats CSV.
    Report(ReportArgs),
    /// Render convergence CSVs as a single SVG line chart.
    Plot(PlotArgs),
    /// List available benchmarks and algorithms.
    List,
}

#[derive(Debug, Args)]
struct CommonOpts {
    /// Benchmark functions, comma separated (e.g. f1,f3).
    #[arg(long = "fn", value_name = "LIST", value_delimiter = ',')]
    functions: Vec<String>,
    /// Algorithms, comma separated (sccsa, csa, sca, random).
    #[arg(long = "algo", value_name = "LIST", value_delimiter = ',')]
    algorithms: Vec<String>,
    /// Problem dimensionality [default: 10].
    #[arg(long)]
    dim: Option<usize>,
    /// Population size [default: 30].
    #[arg(long)]
    pop: Option<usize>,
    /// Objective-evaluation budget per run [default: 100000].
    #[arg(long)]
    budget: Option<usize>,
    /// Base seed runs derive their seeds from [default: 42].
    #[arg(long)]
    seed: Option<u64>,
    /// r1 amplitude schedule: 'sca' (linearly decaying) or 'paper'
    /// (uniform unit draws) [default: sca].
    #[arg(long = "r1-mode", value_name = "MODE")]
    r1_mode: Option<String>,
    /// Crow-flight difference: 'abs' or 'signed' [default: abs].
    #[arg(long = "csa-diff", value_name = "MODE")]
    csa_diff: Option<String>,
    /// Output directory [default: out].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// Independent runs per (function, algorithm) cell [default: 30].
    #[arg(long)]
    runs: Option<usize>,
    /// Worker threads for the run grid [default: all cores].
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Stats CSV to render (schema: function,algorithm,stat,value).
    #[arg(long, value_name = "FILE")]
    stats: PathBuf,
    /// Optional published-values CSV rendered alongside, same schema.
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Convergence CSV files to draw, one curve per file.
    #[arg(value_name = "CSV", required = true)]
    inputs: Vec<PathBuf>,
    /// Output SVG file [default: convergence.svg].
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// CLI failures, split by exit code: configuration/data errors exit 1,
/// I/O failures exit 2.
#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<BenchmarkError> for CliError {
    fn from(e: BenchmarkError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Run(args) => cmd_run(args, &file),
        Command::Bench(args) => cmd_bench(args, &file),
        Command::Report(args) => cmd_report(args, &file),
        Command::Plot(args) => cmd_plot(args),
        Command::List => cmd_list(),
    }
}

// --- configuration resolution ----------------------------------------------

const CONFIG_KEYS: [&str; 11] = [
    "fn", "algo", "dim", "pop", "budget", "runs", "seed", "jobs", "r1_mode", "csa_diff", "out",
];

/// Parses a flat key=value file. Blank lines and `#` comments are skipped;
/// unknown or repeated keys are hard errors.
fn load_config(path: Option<&Path>) -> Result<HashMap<String, String>, CliError> {
    let Some(path) = path else {
        return Ok(HashMap::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}:{}: expected key=value, found '{line}'",
                path.display(),
                i + 1
            )));
        };
        let key = k.trim().to_string();
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "{}:{}: unknown key '{key}' (known keys: {})",
                path.display(),
                i + 1,
                CONFIG_KEYS.join(", ")
            )));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Config(format!(
                "{}:{}: duplicate key '{key}'",
                path.display(),
                i + 1
            )));
        }
    }
    Ok(map)
}

fn parse_value<T: FromStr>(key: &str, text: &str) -> Result<T, CliError> {
    text.parse()
        .map_err(|_| CliError::Config(format!("invalid value '{text}' for {key}")))
}

/// Flag > config file > default.
fn pick<T: FromStr>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => match file.get(key) {
            Some(s) => parse_value(key, s),
            None => Ok(default),
        },
    }
}

fn pick_list(flag: &[String], file: &HashMap<String, String>, key: &str) -> Vec<String> {
    if !flag.is_empty() {
        return flag.to_vec();
    }
    match file.get(key) {
        Some(s) => s
            .split(',')
            .map(|p| p.trim().to_string())
            .filter(|p| !p.is_empty())
            .collect(),
        None => Vec::new(),
    }
}

fn pick_out(flag: Option<PathBuf>, file: &HashMap<String, String>) -> PathBuf {
    flag.or_else(|| file.get("out").map(PathBuf::from))
        .or_else(|| std::env::var_os("SCCSA_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

struct Resolved {
    functions: Vec<String>,
    algorithms: Vec<String>,
    dim: usize,
    pop: usize,
    budget: usize,
    seed: u64,
    r1_name: String,
    csa_diff_name: String,
    r1_mode: R1Mode,
    diff_mode: DiffMode,
    out: PathBuf,
}

fn resolve_common(opts: CommonOpts, file: &HashMap<String, String>) -> Result<Resolved, CliError> {
    let r1_name: String = pick(opts.r1_mode, file, "r1_mode", "sca".to_string())?;
    let r1_mode = match r1_name.as_str() {
        "sca" => R1Mode::ScaOriginal { a: 2.0 },
        "paper" => R1Mode::PaperLiteral,
        other => {
            return Err(CliError::Config(format!(
                "invalid r1 mode '{other}' (expected 'sca' or 'paper')"
            )))
        }
    };
    let csa_diff_name: String = pick(opts.csa_diff, file, "csa_diff", "abs".to_string())?;
    let diff_mode = match csa_diff_name.as_str() {
        "abs" => DiffMode::PaperAbs,
        "signed" => DiffMode::Signed,
        other => {
            return Err(CliError::Config(format!(
                "invalid crow-flight difference '{other}' (expected 'abs' or 'signed')"
            )))
        }
    };
    Ok(Resolved {
        functions: pick_list(&opts.functions, file, "fn"),
        algorithms: pick_list(&opts.algorithms, file, "algo"),
        dim: pick(opts.dim, file, "dim", DEFAULT_DIMENSION)?,
        pop: pick(opts.pop, file, "pop", 30)?,
        budget: pick(opts.budget, file, "budget", 100_000)?,
        seed: pick(opts.seed, file, "seed", 42)?,
        r1_name,
        csa_diff_name,
        r1_mode,
        diff_mode,
        out: pick_out(opts.out, file),
    })
}

fn build_problems(names: &[String], dim: usize) -> Result<Vec<BenchmarkSpec>, CliError> {
    names
        .iter()
        .map(|n| BenchmarkSpec::by_name(n, dim).map_err(Into::into))
        .collect()
}

fn build_algorithms(resolved: &Resolved) -> Result<Vec<Algorithm>, CliError> {
    resolved
        .algorithms
        .iter()
        .map(|id| {
            Algorithm::from_id(id)
                .map(|a| {
                    a.with_r1_mode(resolved.r1_mode)
                        .with_diff_mode(resolved.diff_mode)
                })
                .map_err(Into::into)
        })
        .collect()
}

fn print_banner(command: &str, resolved: &Resolved, extra: &[(&str, String)]) {
    println!("effective configuration:");
    println!("  command   = {command}");
    println!("  functions = {}", resolved.functions.join(","));
    println!("  algorithms= {}", resolved.algorithms.join(","));
    println!("  dim       = {}", resolved.dim);
    println!("  pop       = {}", resolved.pop);
    println!("  budget    = {}", resolved.budget);
    println!("  seed      = {}", resolved.seed);
    println!("  r1_mode   = {}", resolved.r1_name);
    println!("  csa_diff  = {}", resolved.csa_diff_name);
    for (k, v) in extra {
        println!("  {k:<10}= {v}");
    }
    println!("  out       = {}", resolved.out.display());
}

// --- subcommands ------------------------------------------------------------

fn cmd_run(args: RunArgs, file: &HashMap<String, String>) -> Result<(), CliError> {
    let resolved = resolve_common(args.common, file)?;
    if resolved.functions.len() != 1 {
        return Err(CliError::Config(format!(
            "run needs exactly one benchmark via --fn (e.g. --fn f1); got {}",
            if resolved.functions.is_empty() {
                "none".to_string()
            } else {
                resolved.functions.join(",")
            }
        )));
    }
    if resolved.algorithms.len() != 1 {
        return Err(CliError::Config(format!(
            "run needs exactly one algorithm via --algo (e.g. --algo sccsa); got {}",
            if resolved.algorithms.is_empty() {
                "none".to_string()
            } else {
                resolved.algorithms.join(",")
            }
        )));
    }
    let spec = &build_problems(&resolved.functions, resolved.dim)?[0];
    let algorithm = &build_algorithms(&resolved)?[0];
    print_banner("run", &resolved, &[]);

    let record = sccsa::algorithms::run(
        &spec.to_problem(),
        algorithm,
        resolved.pop,
        resolved.budget,
        resolved.seed,
    )?;
    println!();
    println!("{} / {} (seed {})", spec.id().name(), algorithm.id(), record.seed);
    println!("final best fitness   = {:e}", record.final_best_fitness);
    println!("function evaluations = {}", record.fe_count);
    let position: Vec<String> = record
        .final_best_position
        .iter()
        .map(|v| format!("{v:.6e}"))
        .collect();
    println!("final best position  = [{}]", position.join(", "));
    let paths = export_convergence(std::slice::from_ref(&record), &resolved.out)?;
    println!("wrote {}", paths[0].display());
    println!("elapsed: {:.3}s", record.wall_time.as_secs_f64());
    Ok(())
}

fn cmd_bench(args: BenchArgs, file: &HashMap<String, String>) -> Result<(), CliError> {
    let mut resolved = resolve_common(args.common, file)?;
    if resolved.functions.is_empty() {
        resolved.functions = sccsa::benchmarks::BenchmarkId::ALL
            .iter()
            .map(|id| id.name().to_string())
            .collect();
    }
    if resolved.algorithms.is_empty() {
        resolved.algorithms = Algorithm::IDS.iter().map(|s| s.to_string()).collect();
    }
    let runs: usize = pick(args.runs, file, "runs", 30)?;
    let jobs: Option<usize> = match args.jobs {
        Some(j) => Some(j),
        None => match file.get("jobs") {
            Some(s) => Some(parse_value("jobs", s)?),
            None => None,
        },
    };
    if jobs == Some(0) {
        return Err(CliError::Config("jobs must be at least 1".into()));
    }

    let plan = ExperimentPlan {
        problems: build_problems(&resolved.functions, resolved.dim)?,
        algorithms: build_algorithms(&resolved)?,
        runs_per_cell: runs,
        pop_size: resolved.pop,
        budget_fe: resolved.budget,
        base_seed: resolved.seed,
    };
    plan.validate()?;
    let effective_jobs = jobs.unwrap_or_else(rayon::current_num_threads);
    print_banner(
        "bench",
        &resolved,
        &[
            ("runs", runs.to_string()),
            ("jobs", effective_jobs.to_string()),
        ],
    );
    println!();
    println!(
        "running {} cells x {} runs ({} evaluations total)...",
        plan.problems.len() * plan.algorithms.len(),
        runs,
        plan.total_runs() * (plan.budget_fe / plan.pop_size) * plan.pop_size
    );

    let started = Instant::now();
    let records: Vec<RunRecord> = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Config(format!("cannot build a {j}-thread pool: {e}")))?
            .install(|| run_experiment(&plan))?,
        None => run_experiment(&plan)?,
    };
    let elapsed = started.elapsed();

    let stats = summarize_cells(&records)?;
    let report = comparison_report(&stats, &[])?;
    std::fs::create_dir_all(&resolved.out).map_err(|e| io_error(&resolved.out, e))?;
    let report_path = resolved.out.join("report.md");
    std::fs::write(&report_path, report.to_markdown()).map_err(|e| io_error(&report_path, e))?;
    let stats_path = resolved.out.join("stats.csv");
    std::fs::write(&stats_path, report.to_csv()).map_err(|e| io_error(&stats_path, e))?;
    let convergence_dir = resolved.out.join("convergence");
    let traces = export_convergence(&records, &convergence_dir)?;

    println!("wrote {}", report_path.display());
    println!("wrote {}", stats_path.display());
    println!(
        "wrote {} convergence files under {}",
        traces.len(),
        convergence_dir.display()
    );
    println!("elapsed: {:.3}s", elapsed.as_secs_f64());
    Ok(())
}

fn cmd_report(args: ReportArgs, file: &HashMap<String, String>) -> Result<(), CliError> {
    let out = pick_out(args.out, file);
    println!("effective configuration:");
    println!("  command   = report");
    println!("  stats     = {}", args.stats.display());
    if let Some(reference) = &args.reference {
        println!("  reference = {}", reference.display());
    }
    println!("  out       = {}", out.display());

    let stats_text =
        std::fs::read_to_string(&args.stats).map_err(|e| io_error(&args.stats, e))?;
    let stats = parse_stats_csv(&stats_text)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.stats.display())))?;
    let reference: Vec<ReferenceEntry> = match &args.reference {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            parse_reference_csv(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => Vec::new(),
    };
    let report = comparison_report(&stats, &reference)?;
    std::fs::create_dir_all(&out).map_err(|e| io_error(&out, e))?;
    let path = out.join("report.md");
    std::fs::write(&path, report.to_markdown()).map_err(|e| io_error(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), CliError> {
    let out = args.out.unwrap_or_else(|| PathBuf::from("convergence.svg"));
    println!("effective configuration:");
    println!("  command   = plot");
    let inputs: Vec<String> = args.inputs.iter().map(|p| p.display().to_string()).collect();
    println!("  inputs    = {}", inputs.join(","));
    println!("  out       = {}", out.display());

    let mut series = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let points = parse_convergence_csv(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("series");
        let name = stem.strip_prefix("convergence_").unwrap_or(stem).to_string();
        series.push(Series { name, points });
    }
    let svg = render_svg(&series).map_err(|e: PlotError| CliError::Config(e.to_string()))?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
        }
    }
    std::fs::write(&out, svg).map_err(|e| io_error(&out, e))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_list() -> Result<(), CliError> {
    println!("benchmark functions (shown at dimension {DEFAULT_DIMENSION}):");
    for spec in BenchmarkSpec::all(DEFAULT_DIMENSION).expect("default dimension is valid") {
        println!(
            "  {:<4} {:<55} [{}, {}]",
            spec.id().name(),
            spec.id().description(),
            spec.bounds().lower()[0],
            spec.bounds().upper()[0]
        );
    }
    println!();
    println!("algorithms:");
    println!("  sccsa   sine cosine crow search hybrid");
    println!("  csa     crow search");
    println!("  sca     sine cosine");
    println!("  random  uniform random sampling baseline");
    println!();
    println!(
        "run seeds derive from the base seed as fnv1a64(seed_le_bytes || \
         \"function|algorithm|run_index\")"
    );
    let example = derive_run_seed(42, "f1", "sccsa", 0);
    println!("e.g. base seed 42, f1/sccsa run 0 -> {example:#018x}");
    Ok(())
}
