//! Experiment harness: runs (benchmark x algorithm) grids with derived
//! per-run seeds, summarizes final fitnesses, renders comparison reports,
//! and exports convergence traces as CSV.
//!
//! Reproducibility contract: each run's seed is derived from the plan's base
//! seed and the run's coordinates with a stable scheme — FNV-1a (64-bit)
//! over the little-endian base-seed bytes followed by the UTF-8 bytes of
//! `"<problem id>|<algorithm id>|<run index>"`. Seeds therefore never depend
//! on which other cells a plan contains, and identical plans produce
//! identical record sets on every platform, whether runs execute
//! sequentially or in parallel.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::algorithms::{run, Algorithm, ConfigError, RunRecord};
use crate::benchmarks::BenchmarkSpec;

/// Errors from planning, summarizing, or exporting experiments.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Nothing to summarize.
    #[error("no run records to summarize")]
    EmptyRecords,
    /// A summary was asked to pool records from different cells.
    #[error("records from mixed cells: expected {expected}, found {found}")]
    MixedCell { expected: String, found: String },
    /// The experiment plan is unusable.
    #[error("invalid experiment plan: {0}")]
    InvalidPlan(String),
    /// A run configuration was rejected.
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// Records in one cell disagree on trace length.
    #[error("trace length mismatch in cell {cell}: {len_a} vs {len_b}")]
    TraceShape {
        cell: String,
        len_a: usize,
        len_b: usize,
    },
    /// A CSV input (reference table or stats file) failed to parse.
    #[error("malformed CSV at row {row}: {msg}")]
    MalformedCsv { row: usize, msg: String },
    /// A stats file lacks some of the four stats for a cell.
    #[error("incomplete stats for cell {cell}: missing {missing}")]
    IncompleteStats { cell: String, missing: String },
    /// Filesystem failure while exporting.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Derives the seed for one run from the base seed and the run coordinates.
///
/// FNV-1a, 64-bit: the hash of the base seed's little-endian bytes followed
/// by `"<problem id>|<algorithm id>|<run index>"` in UTF-8.
pub fn derive_run_seed(
    base_seed: u64,
    problem_id: &str,
    algorithm_id: &str,
    run_index: usize,
) -> u64 {
    const OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET_BASIS;
    let text = format!("{problem_id}|{algorithm_id}|{run_index}");
    for b in base_seed.to_le_bytes().into_iter().chain(text.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// A full experiment: every algorithm on every benchmark, `runs_per_cell`
/// independent seeded runs each.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    /// Benchmarks to run on, in row order.
    pub problems: Vec<BenchmarkSpec>,
    /// Algorithms to compare, in column order.
    pub algorithms: Vec<Algorithm>,
    /// Independent runs per (problem, algorithm) cell.
    pub runs_per_cell: usize,
    /// Agents per population.
    pub pop_size: usize,
    /// Objective-evaluation budget per run.
    pub budget_fe: usize,
    /// Base seed the per-run seeds are derived from.
    pub base_seed: u64,
}

impl Default for ExperimentPlan {
    /// The full published protocol: the whole suite at dimension 10 against
    /// all four algorithms, 30 runs of 100,000 evaluations each.
    fn default() -> Self {
        Self {
            problems: BenchmarkSpec::all(10).expect("dimension 10 is valid"),
            algorithms: Algorithm::default_suite(),
            runs_per_cell: 30,
            pop_size: 30,
            budget_fe: 100_000,
            base_seed: 42,
        }
    }
}

impl ExperimentPlan {
    /// Checks the plan before any run starts.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.problems.is_empty() {
            return Err(HarnessError::InvalidPlan("no benchmarks selected".into()));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::InvalidPlan("no algorithms selected".into()));
        }
        if self.runs_per_cell == 0 {
            return Err(HarnessError::InvalidPlan(
                "runs per cell must be at least 1".into(),
            ));
        }
        for (i, p) in self.problems.iter().enumerate() {
            if self.problems[..i].iter().any(|q| q.id() == p.id()) {
                return Err(HarnessError::InvalidPlan(format!(
                    "duplicate benchmark '{}'",
                    p.id()
                )));
            }
        }
        for (i, a) in self.algorithms.iter().enumerate() {
            if self.algorithms[..i].iter().any(|b| b.id() == a.id()) {
                return Err(HarnessError::InvalidPlan(format!(
                    "duplicate algorithm '{}'",
                    a.id()
                )));
            }
            a.validate()?;
        }
        if self.pop_size < 2 {
            return Err(ConfigError::PopulationTooSmall(self.pop_size).into());
        }
        if self.budget_fe < self.pop_size {
            return Err(ConfigError::BudgetTooSmall {
                budget_fe: self.budget_fe,
                pop_size: self.pop_size,
            }
            .into());
        }
        Ok(())
    }

    /// Total number of runs the plan will execute.
    pub fn total_runs(&self) -> usize {
        self.problems.len() * self.algorithms.len() * self.runs_per_cell
    }
}

/// Executes every run of the plan and returns the records ordered by
/// (problem, algorithm, run index). Runs are independent and execute on the
/// ambient rayon thread pool; the result, including every trace bit, is
/// identical however many threads participate.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<RunRecord>, HarnessError> {
    plan.validate()?;
    let mut jobs = Vec::with_capacity(plan.total_runs());
    for spec in &plan.problems {
        let problem = spec.to_problem();
        for algorithm in &plan.algorithms {
            for run_index in 0..plan.runs_per_cell {
                let seed =
                    derive_run_seed(plan.base_seed, spec.id().name(), algorithm.id(), run_index);
                jobs.push((problem.clone(), algorithm.clone(), seed));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(problem, algorithm, seed)| {
            run(&problem, &algorithm, plan.pop_size, plan.budget_fe, seed).map_err(Into::into)
        })
        .collect()
}

/// Distribution of final best fitnesses over one cell's runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    /// Benchmark the cell ran on.
    pub problem_id: String,
    /// Algorithm the cell ran.
    pub algorithm_id: String,
    /// Number of runs pooled.
    pub n_runs: usize,
    /// Mean final best fitness.
    pub ave: f64,
    /// Sample standard deviation (n - 1 denominator; 0 for a single run).
    pub sdev: f64,
    /// Worst (largest) final best fitness.
    pub max: f64,
    /// Best (smallest) final best fitness.
    pub min: f64,
}

/// Pools one cell's records into summary statistics.
///
/// All records must come from the same (problem, algorithm) cell. The
/// result is independent of record order: values are totally ordered before
/// any floating-point accumulation.
pub fn summarize(records: &[RunRecord]) -> Result<SummaryStats, HarnessError> {
    let first = records.first().ok_or(HarnessError::EmptyRecords)?;
    let cell = (first.problem_id.clone(), first.algorithm_id.clone());
    for r in records {
        if (r.problem_id.as_str(), r.algorithm_id.as_str())
            != (cell.0.as_str(), cell.1.as_str())
        {
            return Err(HarnessError::MixedCell {
                expected: format!("{}/{}", cell.0, cell.1),
                found: format!("{}/{}", r.problem_id, r.algorithm_id),
            });
        }
    }
    let mut finals: Vec<f64> = records.iter().map(|r| r.final_best_fitness).collect();
    finals.sort_unstable_by(f64::total_cmp);
    let n = finals.len();
    let ave = finals.iter().sum::<f64>() / n as f64;
    let sdev = if n == 1 {
        0.0
    } else {
        let ss: f64 = finals.iter().map(|&v| (v - ave) * (v - ave)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(SummaryStats {
        problem_id: cell.0,
        algorithm_id: cell.1,
        n_runs: n,
        ave,
        sdev,
        max: finals[n - 1],
        min: finals[0],
    })
}

/// Summarizes every cell present in a record set, in first-appearance order.
pub fn summarize_cells(records: &[RunRecord]) -> Result<Vec<SummaryStats>, HarnessError> {
    let mut stats = Vec::new();
    for (problem_id, algorithm_id) in cell_order(records) {
        let cell: Vec<RunRecord> = records
            .iter()
            .filter(|r| r.problem_id == problem_id && r.algorithm_id == algorithm_id)
            .cloned()
            .collect();
        stats.push(summarize(&cell)?);
    }
    Ok(stats)
}

/// The four summary statistics, in report row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatKind {
    Ave,
    Sdev,
    Max,
    Min,
}

impl StatKind {
    /// All kinds in report row order.
    pub const ALL: [StatKind; 4] = [StatKind::Ave, StatKind::Sdev, StatKind::Max, StatKind::Min];

    /// Lower-case name used in CSV files.
    pub fn name(self) -> &'static str {
        match self {
            StatKind::Ave => "ave",
            StatKind::Sdev => "sdev",
            StatKind::Max => "max",
            StatKind::Min => "min",
        }
    }
}

impl std::str::FromStr for StatKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown stat '{s}' (expected ave, sdev, max, or min)"))
    }
}

/// One externally published value, quoted verbatim in reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceEntry {
    /// Benchmark the value refers to.
    pub problem_id: String,
    /// Algorithm the value refers to.
    pub algorithm_id: String,
    /// Which statistic it is.
    pub stat: StatKind,
    /// The value exactly as published (kept as text).
    pub value: String,
}

/// Parses a reference table: a header line `function,algorithm,stat,value`
/// followed by one entry per line. Values are kept verbatim; fields must not
/// themselves contain commas (there is no quoting).
pub fn parse_reference_csv(text: &str) -> Result<Vec<ReferenceEntry>, HarnessError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(HarnessError::MalformedCsv {
        row: 1,
        msg: "empty file".into(),
    })?;
    if header.trim() != "function,algorithm,stat,value" {
        return Err(HarnessError::MalformedCsv {
            row: 1,
            msg: format!("expected header 'function,algorithm,stat,value', found '{header}'"),
        });
    }
    let mut entries = Vec::new();
    for (i, line) in lines {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(HarnessError::MalformedCsv {
                row,
                msg: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let stat: StatKind = fields[2]
            .parse()
            .map_err(|msg| HarnessError::MalformedCsv { row, msg })?;
        if fields[3].is_empty() {
            return Err(HarnessError::MalformedCsv {
                row,
                msg: "empty value".into(),
            });
        }
        entries.push(ReferenceEntry {
            problem_id: fields[0].to_string(),
            algorithm_id: fields[1].to_string(),
            stat,
            value: fields[3].to_string(),
        });
    }
    Ok(entries)
}

/// Parses a stats CSV previously written by [`Report::to_csv`] back into
/// summary rows (every cell must carry all four stats; `n_runs` is not part
/// of the file and comes back as 0).
pub fn parse_stats_csv(text: &str) -> Result<Vec<SummaryStats>, HarnessError> {
    let entries = parse_reference_csv(text)?;
    let mut order: Vec<(String, String)> = Vec::new();
    for e in &entries {
        let key = (e.problem_id.clone(), e.algorithm_id.clone());
        if !order.contains(&key) {
            order.push(key);
        }
    }
    let mut stats = Vec::with_capacity(order.len());
    for (problem_id, algorithm_id) in order {
        let mut values = [None; 4];
        for e in entries
            .iter()
            .filter(|e| e.problem_id == problem_id && e.algorithm_id == algorithm_id)
        {
            let v: f64 = e.value.parse().map_err(|_| HarnessError::MalformedCsv {
                row: 0,
                msg: format!(
                    "unparseable numeric value '{}' for {}/{}",
                    e.value, problem_id, algorithm_id
                ),
            })?;
            let slot = StatKind::ALL.iter().position(|k| *k == e.stat).unwrap();
            values[slot] = Some(v);
        }
        let missing: Vec<&str> = StatKind::ALL
            .iter()
            .enumerate()
            .filter(|(i, _)| values[*i].is_none())
            .map(|(_, k)| k.name())
            .collect();
        if !missing.is_empty() {
            return Err(HarnessError::IncompleteStats {
                cell: format!("{problem_id}/{algorithm_id}"),
                missing: missing.join(", "),
            });
        }
        stats.push(SummaryStats {
            problem_id,
            algorithm_id,
            n_runs: 0,
            ave: values[0].unwrap(),
            sdev: values[1].unwrap(),
            max: values[2].unwrap(),
            min: values[3].unwrap(),
        });
    }
    Ok(stats)
}

/// A rendered comparison: computed statistics per cell, with optional
/// externally published columns quoted verbatim and flagged as such.
#[derive(Debug, Clone)]
pub struct Report {
    problems: Vec<String>,
    algorithms: Vec<String>,
    cells: Vec<SummaryStats>,
    reference: Vec<ReferenceEntry>,
    reference_algorithms: Vec<String>,
}

/// Builds a comparison report from per-cell statistics and (possibly empty)
/// published reference entries. Row order follows the first appearance of
/// each benchmark, column order the first appearance of each algorithm.
/// Reference entries for benchmarks absent from the computed set are
/// ignored.
pub fn comparison_report(
    stats: &[SummaryStats],
    reference: &[ReferenceEntry],
) -> Result<Report, HarnessError> {
    if stats.is_empty() {
        return Err(HarnessError::EmptyRecords);
    }
    let mut problems = Vec::new();
    let mut algorithms = Vec::new();
    for s in stats {
        if !problems.contains(&s.problem_id) {
            problems.push(s.problem_id.clone());
        }
        if !algorithms.contains(&s.algorithm_id) {
            algorithms.push(s.algorithm_id.clone());
        }
    }
    let mut reference_algorithms = Vec::new();
    for e in reference {
        if problems.contains(&e.problem_id) && !reference_algorithms.contains(&e.algorithm_id) {
            reference_algorithms.push(e.algorithm_id.clone());
        }
    }
    Ok(Report {
        problems,
        algorithms,
        cells: stats.to_vec(),
        reference: reference.to_vec(),
        reference_algorithms,
    })
}

impl Report {
    fn cell(&self, problem: &str, algorithm: &str) -> Option<&SummaryStats> {
        self.cells
            .iter()
            .find(|s| s.problem_id == problem && s.algorithm_id == algorithm)
    }

    fn reference_value(&self, problem: &str, algorithm: &str, stat: StatKind) -> Option<&str> {
        self.reference
            .iter()
            .find(|e| e.problem_id == problem && e.algorithm_id == algorithm && e.stat == stat)
            .map(|e| e.value.as_str())
    }

    /// Renders the comparison as a Markdown table: one row per (benchmark,
    /// statistic), one column per algorithm, published columns last and
    /// marked with `*`.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Benchmark comparison\n\n");
        let n_runs = self.cells.iter().map(|s| s.n_runs).max().unwrap_or(0);
        if n_runs > 0 {
            let _ = writeln!(out, "{n_runs} runs per cell.\n");
        }
        let mut header = String::from("| function | stat |");
        let mut rule = String::from("| --- | --- |");
        for a in &self.algorithms {
            let _ = write!(header, " {a} |");
            rule.push_str(" --- |");
        }
        for a in &self.reference_algorithms {
            let _ = write!(header, " {a} (published)* |");
            rule.push_str(" --- |");
        }
        out.push_str(&header);
        out.push('\n');
        out.push_str(&rule);
        out.push('\n');
        for p in &self.problems {
            for stat in StatKind::ALL {
                let mut row = format!("| {p} | {} |", stat.name());
                for a in &self.algorithms {
                    let text = match self.cell(p, a) {
                        Some(s) => format!("{:.4e}", s.value(stat)),
                        None => "-".to_string(),
                    };
                    let _ = write!(row, " {text} |");
                }
                for a in &self.reference_algorithms {
                    let text = self.reference_value(p, a, stat).unwrap_or("-");
                    let _ = write!(row, " {text} |");
                }
                out.push_str(&row);
                out.push('\n');
            }
        }
        if !self.reference_algorithms.is_empty() {
            out.push_str(
                "\n\\* published values, quoted verbatim from external sources; \
                 not reproduced by these runs.\n",
            );
        }
        out
    }

    /// Renders the computed statistics as a long-form CSV with the same
    /// schema reference tables use (`function,algorithm,stat,value`), so a
    /// stats file can be re-read by the report generator later.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("function,algorithm,stat,value\n");
        for p in &self.problems {
            for a in &self.algorithms {
                if let Some(s) = self.cell(p, a) {
                    for stat in StatKind::ALL {
                        let _ = writeln!(out, "{p},{a},{},{:e}", stat.name(), s.value(stat));
                    }
                }
            }
        }
        out
    }
}

impl SummaryStats {
    /// The value of one statistic.
    pub fn value(&self, stat: StatKind) -> f64 {
        match stat {
            StatKind::Ave => self.ave,
            StatKind::Sdev => self.sdev,
            StatKind::Max => self.max,
            StatKind::Min => self.min,
        }
    }
}

fn cell_order(records: &[RunRecord]) -> Vec<(String, String)> {
    let mut order: Vec<(String, String)> = Vec::new();
    for r in records {
        let key = (r.problem_id.clone(), r.algorithm_id.clone());
        if !order.contains(&key) {
            order.push(key);
        }
    }
    order
}

/// Writes one convergence CSV per (problem, algorithm) cell into `dir` and
/// returns the paths in cell order.
///
/// Each file is named `convergence_<problem>_<algorithm>.csv` and holds the
/// header `iteration,run_0,...,run_{n-1},mean` followed by one row per
/// iteration: the iteration index, each run's best-so-far fitness, and the
/// cross-run mean, all in full-precision scientific notation. Run columns
/// follow record order. Re-exporting identical records writes identical
/// bytes.
pub fn export_convergence(records: &[RunRecord], dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyRecords);
    }
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (problem_id, algorithm_id) in cell_order(records) {
        let cell: Vec<&RunRecord> = records
            .iter()
            .filter(|r| r.problem_id == problem_id && r.algorithm_id == algorithm_id)
            .collect();
        let len = cell[0].trace.len();
        for r in &cell {
            if r.trace.len() != len {
                return Err(HarnessError::TraceShape {
                    cell: format!("{problem_id}/{algorithm_id}"),
                    len_a: len,
                    len_b: r.trace.len(),
                });
            }
        }
        let mut text = String::from("iteration");
        for i in 0..cell.len() {
            let _ = write!(text, ",run_{i}");
        }
        text.push_str(",mean\n");
        for t in 0..len {
            let _ = write!(text, "{t}");
            let mut sum = 0.0;
            for r in &cell {
                let v = r.trace[t];
                sum += v;
                let _ = write!(text, ",{v:e}");
            }
            let _ = writeln!(text, ",{:e}", sum / cell.len() as f64);
        }
        let path = dir.join(format!("convergence_{problem_id}_{algorithm_id}.csv"));
        std::fs::write(&path, text)?;
        paths.push(path);
    }
    Ok(paths)
}
