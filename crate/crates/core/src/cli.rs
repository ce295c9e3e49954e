//! The `queens` command line.
//!
//! Every subcommand is a plain function writing to caller-supplied sinks so
//! the binary, the tests and the benchmarks drive the same code.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::AtomicBool;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bankmodel::{analyze_layout, occupancy_grid, BankGeometry, Layout, Phasing};
use crate::checkpoint::{Checkpoint, CheckpointWriter, DEFAULT_INTERVAL};
use crate::error::{Error, Result};
use crate::report::{log_finish, log_generation, log_result, log_start, timestamp, SolveReport};
use crate::scheduler::{
    fresh_lanes, run, Lane, Observer, PartitionPlan, ProgressBoard, RunControl, Strategy, Workload,
    DEFAULT_CHUNK_SIZE,
};
use crate::solver::{Kernel, SolutionCount, StackConfig, Subproblem};
use crate::subproblems::{count_subproblems, export_lines, generate, GenerationPlan};

/// Environment variable overriding `--workers`.
pub const WORKERS_ENV: &str = "QUEENS_WORKERS";

pub type Sink<'a> = &'a mut (dyn Write + Send);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Log,
}

#[derive(Debug, Parser)]
#[command(name = "queens", version, about = "Parallel N-Queens solution counter")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count all solutions of an n x n board.
    Solve(SolveArgs),
    /// Count the subproblems a pre-placement produces.
    Subcount(SubcountArgs),
    /// Time a sweep of boards, pre-placements, configs and kernels (CSV).
    Bench(BenchArgs),
    /// Continue an interrupted run from its checkpoint file.
    Resume(ResumeArgs),
    /// Bank-conflict report for the stack layouts.
    Layout(LayoutArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    /// Worker threads [default: available parallelism]
    #[arg(long, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[arg(long, default_value = "weighted", value_parser = Strategy::from_str)]
    pub partition: Strategy,
    /// Comma-separated weights for `--partition weighted`.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Subproblems per claim for `--partition stealing`.
    #[arg(long, default_value_t = DEFAULT_CHUNK_SIZE)]
    pub chunk_size: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 6)]
    pub pre_rows: u32,
    /// config1..config5 or words:<stack words>
    #[arg(long, default_value = "config2")]
    pub config: String,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value = "lastrow", value_parser = Kernel::from_str)]
    pub kernel: Kernel,
    #[arg(long, value_enum, default_value_t = Format::Log)]
    pub format: Format,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Continue from `--checkpoint` instead of starting over.
    #[arg(long, requires = "checkpoint")]
    pub resume: bool,
    /// Solved subproblems between checkpoint flushes.
    #[arg(long, default_value_t = DEFAULT_INTERVAL)]
    pub checkpoint_interval: u64,
    /// Write the generated subproblems to this file.
    #[arg(long)]
    pub export_subproblems: Option<PathBuf>,
    /// Stop after this many subproblems, as if interrupted.
    #[arg(long, hide = true)]
    pub interrupt_after: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SubcountArgs {
    pub n: u32,
    pub pre_rows: u32,
    #[arg(long)]
    pub export_subproblems: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Inclusive range, e.g. 12..15
    #[arg(long, value_parser = parse_range)]
    pub n: RangeInclusive<u32>,
    #[arg(long, value_parser = parse_range, default_value = "6")]
    pub pre_rows: RangeInclusive<u32>,
    #[arg(long, value_delimiter = ',', default_value = "config2")]
    pub configs: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "lastrow", value_parser = Kernel::from_str)]
    pub kernels: Vec<Kernel>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[command(flatten)]
    pub plan: PlanArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ResumeArgs {
    pub checkpoint: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Log)]
    pub format: Format,
    #[arg(long, default_value_t = DEFAULT_INTERVAL)]
    pub checkpoint_interval: u64,
    #[arg(long, hide = true)]
    pub interrupt_after: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum LayoutFormat {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct LayoutArgs {
    /// Frames per stack.
    #[arg(long, default_value_t = 24)]
    pub depth: u32,
    #[arg(long, default_value_t = 32)]
    pub threads: u32,
    /// Stack sizes (words) of the contiguous layouts to compare.
    #[arg(long, value_delimiter = ',', default_value = "96")]
    pub stack_words: Vec<u32>,
    #[arg(long, default_value_t = 32)]
    pub banks: u32,
    #[arg(long, default_value_t = 4)]
    pub word_bytes: u32,
    #[arg(long, default_value_t = 32)]
    pub warp_size: u32,
    #[arg(long, value_enum, default_value_t = LayoutFormat::Json)]
    pub format: LayoutFormat,
    /// Bank rows drawn per layout in text output.
    #[arg(long, default_value_t = 8)]
    pub grid_rows: u32,
}

/// `a..b` (inclusive), `a..=b` or a single value.
pub fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let num = |x: &str| x.trim().parse::<u32>().map_err(|_| format!("bad number `{x}` in range `{s}`"));
    let r = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.strip_prefix('=').unwrap_or(b))?,
        None => {
            let v = num(s)?;
            v..=v
        }
    };
    if r.is_empty() {
        return Err(format!("empty range `{s}`"));
    }
    Ok(r)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl PlanArgs {
    pub fn to_plan(&self) -> Result<PartitionPlan> {
        let plan = match self.partition {
            Strategy::Weighted => match &self.weights {
                Some(w) => {
                    if let Some(k) = self.workers {
                        if k != w.len() {
                            return Err(Error::Partition(format!("{} weights given for {k} workers", w.len())));
                        }
                    }
                    PartitionPlan::weighted(w.clone())
                }
                None => PartitionPlan::reference_weighted(self.workers.unwrap_or_else(default_workers)),
            },
            Strategy::Uniform => PartitionPlan::uniform(self.workers.unwrap_or_else(default_workers)),
            Strategy::Stealing => {
                PartitionPlan::stealing(self.workers.unwrap_or_else(default_workers), self.chunk_size)
            }
        };
        if self.weights.is_some() && self.partition != Strategy::Weighted {
            return Err(Error::Partition("--weights only applies to --partition weighted".into()));
        }
        plan.validate()?;
        Ok(plan)
    }
}

/// Fully resolved options of a solve run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: u32,
    pub pre_rows: u32,
    pub config: StackConfig,
    pub plan: PartitionPlan,
    pub kernel: Kernel,
    pub format: Format,
    pub checkpoint: Option<PathBuf>,
    pub resume: bool,
    pub checkpoint_interval: u64,
    pub export_subproblems: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(n: u32, pre_rows: u32) -> RunConfig {
        RunConfig {
            n,
            pre_rows,
            config: StackConfig::default(),
            plan: PartitionPlan::reference_weighted(1),
            kernel: Kernel::default(),
            format: Format::Log,
            checkpoint: None,
            resume: false,
            checkpoint_interval: DEFAULT_INTERVAL,
            export_subproblems: None,
        }
    }

    pub fn from_args(a: &SolveArgs) -> Result<RunConfig> {
        Ok(RunConfig {
            n: a.n,
            pre_rows: a.pre_rows,
            config: StackConfig::named(&a.config)?,
            plan: a.plan.to_plan()?,
            kernel: a.kernel,
            format: a.format,
            checkpoint: a.checkpoint.clone(),
            resume: a.resume,
            checkpoint_interval: a.checkpoint_interval.max(1),
            export_subproblems: a.export_subproblems.clone(),
        })
    }

    /// Pre-placement actually used: boards smaller than `pre_rows + 1` are
    /// split after their first `n - 1` rows.
    pub fn effective_pre_rows(&self) -> u32 {
        self.pre_rows.clamp(1, self.n.saturating_sub(1).max(1))
    }

    /// Check board size and stack depth before any work starts.
    pub fn validate(&self) -> Result<()> {
        if !(1..=crate::mask::MAX_N).contains(&self.n) {
            return Err(Error::BoardSize(self.n));
        }
        if self.n > 1 {
            GenerationPlan::new(self.n, self.effective_pre_rows()).validate()?;
            self.config.require(self.kernel.frames_needed(self.n, self.effective_pre_rows()))?;
        }
        if self.checkpoint.is_some() && self.plan.strategy == Strategy::Stealing {
            return Err(Error::Partition("stealing runs cannot be checkpointed; use uniform or weighted".into()));
        }
        self.plan.validate()
    }
}

/// Live log lines plus periodic checkpoint flushes.
struct RunObserver<'a> {
    log: Mutex<Sink<'a>>,
    checkpoint: Option<Mutex<CheckpointState>>,
}

struct CheckpointState {
    writer: CheckpointWriter,
    interval: u64,
    template: Checkpoint,
    prior: Duration,
    started: Instant,
    error: Option<Error>,
}

impl CheckpointState {
    fn flush(&mut self, lanes: Vec<Lane>) {
        let mut cp = self.template.clone();
        cp.lanes = lanes;
        cp.elapsed = self.prior + self.started.elapsed();
        if let Err(e) = self.writer.flush(&cp) {
            self.error.get_or_insert(e);
        }
    }
}

impl RunObserver<'_> {
    fn line(&self, s: &str) {
        let mut sink = self.log.lock().expect("log lock");
        let _ = sink.write_all(s.as_bytes());
        let _ = sink.flush();
    }
}

impl Observer for RunObserver<'_> {
    fn worker_started(&self, worker: usize, assigned: u64, fraction: f64) {
        self.line(&log_start(worker, assigned, fraction));
    }

    fn worker_finished(&self, worker: usize) {
        self.line(&log_finish(worker));
    }

    fn progress(&self, completed: u64, board: &ProgressBoard) {
        if let Some(cp) = &self.checkpoint {
            let mut cp = cp.lock().expect("checkpoint lock");
            if completed.is_multiple_of(cp.interval) {
                cp.flush(board.snapshot());
            }
        }
    }
}

fn write_export(path: &Path, items: &[Subproblem]) -> Result<()> {
    export_lines(items.iter().copied(), BufWriter::new(File::create(path)?))?;
    Ok(())
}

/// Count all solutions for `cfg`. Live log lines go to `log`; the final
/// report is returned (also on interruption, with `completed` false).
pub fn cmd_solve(cfg: &RunConfig, control: &RunControl, log: Sink<'_>) -> Result<SolveReport> {
    cfg.validate()?;
    let pre_rows = cfg.effective_pre_rows();
    if cfg.resume {
        let path = cfg.checkpoint.as_deref().expect("resume requires a checkpoint path");
        let cp = Checkpoint::load(path)?;
        cp.ensure_matches(cfg.n, pre_rows, cfg.kernel)?;
        return continue_run(cp, path, cfg.checkpoint_interval, control, log);
    }
    if cfg.n == 1 {
        return Ok(SolveReport::trivial(1, pre_rows, &cfg.config, cfg.kernel, &cfg.plan, SolutionCount(1)));
    }

    let gen_start = Instant::now();
    let subs: Vec<Subproblem> = generate(&GenerationPlan::new(cfg.n, pre_rows))?.collect();
    let generation = gen_start.elapsed();
    if let Some(path) = &cfg.export_subproblems {
        write_export(path, &subs)?;
    }
    let lanes = fresh_lanes(&cfg.plan, subs.len() as u64)?;
    let checkpoint = match &cfg.checkpoint {
        Some(path) => Some((
            path.as_path(),
            Checkpoint::new(
                cfg.n,
                pre_rows,
                cfg.kernel,
                &cfg.config,
                &cfg.plan,
                subs.len() as u64,
                Duration::ZERO,
                lanes.clone(),
            )?,
        )),
        None => None,
    };
    let session = Session {
        work: Workload { n: cfg.n, pre_rows, config: &cfg.config, kernel: cfg.kernel, subproblems: &subs },
        plan: &cfg.plan,
        lanes,
        generation,
        prior: Duration::ZERO,
        checkpoint,
        interval: cfg.checkpoint_interval,
    };
    session.execute(control, log)
}

/// Continue the run recorded in the checkpoint at `path`.
pub fn cmd_resume(path: &Path, interval: u64, control: &RunControl, log: Sink<'_>) -> Result<SolveReport> {
    let cp = Checkpoint::load(path)?;
    continue_run(cp, path, interval, control, log)
}

fn continue_run(cp: Checkpoint, path: &Path, interval: u64, control: &RunControl, log: Sink<'_>) -> Result<SolveReport> {
    let gen_start = Instant::now();
    let subs: Vec<Subproblem> = generate(&GenerationPlan::new(cp.n, cp.pre_rows))?.collect();
    let generation = gen_start.elapsed();
    if subs.len() as u64 != cp.subproblems {
        return Err(Error::Checkpoint(format!(
            "checkpoint records {} subproblems but generation produced {}",
            cp.subproblems,
            subs.len()
        )));
    }
    let session = Session {
        work: Workload { n: cp.n, pre_rows: cp.pre_rows, config: &cp.config, kernel: cp.kernel, subproblems: &subs },
        plan: &cp.plan,
        lanes: cp.lanes.clone(),
        generation,
        prior: cp.elapsed,
        checkpoint: Some((path, cp.clone())),
        interval: interval.max(1),
    };
    session.execute(control, log)
}

struct Session<'a> {
    work: Workload<'a>,
    plan: &'a PartitionPlan,
    lanes: Vec<Lane>,
    generation: Duration,
    prior: Duration,
    checkpoint: Option<(&'a Path, Checkpoint)>,
    interval: u64,
}

impl Session<'_> {
    fn execute(self, control: &RunControl, log: Sink<'_>) -> Result<SolveReport> {
        let task_count = self.work.subproblems.len();
        let _ = log.write_all(log_generation(self.generation.as_secs_f64() * 1e3, task_count as u64).as_bytes());
        let checkpoint = self.checkpoint.map(|(path, template)| {
            Mutex::new(CheckpointState {
                writer: CheckpointWriter::new(path, Some(template.lanes.clone())),
                interval: self.interval,
                template,
                prior: self.prior,
                started: Instant::now(),
                error: None,
            })
        });
        let observer = RunObserver { log: Mutex::new(log), checkpoint };
        let outcome = run(&self.work, self.plan, self.lanes, control, &observer);
        let RunObserver { log, checkpoint } = observer;
        let log = log.into_inner().expect("log lock");
        let outcome = outcome?;
        if let Some(cp) = checkpoint {
            let mut cp = cp.into_inner().expect("checkpoint lock");
            cp.flush(outcome.lanes.clone());
            if let Some(e) = cp.error.take() {
                return Err(e);
            }
        }
        if !outcome.completed {
            let done: u64 = outcome.lanes.iter().map(|l| l.processed).sum();
            let _ = writeln!(log, "[{}] run interrupted with {done} of {task_count} subproblems done", timestamp());
        }
        Ok(SolveReport::from_outcome(&self.work, self.plan, &outcome, self.generation, self.prior))
    }
}

fn emit_report(report: &SolveReport, format: Format, out: Sink<'_>) -> Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Csv => write!(out, "{}", report.to_csv())?,
        Format::Log => write!(out, "{}", log_result(report.n, report.total, report.calc_ms))?,
    }
    out.flush()?;
    Ok(())
}

/// Count subproblems without solving them; optionally export the stream.
pub fn cmd_subcount(args: &SubcountArgs, out: Sink<'_>) -> Result<u64> {
    let start = Instant::now();
    let count = match &args.export_subproblems {
        Some(path) => {
            let mut count = 0u64;
            let stream = generate(&GenerationPlan::new(args.n, args.pre_rows))?.inspect(|_| count += 1);
            export_lines(stream, BufWriter::new(File::create(path)?))?;
            count
        }
        None => count_subproblems(args.n, args.pre_rows)?,
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    write!(out, "{}", log_generation(ms, count))?;
    writeln!(out, "{count}")?;
    Ok(count)
}

/// One cell of a benchmark sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: u32,
    pub pre_rows: u32,
    pub config: String,
    pub kernel: Kernel,
    pub workers: usize,
    pub subproblems: Option<u64>,
    pub total: Option<u64>,
    pub median_ms: Option<f64>,
    pub reps: usize,
    /// Q(n) / Q(n - 1), when both are in the sweep.
    pub growth_ratio: Option<f64>,
    pub status: String,
}

pub const BENCH_HEADER: &str = "n,pre_rows,config,kernel,workers,subproblems,total,median_ms,reps,growth_ratio,status";

impl BenchRow {
    pub fn csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.pre_rows,
            self.config,
            self.kernel,
            self.workers,
            opt(self.subproblems.map(|v| v.to_string())),
            opt(self.total.map(|v| v.to_string())),
            opt(self.median_ms.map(|v| format!("{v:.3}"))),
            self.reps,
            opt(self.growth_ratio.map(|v| format!("{v:.4}"))),
            self.status
        )
    }
}

pub fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    Some(if xs.len() % 2 == 1 { xs[mid] } else { (xs[mid - 1] + xs[mid]) / 2.0 })
}

/// Time every (n, R, config, kernel) cell; infeasible cells are reported,
/// not failed. Totals of the same n must agree across cells.
pub fn cmd_bench(args: &BenchArgs, out: Sink<'_>) -> Result<Vec<BenchRow>> {
    let plan = args.plan.to_plan()?;
    let configs: Vec<StackConfig> = args.configs.iter().map(|c| StackConfig::named(c)).collect::<Result<_>>()?;
    let reps = args.reps.max(1);
    let mut rows = Vec::new();
    for n in args.n.clone() {
        for r in args.pre_rows.clone() {
            for cfg in &configs {
                for &kernel in &args.kernels {
                    let mut row = BenchRow {
                        n,
                        pre_rows: r,
                        config: cfg.name.clone(),
                        kernel,
                        workers: plan.worker_count,
                        subproblems: None,
                        total: None,
                        median_ms: None,
                        reps,
                        growth_ratio: None,
                        status: "ok".into(),
                    };
                    let feasible = GenerationPlan::new(n, r)
                        .validate()
                        .and_then(|_| cfg.require(kernel.frames_needed(n, r)));
                    if let Err(e) = feasible {
                        row.status = match e {
                            Error::Depth { .. } => "infeasible-depth".into(),
                            _ => "infeasible-rows".into(),
                        };
                        rows.push(row);
                        continue;
                    }
                    let mut times = Vec::with_capacity(reps);
                    let mut total = None;
                    for _ in 0..reps {
                        let rep = crate::scheduler::execute(n, r, cfg, &plan, kernel)?;
                        if total.is_some_and(|t| t != rep.total.0) {
                            return Err(Error::Aggregate(format!("n={n} R={r}: repetitions disagree")));
                        }
                        total = Some(rep.total.0);
                        row.subproblems = Some(rep.subproblems);
                        times.push(rep.calc_ms);
                    }
                    row.total = total;
                    row.median_ms = median(times);
                    rows.push(row);
                }
            }
        }
    }

    let mut by_n: BTreeMap<u32, u64> = BTreeMap::new();
    for row in &rows {
        if let Some(t) = row.total {
            if let Some(&prev) = by_n.get(&row.n) {
                if prev != t {
                    return Err(Error::Aggregate(format!("n={}: cells disagree ({prev} vs {t})", row.n)));
                }
            }
            by_n.insert(row.n, t);
        }
    }
    for row in rows.iter_mut() {
        if let (Some(t), Some(&prev)) = (row.total, by_n.get(&(row.n.wrapping_sub(1)))) {
            if prev > 0 {
                row.growth_ratio = Some(t as f64 / prev as f64);
            }
        }
    }

    writeln!(out, "{BENCH_HEADER}")?;
    for row in &rows {
        writeln!(out, "{}", row.csv())?;
    }
    out.flush()?;
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct LayoutEntry {
    layout: String,
    width: u32,
    phasing: Phasing,
    max_degree: u32,
    max_transactions: u32,
}

#[derive(Debug, Serialize)]
struct LayoutSummary {
    geometry: BankGeometry,
    depth: u32,
    threads: u32,
    layouts: Vec<LayoutEntry>,
}

pub fn cmd_layout(args: &LayoutArgs, out: Sink<'_>) -> Result<()> {
    let geometry = BankGeometry { bank_count: args.banks, word_bytes: args.word_bytes, warp_size: args.warp_size };
    let mut layouts = vec![Layout::Interleaved];
    layouts.extend(args.stack_words.iter().map(|&w| Layout::Contiguous { stack_words: w }));

    let mut entries = Vec::new();
    for layout in &layouts {
        for width in [4, 16] {
            for phasing in [Phasing::Hardware, Phasing::FullWarp] {
                let r = analyze_layout(&geometry, layout, args.depth, args.threads, width, phasing)?;
                entries.push(LayoutEntry {
                    layout: r.layout,
                    width,
                    phasing,
                    max_degree: r.max_degree,
                    max_transactions: r.max_transactions,
                });
            }
        }
    }
    match args.format {
        LayoutFormat::Json => {
            let summary = LayoutSummary { geometry, depth: args.depth, threads: args.threads, layouts: entries };
            writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("serialisable"))?;
        }
        LayoutFormat::Text => {
            writeln!(out, "{:<18} {:>5} {:>9} {:>6} {:>6}", "layout", "width", "phasing", "degree", "trans")?;
            for e in &entries {
                let ph = match e.phasing {
                    Phasing::Hardware => "hardware",
                    Phasing::FullWarp => "full-warp",
                };
                writeln!(out, "{:<18} {:>5} {:>9} {:>6} {:>6}", e.layout, e.width, ph, e.max_degree, e.max_transactions)?;
            }
            for layout in &layouts {
                writeln!(out, "\n{} (byte offset | owning thread per bank)", layout.name())?;
                write!(out, "{}", occupancy_grid(&geometry, layout, args.depth, args.threads, args.grid_rows))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Parse `args` and run the chosen subcommand. Returns the process exit
/// code: 0 ok, 2 configuration error, 3 overflow, 4 checkpoint error.
pub fn main_with<I, T>(args: I, stop: Arc<AtomicBool>, out: Sink<'_>, err: Sink<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(cli.command, stop, out, &mut *err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn control_for(interrupt_after: Option<u64>, stop: Arc<AtomicBool>) -> RunControl {
    match interrupt_after {
        Some(k) => RunControl::with_budget(k),
        None => RunControl::new(),
    }
    .with_stop_flag(stop)
}

fn dispatch(command: Command, stop: Arc<AtomicBool>, out: Sink<'_>, err: Sink<'_>) -> Result<()> {
    let (report, format, checkpoint) = match command {
        Command::Solve(a) => {
            let cfg = RunConfig::from_args(&a)?;
            let control = control_for(a.interrupt_after, stop);
            let log: Sink<'_> = if cfg.format == Format::Log { &mut *out } else { &mut *err };
            (cmd_solve(&cfg, &control, log)?, cfg.format, cfg.checkpoint)
        }
        Command::Resume(a) => {
            let control = control_for(a.interrupt_after, stop);
            let log: Sink<'_> = if a.format == Format::Log { &mut *out } else { &mut *err };
            (cmd_resume(&a.checkpoint, a.checkpoint_interval, &control, log)?, a.format, Some(a.checkpoint))
        }
        Command::Subcount(a) => return cmd_subcount(&a, out).map(|_| ()),
        Command::Bench(a) => return cmd_bench(&a, out).map(|_| ()),
        Command::Layout(a) => return cmd_layout(&a, out),
    };
    if !report.completed {
        match checkpoint {
            Some(p) => writeln!(err, "interrupted; continue with `queens resume {}`", p.display())?,
            None => writeln!(err, "interrupted; no checkpoint was requested, progress is lost")?,
        }
        if format == Format::Log {
            return Ok(());
        }
    }
    emit_report(&report, format, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("queens").chain(args.iter().copied());
        let code = main_with(argv, Arc::new(AtomicBool::new(false)), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("12..15").unwrap(), 12..=15);
        assert_eq!(parse_range("4..=7").unwrap(), 4..=7);
        assert_eq!(parse_range("9").unwrap(), 9..=9);
        assert!(parse_range("7..4").is_err());
        assert!(parse_range("a..4").is_err());
    }

    #[test]
    fn small_boards_clamp_pre_rows() {
        for (n, r, eff) in [(2, 6, 1), (3, 3, 2), (8, 6, 6), (1, 6, 1)] {
            assert_eq!(RunConfig::new(n, r).effective_pre_rows(), eff);
        }
    }

    #[test]
    fn solve_log_json_csv() {
        let (code, out, _) = run_cli(&["solve", "--n", "8", "--pre-rows", "2", "--workers", "3"]);
        assert_eq!(code, 0);
        let last = out.lines().last().unwrap();
        assert_eq!(crate::report::parse_result_line(last).unwrap().1, 92);
        assert_eq!(out.lines().filter(|l| l.contains("start job")).count(), 3);

        let (code, out, err) = run_cli(&["solve", "--n", "9", "--format", "json", "--workers", "2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["total"], 352);
        assert!(err.contains("subproblems!"));

        let (code, out, _) = run_cli(&["solve", "--n", "6", "--pre-rows", "2", "--format", "csv", "--partition", "uniform", "--workers", "2"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_cli(&["solve", "--n", "33"]).0, 2);
        assert_eq!(run_cli(&["solve", "--n", "20", "--config", "config5", "--pre-rows", "2"]).0, 2);
        assert_eq!(run_cli(&["solve", "--n", "8", "--config", "config9"]).0, 2);
        assert_eq!(run_cli(&["solve", "--n", "8", "--workers", "2", "--weights", "0.5,0.3,0.2"]).0, 2);
        assert_eq!(run_cli(&["resume", "/nonexistent/queens.ckpt"]).0, 4);
        assert_eq!(run_cli(&["bogus"]).0, 2);
    }

    #[test]
    fn depth_error_names_a_fitting_config() {
        let (code, _, err) = run_cli(&["solve", "--n", "20", "--config", "config5", "--pre-rows", "2"]);
        assert_eq!(code, 2);
        assert!(err.contains("config2"), "{err}");
    }

    #[test]
    fn subcount_and_layout() {
        let (code, out, _) = run_cli(&["subcount", "10", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().last().unwrap().parse::<u64>().unwrap(), count_subproblems(10, 3).unwrap());

        let (code, out, _) = run_cli(&["layout"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let entries = v["layouts"].as_array().unwrap();
        let degree = |layout: &str, width: u64| {
            entries
                .iter()
                .find(|e| e["layout"] == layout && e["width"] == width && e["phasing"] == "hardware")
                .unwrap()["max_degree"]
                .clone()
        };
        assert_eq!(degree("interleaved", 4), 1);
        assert_eq!(degree("contiguous(96)", 4), 32);
        let (code, out, _) = run_cli(&["layout", "--format", "text"]);
        assert_eq!(code, 0);
        assert!(out.contains("interleaved"));
    }

    #[test]
    fn bench_marks_infeasible_cells() {
        let (code, out, _) = run_cli(&["bench", "--n", "8..9", "--pre-rows", "2..3", "--configs", "config2,words:8", "--reps", "1", "--workers", "2"]);
        assert_eq!(code, 0, "{out}");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], BENCH_HEADER);
        assert_eq!(lines.len(), 1 + 2 * 2 * 2);
        assert!(lines.iter().any(|l| l.ends_with("infeasible-depth")));
        let row9 = lines.iter().find(|l| l.starts_with("9,2,config2")).unwrap();
        assert!(row9.contains(",352,"), "{row9}");
        assert!(row9.contains(&format!("{:.4}", 352.0 / 92.0)), "{row9}");
    }

    #[test]
    fn interrupt_then_resume() {
        let dir = tempfile::tempdir().unwrap();
        let ckpt = dir.path().join("run.ckpt");
        let ck = ckpt.to_str().unwrap();
        let (code, out, err) = run_cli(&["solve", "--n", "10", "--pre-rows", "3", "--workers", "3", "--checkpoint", ck, "--checkpoint-interval", "5", "--interrupt-after", "17"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("interrupted"));
        assert!(err.contains("queens resume"));
        let cp = Checkpoint::load(&ckpt).unwrap();
        assert_eq!(cp.lanes.iter().map(|l| l.processed).sum::<u64>(), 17);
        let (code, out, _) = run_cli(&["resume", ck]);
        assert_eq!(code, 0);
        assert_eq!(crate::report::parse_result_line(out.lines().last().unwrap()).unwrap().1, 724);
        assert!(Checkpoint::load(&ckpt).unwrap().is_complete());
        // The same parameters through `solve --resume` finish immediately.
        let (code, out, _) = run_cli(&["solve", "--n", "10", "--pre-rows", "3", "--checkpoint", ck, "--resume", "--workers", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("result 724"));
        let (code, _, _) = run_cli(&["solve", "--n", "11", "--pre-rows", "3", "--checkpoint", ck, "--resume"]);
        assert_eq!(code, 4);
    }
}
