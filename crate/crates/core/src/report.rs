//! Run reports and their JSON / CSV / log renderings.
//!
//! Log lines follow the layout of long-running device logs:
//!
//! ```text
//! [2025-01-01 10:00:00.000] Use 12.34ms to generate 8372 subproblems!
//! [2025-01-01 10:00:00.001] worker [0] start job, with 1675(0.20) subproblems.
//! [2025-01-01 10:00:00.101] worker [0] finish job.
//! [2025-01-01 10:00:00.102] cpu 14 queens result 365596, calc time: [101.00ms]
//! ```
//!
//! The fraction printed on a start line is the realised share of the
//! subproblem range, not the configured weight.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::scheduler::PartitionPlan;
use crate::solver::{Kernel, SolutionCount, StackConfig};

/// Backend tag printed on the result line.
pub const BACKEND: &str = "cpu";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkerReport {
    pub worker: usize,
    /// Assigned index range, static plans only.
    pub range: Option<(u64, u64)>,
    pub processed: u64,
    /// Chunks claimed, stealing only.
    pub chunks: u64,
    pub partial: SolutionCount,
    pub elapsed_ms: f64,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: u32,
    pub pre_rows: u32,
    pub config: StackConfig,
    pub kernel: Kernel,
    pub plan: PartitionPlan,
    pub subproblems: u64,
    pub generation_ms: f64,
    pub calc_ms: f64,
    pub total: SolutionCount,
    pub workers: Vec<WorkerReport>,
    /// Slowest over fastest worker time; `None` with fewer than two timed workers.
    pub load_skew: Option<f64>,
    pub completed: bool,
}

impl SolveReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: u32,
        pre_rows: u32,
        config: &StackConfig,
        kernel: Kernel,
        plan: &PartitionPlan,
        subproblems: u64,
        generation: Duration,
        calc: Duration,
        total: SolutionCount,
        workers: Vec<WorkerReport>,
        completed: bool,
    ) -> SolveReport {
        let times: Vec<f64> = workers.iter().filter(|w| w.processed > 0).map(|w| w.elapsed_ms).collect();
        let load_skew = match (times.iter().cloned().reduce(f64::max), times.iter().cloned().reduce(f64::min)) {
            (Some(max), Some(min)) if times.len() > 1 && min > 0.0 => Some(max / min),
            _ => None,
        };
        SolveReport {
            n,
            pre_rows,
            config: config.clone(),
            kernel,
            plan: plan.clone(),
            subproblems,
            generation_ms: generation.as_secs_f64() * 1e3,
            calc_ms: calc.as_secs_f64() * 1e3,
            total,
            workers,
            load_skew,
            completed,
        }
    }

    pub fn trivial(
        n: u32,
        pre_rows: u32,
        config: &StackConfig,
        kernel: Kernel,
        plan: &PartitionPlan,
        total: SolutionCount,
    ) -> SolveReport {
        SolveReport::new(n, pre_rows, config, kernel, plan, 0, Duration::ZERO, Duration::ZERO, total, vec![], true)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// One row per worker followed by a `total` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,pre_rows,config,kernel,strategy,worker,range_start,range_end,processed,partial,elapsed_ms,fraction\n");
        let head = format!("{},{},{},{},{}", self.n, self.pre_rows, self.config.name, self.kernel, self.plan.strategy);
        for w in &self.workers {
            let (s, e) = w.range.map_or((String::new(), String::new()), |(s, e)| (s.to_string(), e.to_string()));
            let _ = writeln!(
                out,
                "{head},{},{s},{e},{},{},{:.3},{:.4}",
                w.worker, w.processed, w.partial, w.elapsed_ms, w.fraction
            );
        }
        let _ = writeln!(out, "{head},total,0,{},{},{},{:.3},1.0000", self.subproblems, self.subproblems, self.total, self.calc_ms);
        out
    }

    /// Full log transcript, stamped with the current time.
    pub fn to_log(&self) -> String {
        let mut out = String::new();
        out.push_str(&log_generation(self.generation_ms, self.subproblems));
        for w in &self.workers {
            out.push_str(&log_start(w.worker, w.range.map_or(w.processed, |(s, e)| e - s), w.fraction));
        }
        for w in &self.workers {
            out.push_str(&log_finish(w.worker));
        }
        out.push_str(&log_result(self.n, self.total, self.calc_ms));
        out
    }
}

/// Local time in `YYYY-MM-DD hh:mm:ss.mmm`.
pub fn timestamp() -> String {
    chrono::Local::now().format("%Y-%m-%d %H:%M:%S%.3f").to_string()
}

pub fn log_generation(ms: f64, count: u64) -> String {
    format!("[{}] Use {ms:.2}ms to generate {count} subproblems!\n", timestamp())
}

pub fn log_start(worker: usize, count: u64, fraction: f64) -> String {
    format!("[{}] worker [{worker}] start job, with {count}({fraction:.2}) subproblems.\n", timestamp())
}

pub fn log_finish(worker: usize) -> String {
    format!("[{}] worker [{worker}] finish job.\n", timestamp())
}

pub fn log_result(n: u32, total: SolutionCount, ms: f64) -> String {
    format!("[{}] {BACKEND} {n} queens result {total}, calc time: [{ms:.2}ms]\n", timestamp())
}

/// Extract `(n, total, ms)` from a result line.
pub fn parse_result_line(line: &str) -> Option<(u32, u64, f64)> {
    let rest = line.trim().split_once("] ")?.1;
    let mut words = rest.split_whitespace();
    let _backend = words.next()?;
    let n = words.next()?.parse().ok()?;
    if words.next()? != "queens" || words.next()? != "result" {
        return None;
    }
    let total = words.next()?.strip_suffix(',')?.parse().ok()?;
    if words.next()? != "calc" || words.next()? != "time:" {
        return None;
    }
    let ms = words.next()?.strip_prefix('[')?.strip_suffix("ms]")?.parse().ok()?;
    Some((n, total, ms))
}
