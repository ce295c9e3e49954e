//! Checkpoint files for long runs.
//!
//! Plain text, one `key value` pair per line, one `worker` line per lane and
//! a trailing SHA-256 over every preceding byte:
//!
//! ```text
//! queens-checkpoint 1
//! identity 6c1f...
//! n 14
//! pre_rows 6
//! kernel lastrow
//! order 1
//! config config2
//! strategy weighted
//! weights 0.2,0.15
//! subproblems 8372
//! elapsed_ms 1234.500
//! worker 0 0 1204 1675 180344 1204 612.250
//! worker 1 1675 2900 8372 90112 1225 611.010
//! checksum 9a0b...
//! ```
//!
//! Worker fields: index, range start, high-water index, range end, partial
//! sum, processed count, elapsed milliseconds.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scheduler::{Lane, PartitionPlan, Strategy};
use crate::solver::{Kernel, SolutionCount, StackConfig};
use crate::subproblems::GENERATION_ORDER_VERSION;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "queens-checkpoint";

/// Flush after this many solved subproblems unless told otherwise.
pub const DEFAULT_INTERVAL: u64 = 1_000_000;

/// Hash of everything that fixes the meaning of a subproblem index and its count.
pub fn run_identity(n: u32, pre_rows: u32, kernel: Kernel) -> String {
    let mut h = Sha256::new();
    h.update(format!("n={n};pre_rows={pre_rows};kernel={kernel};order={GENERATION_ORDER_VERSION}"));
    format!("{:x}", h.finalize())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub version: u32,
    pub identity: String,
    pub n: u32,
    pub pre_rows: u32,
    pub kernel: Kernel,
    pub config: StackConfig,
    pub plan: PartitionPlan,
    pub subproblems: u64,
    pub elapsed: Duration,
    pub lanes: Vec<Lane>,
}

impl Checkpoint {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: u32,
        pre_rows: u32,
        kernel: Kernel,
        config: &StackConfig,
        plan: &PartitionPlan,
        subproblems: u64,
        elapsed: Duration,
        lanes: Vec<Lane>,
    ) -> Result<Checkpoint> {
        if plan.strategy == Strategy::Stealing {
            return Err(Error::Checkpoint("checkpointing needs a uniform or weighted partition".into()));
        }
        Ok(Checkpoint {
            version: FORMAT_VERSION,
            identity: run_identity(n, pre_rows, kernel),
            n,
            pre_rows,
            kernel,
            config: config.clone(),
            plan: plan.clone(),
            subproblems,
            elapsed,
            lanes,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.lanes.iter().all(Lane::is_done)
    }

    pub fn total(&self) -> Result<SolutionCount> {
        self.lanes.iter().try_fold(SolutionCount::ZERO, |acc, l| acc.checked_add(l.partial))
    }

    /// Refuse to continue `self` as a run of (n, pre_rows, kernel).
    pub fn ensure_matches(&self, n: u32, pre_rows: u32, kernel: Kernel) -> Result<()> {
        if self.identity != run_identity(n, pre_rows, kernel) {
            return Err(Error::Checkpoint(format!(
                "checkpoint is for n={} pre_rows={} kernel={}, not n={n} pre_rows={pre_rows} kernel={kernel}",
                self.n, self.pre_rows, self.kernel
            )));
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut body = String::new();
        body.push_str(&format!("{MAGIC} {}\n", self.version));
        body.push_str(&format!("identity {}\n", self.identity));
        body.push_str(&format!("n {}\n", self.n));
        body.push_str(&format!("pre_rows {}\n", self.pre_rows));
        body.push_str(&format!("kernel {}\n", self.kernel));
        body.push_str(&format!("order {GENERATION_ORDER_VERSION}\n"));
        body.push_str(&format!("config {}\n", self.config.name));
        body.push_str(&format!("strategy {}\n", self.plan.strategy));
        if let Some(w) = &self.plan.weights {
            let w: Vec<String> = w.iter().map(f64::to_string).collect();
            body.push_str(&format!("weights {}\n", w.join(",")));
        }
        body.push_str(&format!("subproblems {}\n", self.subproblems));
        body.push_str(&format!("elapsed_ms {:.3}\n", self.elapsed.as_secs_f64() * 1e3));
        for l in &self.lanes {
            body.push_str(&format!(
                "worker {} {} {} {} {} {} {:.3}\n",
                l.worker,
                l.start,
                l.next,
                l.end,
                l.partial,
                l.processed,
                l.elapsed.as_secs_f64() * 1e3
            ));
        }
        let sum = Sha256::digest(body.as_bytes());
        body.push_str(&format!("checksum {sum:x}\n"));
        body
    }

    pub fn parse(text: &str) -> Result<Checkpoint> {
        let bad = |what: &str| Error::Checkpoint(format!("corrupt checkpoint: {what}"));
        let body_end = text.rfind("checksum ").ok_or_else(|| bad("missing checksum"))?;
        let (body, tail) = text.split_at(body_end);
        let stored = tail.trim_end().strip_prefix("checksum ").ok_or_else(|| bad("missing checksum"))?;
        if format!("{:x}", Sha256::digest(body.as_bytes())) != stored {
            return Err(bad("checksum mismatch"));
        }

        let mut lines = body.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let version: u32 = header
            .strip_prefix(MAGIC)
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| bad("not a checkpoint file"))?;
        if version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported checkpoint version {version}")));
        }

        let mut fields = std::collections::HashMap::new();
        let mut lanes = Vec::new();
        for line in lines {
            let (key, value) = line.split_once(' ').ok_or_else(|| bad(line))?;
            if key == "worker" {
                let f: Vec<&str> = value.split_whitespace().collect();
                if f.len() != 7 {
                    return Err(bad(line));
                }
                let num = |i: usize| f[i].parse::<u64>().map_err(|_| bad(line));
                let ms: f64 = f[6].parse().map_err(|_| bad(line))?;
                lanes.push(Lane {
                    worker: num(0)? as usize,
                    start: num(1)?,
                    next: num(2)?,
                    end: num(3)?,
                    partial: SolutionCount(num(4)?),
                    processed: num(5)?,
                    chunks: 0,
                    elapsed: Duration::from_secs_f64(ms.max(0.0) / 1e3),
                });
            } else {
                fields.insert(key, value);
            }
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(&format!("missing `{k}`")));
        let int = |k: &str| get(k).and_then(|v| v.parse::<u64>().map_err(|_| bad(k)));

        let order = int("order")?;
        if order != u64::from(GENERATION_ORDER_VERSION) {
            return Err(Error::Checkpoint(format!("checkpoint uses generation order {order}")));
        }
        let kernel: Kernel = get("kernel")?.parse().map_err(|_| bad("kernel"))?;
        let strategy: Strategy = get("strategy")?.parse().map_err(|_| bad("strategy"))?;
        let weights = match fields.get("weights") {
            Some(w) => Some(
                w.split(',').map(|x| x.parse::<f64>().map_err(|_| bad("weights"))).collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        let plan = PartitionPlan {
            strategy,
            worker_count: lanes.len(),
            weights,
            chunk_size: crate::scheduler::DEFAULT_CHUNK_SIZE,
        };
        let ms: f64 = get("elapsed_ms")?.parse().map_err(|_| bad("elapsed_ms"))?;
        let cp = Checkpoint {
            version,
            identity: get("identity")?.to_string(),
            n: int("n")? as u32,
            pre_rows: int("pre_rows")? as u32,
            kernel,
            config: StackConfig::named(get("config")?).map_err(|_| bad("config"))?,
            plan,
            subproblems: int("subproblems")?,
            elapsed: Duration::from_secs_f64(ms.max(0.0) / 1e3),
            lanes,
        };
        if cp.identity != run_identity(cp.n, cp.pre_rows, cp.kernel) {
            return Err(Error::Checkpoint("identity does not match the recorded run parameters".into()));
        }
        Ok(cp)
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Checkpoint(format!("cannot read {}: {e}", path.display())))?;
        Checkpoint::parse(&text)
    }

    /// Replace `path` atomically.
    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = tmp_path(path);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(self.render().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Serialises flushes to one file and enforces monotone progress.
#[derive(Debug)]
pub struct CheckpointWriter {
    path: PathBuf,
    last: Option<Vec<Lane>>,
    pub flushes: u64,
}

impl CheckpointWriter {
    pub fn new(path: impl Into<PathBuf>, previous: Option<Vec<Lane>>) -> CheckpointWriter {
        CheckpointWriter { path: path.into(), last: previous, flushes: 0 }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn flush(&mut self, cp: &Checkpoint) -> Result<()> {
        if let Some(prev) = &self.last {
            let regressed = prev.len() != cp.lanes.len()
                || prev.iter().zip(&cp.lanes).any(|(a, b)| b.next < a.next || b.partial < a.partial);
            if regressed {
                return Err(Error::Checkpoint("progress went backwards between flushes".into()));
            }
        }
        cp.store(&self.path)?;
        self.last = Some(cp.lanes.clone());
        self.flushes += 1;
        Ok(())
    }
}
