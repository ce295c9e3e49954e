//! Work decomposition by pre-placing the first rows.
//!
//! Mirror symmetry means only the left half of the first row has to be
//! expanded, each root counted twice. On odd boards the centre column of the
//! first row is handled separately: its second-row queens are mirrored the
//! same way, so only the left half of row two is expanded (the three centre
//! squares of that row are attacked). With a single pre-placed row the
//! centre root is emitted whole with weight 1.
//!
//! Emission order is depth-first with ascending columns, i.e. lexicographic
//! in the placement columns. Indices into this order are stable and are what
//! partition plans and checkpoints refer to.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{BitMask, MAX_N};
use crate::solver::{SolutionCount, Subproblem};

/// Largest accepted pre-placement depth.
pub const MAX_PRE_ROWS: u32 = 8;

/// Bumped whenever emission order changes; part of checkpoint identity.
pub const GENERATION_ORDER_VERSION: u32 = 1;

/// Subproblem count for n = 27 at seven pre-placed rows, as logged by the
/// original 27-queens run.
pub const REFERENCE_SUBPROBLEMS_27_7: u64 = 453_688_251;

/// Q(27) as reported by the original 27-queens run. Not recomputed here.
pub const REFERENCE_Q27: u64 = 234_907_967_154_122_528;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    /// Half-board fold plus the odd-centre second-row fold.
    #[default]
    Folded,
    /// Every first-row column, weight 1. Reference only.
    Unfolded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationPlan {
    pub n: u32,
    pub pre_rows: u32,
    pub symmetry: Symmetry,
    pub expected_total_subproblems: Option<u64>,
}

impl GenerationPlan {
    pub fn new(n: u32, pre_rows: u32) -> GenerationPlan {
        GenerationPlan { n, pre_rows, symmetry: Symmetry::Folded, expected_total_subproblems: None }
    }

    pub fn unfolded(mut self) -> GenerationPlan {
        self.symmetry = Symmetry::Unfolded;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_N).contains(&self.n) {
            return Err(Error::BoardSize(self.n));
        }
        if self.pre_rows < 1 || self.pre_rows >= self.n || self.pre_rows > MAX_PRE_ROWS {
            return Err(Error::PreRows { n: self.n, pre_rows: self.pre_rows });
        }
        Ok(())
    }

    /// Subtree roots the depth-first expansion starts from, in order.
    fn seeds(&self) -> Vec<Subproblem> {
        let n = self.n;
        let root = Subproblem::root();
        match self.symmetry {
            Symmetry::Unfolded => BitMask::board(n).singles().map(|p| root.place(p)).collect(),
            Symmetry::Folded => {
                let half = n / 2;
                let mut seeds: Vec<Subproblem> = (0..half)
                    .map(|c| root.place(BitMask(1 << c)).with_multiplier(2))
                    .collect();
                if n % 2 == 1 {
                    let centre = (n - 1) / 2;
                    let first = root.place(BitMask(1 << centre));
                    if self.pre_rows == 1 {
                        seeds.push(first.with_multiplier(1));
                    } else {
                        // columns 0 ..= centre - 2
                        let left_half = BitMask(((1u64 << centre.saturating_sub(1)) - 1) as u32);
                        seeds.extend(
                            (first.valid(n) & left_half).singles().map(|p| first.place(p).with_multiplier(2)),
                        );
                    }
                }
                seeds
            }
        }
    }
}

/// Streaming depth-first emission of a plan's subproblems.
#[derive(Debug)]
pub struct Subproblems {
    n: u32,
    pre_rows: u32,
    seeds: std::vec::IntoIter<Subproblem>,
    stack: Vec<(Subproblem, BitMask)>,
}

/// Start emitting the subproblems of `plan`.
pub fn generate(plan: &GenerationPlan) -> Result<Subproblems> {
    plan.validate()?;
    Ok(Subproblems {
        n: plan.n,
        pre_rows: plan.pre_rows,
        seeds: plan.seeds().into_iter(),
        stack: Vec::with_capacity(plan.pre_rows as usize),
    })
}

impl Iterator for Subproblems {
    type Item = Subproblem;

    fn next(&mut self) -> Option<Subproblem> {
        loop {
            let Some((node, untried)) = self.stack.last_mut() else {
                let seed = self.seeds.next()?;
                if seed.placed_rows == self.pre_rows {
                    return Some(seed);
                }
                self.stack.push((seed, seed.valid(self.n)));
                continue;
            };
            if untried.is_empty() {
                self.stack.pop();
                continue;
            }
            let p = crate::mask::lowest_set_bit(*untried);
            *untried = BitMask(untried.0 ^ p.0);
            let child = node.place(p);
            if child.placed_rows == self.pre_rows {
                return Some(child);
            }
            self.stack.push((child, child.valid(self.n)));
        }
    }
}

/// Number of subproblems `generate` would emit, without emitting them.
pub fn count_subproblems(n: u32, pre_rows: u32) -> Result<u64> {
    count_plan(&GenerationPlan::new(n, pre_rows))
}

pub fn count_plan(plan: &GenerationPlan) -> Result<u64> {
    plan.validate()?;
    fn below(s: &Subproblem, n: u32, target: u32) -> u64 {
        let valid = s.valid(n);
        if s.placed_rows + 1 == target {
            return u64::from(valid.count());
        }
        valid.singles().map(|p| below(&s.place(p), n, target)).sum()
    }
    Ok(plan
        .seeds()
        .iter()
        .map(|s| if s.placed_rows == plan.pre_rows { 1 } else { below(s, plan.n, plan.pre_rows) })
        .sum())
}

/// A materialised generation result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubproblemBatch {
    pub n: u32,
    pub pre_rows: u32,
    pub items: Vec<Subproblem>,
}

impl SubproblemBatch {
    pub fn generate(plan: &GenerationPlan) -> Result<SubproblemBatch> {
        let items: Vec<Subproblem> = generate(plan)?.collect();
        if let Some(expected) = plan.expected_total_subproblems {
            if expected != items.len() as u64 {
                return Err(Error::Aggregate(format!(
                    "generated {} subproblems, expected {expected}",
                    items.len()
                )));
            }
        }
        Ok(SubproblemBatch { n: plan.n, pre_rows: plan.pre_rows, items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Write one line per subproblem: `index cur left right placed_rows multiplier`,
    /// masks in lowercase hex.
    pub fn export<W: Write>(&self, out: W) -> io::Result<()> {
        export_lines(self.items.iter().copied(), out)
    }
}

pub fn export_lines<W: Write>(items: impl IntoIterator<Item = Subproblem>, mut out: W) -> io::Result<()> {
    for (i, s) in items.into_iter().enumerate() {
        writeln!(out, "{i} {:x} {:x} {:x} {} {}", s.cur, s.left, s.right, s.placed_rows, s.multiplier)?;
    }
    out.flush()
}

/// Parse the export format back. Indices must run 0, 1, 2, ...
pub fn import_lines<R: BufRead>(input: R) -> Result<Vec<Subproblem>> {
    let mut out = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Aggregate(format!("malformed subproblem line {}: `{line}`", lineno + 1));
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(bad());
        }
        let index: usize = f[0].parse().map_err(|_| bad())?;
        if index != out.len() {
            return Err(bad());
        }
        let hex = |s: &str| u32::from_str_radix(s, 16).map(BitMask).map_err(|_| bad());
        out.push(Subproblem {
            cur: hex(f[1])?,
            left: hex(f[2])?,
            right: hex(f[3])?,
            placed_rows: f[4].parse().map_err(|_| bad())?,
            multiplier: f[5].parse().map_err(|_| bad())?,
        });
    }
    Ok(out)
}

/// Multiplier-weighted sum with no bookkeeping.
pub fn weighted_sum<'a>(results: impl IntoIterator<Item = (&'a Subproblem, SolutionCount)>) -> Result<SolutionCount> {
    results.into_iter().try_fold(SolutionCount::ZERO, |acc, (s, c)| {
        acc.checked_add(c.checked_mul(u64::from(s.multiplier))?)
    })
}

/// Combine per-subproblem counts into the board total, checking that every
/// subproblem of `batch` is reported exactly once.
pub fn aggregate(batch: &SubproblemBatch, results: &[(Subproblem, SolutionCount)]) -> Result<SolutionCount> {
    let expected: HashSet<&Subproblem> = batch.items.iter().collect();
    let mut seen = HashSet::with_capacity(results.len());
    for (s, _) in results {
        if !expected.contains(s) {
            return Err(Error::Aggregate(format!("result for unknown subproblem {s:?}")));
        }
        if !seen.insert(s) {
            return Err(Error::Aggregate(format!("duplicate result for subproblem {s:?}")));
        }
    }
    if seen.len() != expected.len() {
        return Err(Error::Aggregate(format!(
            "{} of {} subproblems have no result",
            expected.len() - seen.len(),
            expected.len()
        )));
    }
    weighted_sum(results.iter().map(|(s, c)| (s, *c)))
}
