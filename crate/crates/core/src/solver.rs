//! Counting kernels.
//!
//! Three routes count the completions of a [`Subproblem`]:
//!
//! - [`count_recursive`]: plain recursion, kept as the reference.
//! - [`count_iterative`]: depth-first search over a bounded explicit stack
//!   of four-word frames. No recursion, fixed memory.
//! - [`count_iterative_lastrow`]: same search, but the frame for the final
//!   row is never pushed. The row's free columns are counted directly,
//!   which saves one level of stack.
//!
//! None of them apply the subproblem's symmetry multiplier.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::{apply_placement, lowest_set_bit, valid_positions, BitMask, MAX_N};

/// Hard ceiling on frames any kernel stack can hold.
pub const MAX_FRAMES: usize = MAX_N as usize;

/// A 64-bit solution count with checked accumulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SolutionCount(pub u64);

impl SolutionCount {
    pub const ZERO: SolutionCount = SolutionCount(0);

    pub fn checked_add(self, rhs: SolutionCount) -> Result<SolutionCount> {
        self.0.checked_add(rhs.0).map(SolutionCount).ok_or(Error::Overflow)
    }

    pub fn checked_mul(self, factor: u64) -> Result<SolutionCount> {
        self.0.checked_mul(factor).map(SolutionCount).ok_or(Error::Overflow)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for SolutionCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Independent subtree root: the state after the first `placed_rows` rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subproblem {
    pub cur: BitMask,
    pub left: BitMask,
    pub right: BitMask,
    pub placed_rows: u32,
    /// Symmetry weight applied on aggregation (1 or 2).
    pub multiplier: u32,
}

impl Subproblem {
    /// The empty board.
    pub const fn root() -> Subproblem {
        Subproblem {
            cur: BitMask::EMPTY,
            left: BitMask::EMPTY,
            right: BitMask::EMPTY,
            placed_rows: 0,
            multiplier: 1,
        }
    }

    /// Child state after placing a queen at `p` in the next row.
    pub fn place(&self, p: BitMask) -> Subproblem {
        let (cur, left, right) = apply_placement(self.cur, self.left, self.right, p);
        Subproblem { cur, left, right, placed_rows: self.placed_rows + 1, multiplier: self.multiplier }
    }

    pub fn with_multiplier(mut self, multiplier: u32) -> Subproblem {
        self.multiplier = multiplier;
        self
    }

    /// Free columns of the next row.
    pub fn valid(&self, n: u32) -> BitMask {
        valid_positions(self.cur, self.left, self.right, n)
    }

    fn check(&self, n: u32) -> Result<()> {
        if !(1..=MAX_N).contains(&n) {
            return Err(Error::BoardSize(n));
        }
        debug_assert_eq!(self.cur.count(), self.placed_rows);
        debug_assert!(self.cur.fits(n) && self.placed_rows <= n);
        Ok(())
    }
}

/// One stack entry: the search state of a row plus its untried columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[repr(C)]
pub struct SearchFrame {
    pub cur: BitMask,
    pub left: BitMask,
    pub right: BitMask,
    pub valid_pos: BitMask,
}

/// Per-searcher stack budget.
///
/// The five built-in configs size a stack so that a block of searchers fits
/// in 48 KiB of scratchpad; only the depth matters on a CPU, the block size
/// is kept as a reference figure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackConfig {
    pub name: String,
    /// Threads per block that fit the static scratchpad budget.
    pub block_size: u32,
    /// 32-bit words per searcher stack.
    pub stack_words: u32,
    /// Rows assumed pre-placed when quoting `max_n`.
    pub pre_rows_reference: u32,
    /// Whether `max_n` assumes the last-row kernel.
    pub last_row_opt: bool,
}

const BUILTIN: [(&str, u32, u32); 5] = [
    ("config1", 128, 96),
    ("config2", 160, 76),
    ("config3", 192, 64),
    ("config4", 256, 48),
    ("config5", 512, 24),
];

/// Reference pre-placement used when quoting the maximum board of a config.
pub const REFERENCE_PRE_ROWS: u32 = 6;

impl StackConfig {
    /// The built-in configs, largest stack first.
    pub fn builtins() -> Vec<StackConfig> {
        BUILTIN
            .iter()
            .map(|&(name, block, words)| StackConfig {
                name: name.to_string(),
                block_size: block,
                stack_words: words,
                pre_rows_reference: REFERENCE_PRE_ROWS,
                last_row_opt: false,
            })
            .collect()
    }

    pub fn named(name: &str) -> Result<StackConfig> {
        if let Some(words) = name.strip_prefix("words:") {
            let words: u32 = words.parse().map_err(|_| Error::UnknownConfig(name.to_string()))?;
            return StackConfig::custom(words);
        }
        StackConfig::builtins()
            .into_iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownConfig(name.to_string()))
    }

    pub fn custom(stack_words: u32) -> Result<StackConfig> {
        if stack_words < 4 || stack_words as usize > 4 * MAX_FRAMES {
            return Err(Error::UnknownConfig(format!("words:{stack_words}")));
        }
        Ok(StackConfig {
            name: format!("words:{stack_words}"),
            block_size: (48 * 1024) / (stack_words * 4),
            stack_words,
            pre_rows_reference: REFERENCE_PRE_ROWS,
            last_row_opt: false,
        })
    }

    pub fn with_last_row_opt(mut self, on: bool) -> StackConfig {
        self.last_row_opt = on;
        self
    }

    /// Frames the stack can hold.
    pub fn max_depth(&self) -> u32 {
        self.stack_words / 4
    }

    /// Largest board solvable at `pre_rows_reference` pre-placed rows.
    pub fn max_n(&self) -> u32 {
        self.max_depth() + self.pre_rows_reference + u32::from(self.last_row_opt)
    }

    /// Fail unless `frames` fit in this stack.
    pub fn require(&self, frames: u32) -> Result<()> {
        if frames <= self.max_depth() {
            return Ok(());
        }
        let hint = match StackConfig::smallest_fitting(frames) {
            Some(c) => format!("; smallest sufficient config is {}", c.name),
            None => "; no built-in config is deep enough, pre-place more rows".to_string(),
        };
        Err(Error::Depth {
            config: self.name.clone(),
            required: frames,
            available: self.max_depth(),
            hint,
        })
    }

    /// The built-in config with the shallowest stack that still holds `frames`.
    pub fn smallest_fitting(frames: u32) -> Option<StackConfig> {
        StackConfig::builtins().into_iter().rev().find(|c| c.max_depth() >= frames)
    }
}

impl Default for StackConfig {
    fn default() -> StackConfig {
        StackConfig::named("config2").expect("built-in")
    }
}

/// Which counting kernel a run uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Iterative,
    #[default]
    LastRow,
}

impl Kernel {
    /// Frames needed to finish a subproblem with `placed_rows` rows filled.
    pub fn frames_needed(self, n: u32, placed_rows: u32) -> u32 {
        let open = n.saturating_sub(placed_rows);
        match self {
            Kernel::Iterative => open,
            Kernel::LastRow => open.saturating_sub(1),
        }
    }

    pub fn count(self, n: u32, sub: &Subproblem, cfg: &StackConfig) -> Result<KernelOutcome> {
        match self {
            Kernel::Iterative => run_iterative(n, sub, cfg),
            Kernel::LastRow => run_lastrow(n, sub, cfg),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kernel::Iterative => "iterative",
            Kernel::LastRow => "lastrow",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kernel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Kernel, String> {
        match s {
            "iterative" => Ok(Kernel::Iterative),
            "lastrow" => Ok(Kernel::LastRow),
            other => Err(format!("unknown kernel `{other}` (expected iterative|lastrow)")),
        }
    }
}

/// Count plus instrumentation from one kernel call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KernelOutcome {
    pub count: SolutionCount,
    /// Maximum number of frames resident on the stack at once.
    pub high_water: u32,
}

/// Reference count by direct recursion.
pub fn count_recursive(n: u32, sub: &Subproblem) -> Result<SolutionCount> {
    sub.check(n)?;
    fn go(cur: BitMask, left: BitMask, right: BitMask, last: BitMask, sum: &mut u64) -> Result<()> {
        if cur == last {
            *sum = sum.checked_add(1).ok_or(Error::Overflow)?;
            return Ok(());
        }
        let mut valid = last & !(cur | left | right);
        while !valid.is_empty() {
            let p = lowest_set_bit(valid);
            valid = BitMask(valid.0 - p.0);
            let (c, l, r) = apply_placement(cur, left, right, p);
            go(c, l, r, last, sum)?;
        }
        Ok(())
    }
    let mut sum = 0;
    go(sub.cur, sub.left, sub.right, BitMask::board(n), &mut sum)?;
    Ok(SolutionCount(sum))
}

/// Count completions with the explicit-stack search.
pub fn count_iterative(n: u32, sub: &Subproblem, cfg: &StackConfig) -> Result<SolutionCount> {
    run_iterative(n, sub, cfg).map(|o| o.count)
}

/// Count completions with the explicit-stack search, final row counted by
/// popcount instead of a pushed frame.
pub fn count_iterative_lastrow(n: u32, sub: &Subproblem, cfg: &StackConfig) -> Result<SolutionCount> {
    run_lastrow(n, sub, cfg).map(|o| o.count)
}

#[inline(always)]
fn bump(sum: u64, by: u64) -> Result<u64> {
    sum.checked_add(by).ok_or(Error::Overflow)
}

/// [`count_iterative`] with the stack high-water mark.
pub fn run_iterative(n: u32, sub: &Subproblem, cfg: &StackConfig) -> Result<KernelOutcome> {
    sub.check(n)?;
    cfg.require(Kernel::Iterative.frames_needed(n, sub.placed_rows))?;
    let last = BitMask::board(n);
    let root_valid = valid_positions(sub.cur, sub.left, sub.right, n);
    if root_valid.is_empty() {
        let count = u64::from(sub.cur == last);
        return Ok(KernelOutcome { count: SolutionCount(count), high_water: 0 });
    }

    let mut stack = [SearchFrame::default(); MAX_FRAMES];
    let mut top = 0usize;
    let mut high_water = 1usize;
    let mut sum = 0u64;
    stack[top] = SearchFrame { cur: sub.cur, left: sub.left, right: sub.right, valid_pos: root_valid };
    top += 1;

    // An exhausted frame is popped when it next reaches the top, so a child
    // is always pushed above its parent's frame.
    while top != 0 {
        let SearchFrame { cur, left, right, valid_pos } = stack[top - 1];
        if valid_pos.is_empty() {
            top -= 1;
            continue;
        }
        let p = lowest_set_bit(valid_pos);
        stack[top - 1].valid_pos = BitMask(valid_pos.0 - p.0);

        let (cur, left, right) = apply_placement(cur, left, right, p);
        if cur == last {
            sum = bump(sum, 1)?;
            continue;
        }
        let valid_pos = valid_positions(cur, left, right, n);
        if valid_pos.is_empty() {
            continue;
        }
        stack[top] = SearchFrame { cur, left, right, valid_pos };
        top += 1;
        high_water = high_water.max(top);
    }
    Ok(KernelOutcome { count: SolutionCount(sum), high_water: high_water as u32 })
}

/// [`count_iterative_lastrow`] with the stack high-water mark.
pub fn run_lastrow(n: u32, sub: &Subproblem, cfg: &StackConfig) -> Result<KernelOutcome> {
    sub.check(n)?;
    cfg.require(Kernel::LastRow.frames_needed(n, sub.placed_rows))?;
    let last = BitMask::board(n);
    let root_valid = valid_positions(sub.cur, sub.left, sub.right, n);
    if sub.cur == last {
        return Ok(KernelOutcome { count: SolutionCount(1), high_water: 0 });
    }
    // The root row is itself the last row (or a dead end): count it directly.
    if root_valid.is_empty() || sub.placed_rows == n - 1 {
        return Ok(KernelOutcome { count: SolutionCount(u64::from(root_valid.count())), high_water: 0 });
    }

    // Frame `i` holds a board with `placed_rows + i` queens, so a child of
    // the top frame is on the last row once `placed_rows + top == n - 1`.
    let last_child_top = (n - 1 - sub.placed_rows) as usize;
    let mut stack = [SearchFrame::default(); MAX_FRAMES];
    let mut top = 0usize;
    let mut high_water = 1usize;
    let mut sum = 0u64;
    stack[top] = SearchFrame { cur: sub.cur, left: sub.left, right: sub.right, valid_pos: root_valid };
    top += 1;

    while top != 0 {
        let SearchFrame { cur, left, right, valid_pos } = stack[top - 1];
        if valid_pos.is_empty() {
            top -= 1;
            continue;
        }
        let p = lowest_set_bit(valid_pos);
        stack[top - 1].valid_pos = BitMask(valid_pos.0 - p.0);

        let (cur, left, right) = apply_placement(cur, left, right, p);
        let valid_pos = valid_positions(cur, left, right, n);
        if valid_pos.is_empty() || top == last_child_top {
            sum = bump(sum, u64::from(valid_pos.count()))?;
            continue;
        }
        stack[top] = SearchFrame { cur, left, right, valid_pos };
        top += 1;
        high_water = high_water.max(top);
    }
    Ok(KernelOutcome { count: SolutionCount(sum), high_water: high_water as u32 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deep() -> StackConfig {
        StackConfig::custom(4 * MAX_FRAMES as u32).unwrap()
    }

    #[test]
    fn builtin_configs_match_reference_table() {
        let rows: Vec<(u32, u32, u32, u32)> = StackConfig::builtins()
            .iter()
            .map(|c| (c.block_size, c.stack_words, c.max_depth(), c.max_n()))
            .collect();
        assert_eq!(
            rows,
            vec![(128, 96, 24, 30), (160, 76, 19, 25), (192, 64, 16, 22), (256, 48, 12, 18), (512, 24, 6, 12)]
        );
        for c in StackConfig::builtins() {
            let opt = c.clone().with_last_row_opt(true);
            assert_eq!(opt.max_n(), c.max_n() + 1);
            assert_eq!(c.max_depth(), c.stack_words / 4);
        }
    }

    #[test]
    fn config_lookup() {
        assert_eq!(StackConfig::named("config3").unwrap().max_depth(), 16);
        assert_eq!(StackConfig::named("words:40").unwrap().max_depth(), 10);
        assert!(matches!(StackConfig::named("config9"), Err(Error::UnknownConfig(_))));
        assert!(StackConfig::custom(2).is_err());
        assert_eq!(StackConfig::default().name, "config2");
    }

    #[test]
    fn smallest_fitting_config() {
        assert_eq!(StackConfig::smallest_fitting(6).unwrap().name, "config5");
        assert_eq!(StackConfig::smallest_fitting(13).unwrap().name, "config3");
        assert_eq!(StackConfig::smallest_fitting(24).unwrap().name, "config1");
        assert!(StackConfig::smallest_fitting(25).is_none());
    }

    #[test]
    fn trivial_boards() {
        let root = Subproblem::root();
        assert_eq!(count_recursive(1, &root).unwrap(), SolutionCount(1));
        assert_eq!(count_recursive(2, &root).unwrap(), SolutionCount(0));
        assert_eq!(count_recursive(3, &root).unwrap(), SolutionCount(0));
        for n in 1..=3 {
            assert_eq!(count_iterative(n, &root, &deep()).unwrap(), count_recursive(n, &root).unwrap());
            assert_eq!(count_iterative_lastrow(n, &root, &deep()).unwrap(), count_recursive(n, &root).unwrap());
        }
    }

    #[test]
    fn lastrow_four_queens() {
        assert_eq!(count_iterative_lastrow(4, &Subproblem::root(), &deep()).unwrap(), SolutionCount(2));
    }

    #[test]
    fn full_subproblem_counts_one() {
        // 4-queens solution with columns 1,3,0,2 in rows 0..3.
        let mut s = Subproblem::root();
        for col in [1, 3, 0, 2] {
            s = s.place(BitMask(1 << col));
        }
        assert_eq!(s.cur, BitMask::board(4));
        let o = run_iterative(4, &s, &deep()).unwrap();
        assert_eq!((o.count, o.high_water), (SolutionCount(1), 0));
        let o = run_lastrow(4, &s, &deep()).unwrap();
        assert_eq!((o.count, o.high_water), (SolutionCount(1), 0));
    }

    #[test]
    fn dead_root_is_not_searched_past() {
        // n = 3, queen at column 0 then column 2: row 2 has no free column.
        let s = Subproblem::root().place(BitMask(0b001)).place(BitMask(0b100));
        assert!(s.valid(3).is_empty());
        assert_eq!(run_iterative(3, &s, &deep()).unwrap().count, SolutionCount(0));
        assert_eq!(run_lastrow(3, &s, &deep()).unwrap().count, SolutionCount(0));
    }

    #[test]
    fn depth_precondition_is_checked_before_search() {
        let shallow = StackConfig::named("config5").unwrap(); // 6 frames
        let root = Subproblem::root();
        assert!(matches!(count_iterative(7, &root, &shallow), Err(Error::Depth { required: 7, available: 6, .. })));
        // one frame fewer with the last-row kernel
        assert_eq!(count_iterative_lastrow(7, &root, &shallow).unwrap(), SolutionCount(40));
        assert!(count_iterative(6, &root, &shallow).is_ok());
    }

    #[test]
    fn high_water_reaches_bound_at_n10() {
        let root = Subproblem::root();
        assert_eq!(run_iterative(10, &root, &deep()).unwrap().high_water, 10);
        assert_eq!(run_lastrow(10, &root, &deep()).unwrap().high_water, 9);
    }

    #[test]
    fn kernel_parse_roundtrip() {
        for k in [Kernel::Iterative, Kernel::LastRow] {
            assert_eq!(k.as_str().parse::<Kernel>().unwrap(), k);
        }
        assert!("bfs".parse::<Kernel>().is_err());
    }

    #[test]
    fn checked_counter() {
        assert!(matches!(SolutionCount(u64::MAX).checked_add(SolutionCount(1)), Err(Error::Overflow)));
        assert!(matches!(SolutionCount(u64::MAX / 2 + 1).checked_mul(2), Err(Error::Overflow)));
        assert_eq!(SolutionCount(3).checked_mul(2).unwrap(), SolutionCount(6));
    }
}
