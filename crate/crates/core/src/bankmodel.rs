//! Analytical model of banked scratchpad memory.
//!
//! Memory is split into `bank_count` banks of `word_bytes` each; word `w`
//! lives in bank `w mod bank_count`. A warp request is served in as many
//! transactions as the largest number of *distinct* words any one bank has
//! to deliver. Threads reading the same word share it (broadcast).
//!
//! Wide accesses are split into phases: a phase covers one full row of banks
//! (`bank_count * word_bytes` bytes), so 16-byte accesses on 32 x 4-byte
//! banks are served a quarter-warp (8 threads) at a time.
//!
//! Layouts are evaluated in lockstep: every thread of the warp touches the
//! same frame and word index at the same step.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Four 32-bit words per search frame.
pub const FRAME_WORDS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BankGeometry {
    pub bank_count: u32,
    pub word_bytes: u32,
    pub warp_size: u32,
}

impl Default for BankGeometry {
    fn default() -> BankGeometry {
        BankGeometry { bank_count: 32, word_bytes: 4, warp_size: 32 }
    }
}

impl BankGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.bank_count == 0 || self.word_bytes == 0 || self.warp_size == 0 {
            return Err(Error::Geometry("bank_count, word_bytes and warp_size must be positive".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn bank_of(&self, address: u64) -> u32 {
        ((address / u64::from(self.word_bytes)) % u64::from(self.bank_count)) as u32
    }

    /// Bytes covered by one row of banks.
    pub fn row_bytes(&self) -> u32 {
        self.bank_count * self.word_bytes
    }

    /// Threads served together for an access of `width` bytes.
    pub fn phase_threads(&self, width: u32, phasing: Phasing) -> u32 {
        match phasing {
            Phasing::FullWarp => self.warp_size,
            Phasing::Hardware => (self.row_bytes() / width).clamp(1, self.warp_size),
        }
    }
}

/// How threads of a wide access are grouped into transactions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phasing {
    /// Phase size follows the access width (quarter-warp for 16 bytes).
    #[default]
    Hardware,
    /// All warp threads in a single phase.
    FullWarp,
}

/// One warp-wide memory instruction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessRequest {
    /// Byte address per active thread, in thread order.
    pub addresses: Vec<u64>,
    /// Bytes read per thread: 4 or 16.
    pub width: u32,
}

impl AccessRequest {
    pub fn scalar(addresses: Vec<u64>) -> AccessRequest {
        AccessRequest { addresses, width: 4 }
    }

    pub fn vector(addresses: Vec<u64>) -> AccessRequest {
        AccessRequest { addresses, width: 16 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub transactions: u32,
    pub max_degree: u32,
}

/// Transactions and worst per-bank degree of `request`, hardware phasing.
pub fn conflict_degree(geometry: &BankGeometry, request: &AccessRequest) -> Result<Conflict> {
    conflict_degree_with(geometry, request, Phasing::Hardware)
}

pub fn conflict_degree_with(
    geometry: &BankGeometry,
    request: &AccessRequest,
    phasing: Phasing,
) -> Result<Conflict> {
    geometry.validate()?;
    let width = request.width;
    if width != 4 && width != 16 {
        return Err(Error::AccessWidth(width));
    }
    if !width.is_multiple_of(geometry.word_bytes) {
        return Err(Error::Geometry(format!(
            "access width {width} is not a multiple of the {}-byte word",
            geometry.word_bytes
        )));
    }
    let align = width.max(geometry.word_bytes);
    if let Some(&address) = request.addresses.iter().find(|&&a| a % u64::from(align) != 0) {
        return Err(Error::Misaligned { address, align });
    }

    let words_per_access = u64::from(width / geometry.word_bytes);
    let phase = geometry.phase_threads(width, phasing) as usize;
    let mut out = Conflict::default();
    let mut per_bank: HashMap<u32, HashSet<u64>> = HashMap::new();
    for chunk in request.addresses.chunks(phase) {
        per_bank.clear();
        for &a in chunk {
            let first = a / u64::from(geometry.word_bytes);
            for w in first..first + words_per_access {
                let bank = (w % u64::from(geometry.bank_count)) as u32;
                per_bank.entry(bank).or_default().insert(w);
            }
        }
        let degree = per_bank.values().map(|s| s.len() as u32).max().unwrap_or(0);
        out.transactions += degree;
        out.max_degree = out.max_degree.max(degree);
    }
    Ok(out)
}

/// Placement of per-thread search stacks in scratchpad memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Layout {
    /// Each thread owns `stack_words` consecutive words.
    Contiguous { stack_words: u32 },
    /// Word `m` of thread `t` sits one bank row above word `m - 1`, in bank `t`.
    Interleaved,
}

impl Layout {
    pub fn name(&self) -> String {
        match self {
            Layout::Contiguous { stack_words } => format!("contiguous({stack_words})"),
            Layout::Interleaved => "interleaved".to_string(),
        }
    }

    /// Byte address of word `word` of frame `frame` on thread `thread`.
    pub fn scalar_address(&self, g: &BankGeometry, thread: u32, frame: u32, word: u32) -> u64 {
        let (t, m) = (u64::from(thread), u64::from(FRAME_WORDS * frame + word));
        let wb = u64::from(g.word_bytes);
        match *self {
            Layout::Contiguous { stack_words } => (t * u64::from(stack_words) + m) * wb,
            Layout::Interleaved => wb * t + u64::from(g.row_bytes()) * m,
        }
    }

    /// Base byte address of a whole 16-byte frame on thread `thread`.
    pub fn frame_address(&self, g: &BankGeometry, thread: u32, frame: u32) -> u64 {
        let (t, f) = (u64::from(thread), u64::from(frame));
        let frame_bytes = u64::from(FRAME_WORDS * g.word_bytes);
        match *self {
            Layout::Contiguous { stack_words } => {
                (t * u64::from(stack_words) + u64::from(FRAME_WORDS) * f) * u64::from(g.word_bytes)
            }
            Layout::Interleaved => frame_bytes * t + u64::from(g.row_bytes()) * u64::from(FRAME_WORDS) * f,
        }
    }

    /// Every word address (in words) the layout touches over the domain.
    fn words(&self, g: &BankGeometry, depth: u32, threads: u32, width: u32) -> Vec<u64> {
        let wb = u64::from(g.word_bytes);
        let mut out = Vec::with_capacity((depth * threads * FRAME_WORDS) as usize);
        for t in 0..threads {
            for f in 0..depth {
                if width == 16 {
                    let base = self.frame_address(g, t, f) / wb;
                    out.extend(base..base + u64::from(FRAME_WORDS));
                } else {
                    out.extend((0..FRAME_WORDS).map(|k| self.scalar_address(g, t, f, k) / wb));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutStep {
    pub frame: u32,
    /// `None` for a whole-frame access.
    pub word: Option<u32>,
    pub conflict: Conflict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutReport {
    pub layout: String,
    pub width: u32,
    pub phasing: Phasing,
    pub depth: u32,
    pub threads: u32,
    /// Worst degree over every step.
    pub max_degree: u32,
    /// Worst transaction count of a single step.
    pub max_transactions: u32,
    pub steps: Vec<LayoutStep>,
}

/// Walk a lockstep warp over every frame (and word, for scalar access) of
/// its stacks and record the conflict of each step.
pub fn analyze_layout(
    geometry: &BankGeometry,
    layout: &Layout,
    depth: u32,
    threads: u32,
    width: u32,
    phasing: Phasing,
) -> Result<LayoutReport> {
    geometry.validate()?;
    if width != 4 && width != 16 {
        return Err(Error::AccessWidth(width));
    }
    if threads == 0 || threads > geometry.warp_size {
        return Err(Error::Geometry(format!("threads must be in 1..={}", geometry.warp_size)));
    }
    let mut seen = HashSet::new();
    for w in layout.words(geometry, depth, threads, width) {
        if !seen.insert(w) {
            return Err(Error::LayoutNotInjective {
                layout: layout.name(),
                address: w * u64::from(geometry.word_bytes),
            });
        }
    }

    let mut steps = Vec::new();
    for f in 0..depth {
        if width == 16 {
            let req = AccessRequest::vector((0..threads).map(|t| layout.frame_address(geometry, t, f)).collect());
            steps.push(LayoutStep { frame: f, word: None, conflict: conflict_degree_with(geometry, &req, phasing)? });
        } else {
            for k in 0..FRAME_WORDS {
                let req =
                    AccessRequest::scalar((0..threads).map(|t| layout.scalar_address(geometry, t, f, k)).collect());
                steps.push(LayoutStep {
                    frame: f,
                    word: Some(k),
                    conflict: conflict_degree_with(geometry, &req, phasing)?,
                });
            }
        }
    }
    Ok(LayoutReport {
        layout: layout.name(),
        width,
        phasing,
        depth,
        threads,
        max_degree: steps.iter().map(|s| s.conflict.max_degree).max().unwrap_or(0),
        max_transactions: steps.iter().map(|s| s.conflict.transactions).max().unwrap_or(0),
        steps,
    })
}

/// Bank occupancy grid: one line per bank row, one cell per bank, each cell
/// the owning thread of that word (`.` if unused).
pub fn occupancy_grid(geometry: &BankGeometry, layout: &Layout, depth: u32, threads: u32, rows: u32) -> String {
    let wb = u64::from(geometry.word_bytes);
    let banks = u64::from(geometry.bank_count);
    let mut owner: HashMap<u64, u32> = HashMap::new();
    for t in 0..threads {
        for f in 0..depth {
            for k in 0..FRAME_WORDS {
                owner.insert(layout.scalar_address(geometry, t, f, k) / wb, t);
            }
        }
    }
    let width = threads.saturating_sub(1).to_string().len().max(2);
    let mut out = String::new();
    let _ = write!(out, "{:>8} |", "bank");
    for b in 0..banks {
        let _ = write!(out, " {b:>width$}");
    }
    out.push('\n');
    for row in 0..u64::from(rows) {
        let _ = write!(out, "{:>8} |", row * banks * wb);
        for b in 0..banks {
            match owner.get(&(row * banks + b)) {
                Some(t) => {
                    let _ = write!(out, " {t:>width$}");
                }
                None => {
                    let _ = write!(out, " {:>width$}", ".");
                }
            }
        }
        out.push('\n');
    }
    out
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Scalar-access degree a full warp sees on `contiguous(stack_words)`:
/// threads land on `bank_count / gcd` distinct banks.
pub fn contiguous_degree(geometry: &BankGeometry, stack_words: u32) -> u32 {
    gcd(stack_words, geometry.bank_count).min(geometry.warp_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> BankGeometry {
        BankGeometry::default()
    }

    #[test]
    fn broadcast_is_one_transaction() {
        let r = AccessRequest::scalar(vec![64; 32]);
        assert_eq!(conflict_degree(&g(), &r).unwrap(), Conflict { transactions: 1, max_degree: 1 });
    }

    #[test]
    fn one_word_per_bank() {
        let r = AccessRequest::scalar((0..32).map(|t| 4 * t).collect());
        assert_eq!(conflict_degree(&g(), &r).unwrap(), Conflict { transactions: 1, max_degree: 1 });
    }

    #[test]
    fn all_in_bank_zero() {
        let r = AccessRequest::scalar((0..32).map(|t| 4 * 32 * t).collect());
        assert_eq!(conflict_degree(&g(), &r).unwrap(), Conflict { transactions: 32, max_degree: 32 });
    }

    #[test]
    fn toy_geometry_by_hand() {
        // 4 banks of 4 bytes; words 0,4,8 in bank 0, word 1 in bank 1, word 4 twice.
        let toy = BankGeometry { bank_count: 4, word_bytes: 4, warp_size: 4 };
        let r = AccessRequest::scalar(vec![0, 16, 32, 4, 16]);
        // chunks of 4 threads: [0,16,32,4] -> bank0 {0,4,8}: 3 ; [16] -> 1
        assert_eq!(conflict_degree(&toy, &r).unwrap(), Conflict { transactions: 4, max_degree: 3 });
        // a 16-byte access covers the whole row: phase of one thread
        let v = AccessRequest::vector(vec![0, 16]);
        assert_eq!(conflict_degree(&toy, &v).unwrap(), Conflict { transactions: 2, max_degree: 1 });
        assert_eq!(
            conflict_degree_with(&toy, &v, Phasing::FullWarp).unwrap(),
            Conflict { transactions: 2, max_degree: 2 }
        );
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(matches!(
            conflict_degree(&g(), &AccessRequest::scalar(vec![0, 6])),
            Err(Error::Misaligned { address: 6, align: 4 })
        ));
        assert!(matches!(
            conflict_degree(&g(), &AccessRequest::vector(vec![0, 8])),
            Err(Error::Misaligned { address: 8, align: 16 })
        ));
        assert!(matches!(
            conflict_degree(&g(), &AccessRequest { addresses: vec![0], width: 8 }),
            Err(Error::AccessWidth(8))
        ));
        let zero = BankGeometry { bank_count: 0, ..g() };
        assert!(conflict_degree(&zero, &AccessRequest::scalar(vec![0])).is_err());
    }

    #[test]
    fn empty_request() {
        assert_eq!(conflict_degree(&g(), &AccessRequest::scalar(vec![])).unwrap(), Conflict::default());
    }

    #[test]
    fn interleaved_scalar_is_conflict_free() {
        let r = analyze_layout(&g(), &Layout::Interleaved, 24, 32, 4, Phasing::Hardware).unwrap();
        assert_eq!(r.steps.len(), 96);
        assert_eq!(r.max_degree, 1);
        assert_eq!(r.max_transactions, 1);
    }

    #[test]
    fn contiguous_96_serialises_the_warp() {
        let r = analyze_layout(&g(), &Layout::Contiguous { stack_words: 96 }, 24, 32, 4, Phasing::Hardware).unwrap();
        assert_eq!(r.max_degree, 32);
        assert!(r.steps.iter().all(|s| s.conflict.max_degree == 32));
    }

    #[test]
    fn vector_frames_quarter_warp() {
        let hw = analyze_layout(&g(), &Layout::Interleaved, 24, 32, 16, Phasing::Hardware).unwrap();
        assert_eq!((hw.max_degree, hw.max_transactions), (1, 4));
        let full = analyze_layout(&g(), &Layout::Interleaved, 24, 32, 16, Phasing::FullWarp).unwrap();
        assert_eq!(full.max_degree, 4);
    }

    #[test]
    fn non_injective_layout_is_reported() {
        // 33 threads would wrap bank t onto the next row's word
        let wide = BankGeometry { warp_size: 64, ..g() };
        assert!(matches!(
            analyze_layout(&wide, &Layout::Interleaved, 2, 33, 4, Phasing::Hardware),
            Err(Error::LayoutNotInjective { .. })
        ));
        // overlapping contiguous stacks
        assert!(matches!(
            analyze_layout(&g(), &Layout::Contiguous { stack_words: 4 }, 2, 2, 4, Phasing::Hardware),
            Err(Error::LayoutNotInjective { .. })
        ));
    }

    #[test]
    fn grid_shows_thread_per_bank() {
        let grid = occupancy_grid(&g(), &Layout::Interleaved, 1, 32, 2);
        let row0: Vec<&str> = grid.lines().nth(1).unwrap().split('|').nth(1).unwrap().split_whitespace().collect();
        assert_eq!(row0.len(), 32);
        assert!(row0.iter().enumerate().all(|(i, c)| c.parse::<usize>().unwrap() == i));
        let contig = occupancy_grid(&g(), &Layout::Contiguous { stack_words: 96 }, 1, 32, 1);
        // thread 0 owns words 0..3, the rest of the first bank row is unused
        assert!(contig.lines().nth(1).unwrap().contains(" 0  0  0  0  ."));
    }
}
