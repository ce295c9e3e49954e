//! C ABI for the queens solver.
//!
//! Every function returns a [`QueensStatus`]; results come back through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`queens_last_error`]. Handles are opaque and must be released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::io;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use queens_core::bankmodel::{conflict_degree_with, AccessRequest, BankGeometry, Phasing};
use queens_core::cli::{cmd_solve, RunConfig};
use queens_core::report::SolveReport;
use queens_core::scheduler::{PartitionPlan, RunControl, DEFAULT_CHUNK_SIZE};
use queens_core::solver::{Kernel, StackConfig, Subproblem};
use queens_core::subproblems::count_subproblems;
use queens_core::{BitMask, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueensStatus {
    Ok = 0,
    /// Null pointer or malformed argument.
    InvalidArgument = 1,
    /// Board size, pre-placement, stack depth or partition rejected.
    Config = 2,
    Overflow = 3,
    Checkpoint = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueensKernel {
    Iterative = 0,
    LastRow = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueensStrategy {
    Uniform = 0,
    Weighted = 1,
    Stealing = 2,
}

/// Result of a bank-conflict query.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueensConflict {
    pub transactions: u32,
    pub max_degree: u32,
}

/// Solver settings. Opaque to C.
pub struct QueensSolver {
    config: RunConfig,
}

/// A finished (or interrupted) run. Opaque to C.
pub struct QueensReport {
    report: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QueensStatus {
    match e.exit_code() {
        3 => QueensStatus::Overflow,
        4 => QueensStatus::Checkpoint,
        _ => QueensStatus::Config,
    }
}

struct Failure(QueensStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure(status_of(&e), e.to_string())
    }
}

fn invalid(what: &str) -> Failure {
    Failure(QueensStatus::InvalidArgument, what.to_string())
}

/// Run `f` behind the boundary: catch panics and translate errors.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QueensStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QueensStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            QueensStatus::Internal
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("null output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(&format!("null {what}")))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| invalid(&format!("null {what}")))
}

unsafe fn string_arg(s: *const c_char, what: &str) -> Result<String, Failure> {
    if s.is_null() {
        return Err(invalid(&format!("null {what}")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| invalid(&format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn queens_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn queens_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a solver for an `n` x `n` board split after `pre_rows` rows, with
/// the default stack config, last-row kernel and one worker.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn queens_solver_new(n: u32, pre_rows: u32, out: *mut *mut QueensSolver) -> QueensStatus {
    guard(|| {
        let config = RunConfig::new(n, pre_rows);
        config.validate()?;
        write_out(out, Box::into_raw(Box::new(QueensSolver { config })))
    })
}

/// # Safety
/// `solver` must come from [`queens_solver_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn queens_solver_free(solver: *mut QueensSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Select a stack config by name (`config1`..`config5` or `words:<n>`).
///
/// # Safety
/// `solver` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn queens_solver_set_config(solver: *mut QueensSolver, name: *const c_char) -> QueensStatus {
    guard(|| {
        let solver = borrow_mut(solver, "solver")?;
        let name = string_arg(name, "config name")?;
        solver.config.config = StackConfig::named(&name)?;
        Ok(())
    })
}

/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn queens_solver_set_kernel(solver: *mut QueensSolver, kernel: QueensKernel) -> QueensStatus {
    guard(|| {
        let solver = borrow_mut(solver, "solver")?;
        solver.config.kernel = match kernel {
            QueensKernel::Iterative => Kernel::Iterative,
            QueensKernel::LastRow => Kernel::LastRow,
        };
        Ok(())
    })
}

/// Partition work over `workers` threads. Weighted uses the reference
/// weights; see [`queens_solver_set_weights`] for custom ones.
///
/// # Safety
/// `solver` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn queens_solver_set_partition(
    solver: *mut QueensSolver,
    strategy: QueensStrategy,
    workers: usize,
) -> QueensStatus {
    guard(|| {
        let solver = borrow_mut(solver, "solver")?;
        let plan = match strategy {
            QueensStrategy::Uniform => PartitionPlan::uniform(workers),
            QueensStrategy::Weighted => PartitionPlan::reference_weighted(workers),
            QueensStrategy::Stealing => PartitionPlan::stealing(workers, DEFAULT_CHUNK_SIZE),
        };
        plan.validate()?;
        solver.config.plan = plan;
        Ok(())
    })
}

/// Weighted partition with one weight per worker.
///
/// # Safety
/// `solver` must be a live handle and `weights` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn queens_solver_set_weights(
    solver: *mut QueensSolver,
    weights: *const f64,
    len: usize,
) -> QueensStatus {
    guard(|| {
        let solver = borrow_mut(solver, "solver")?;
        if weights.is_null() || len == 0 {
            return Err(invalid("weights must be a non-empty array"));
        }
        let plan = PartitionPlan::weighted(std::slice::from_raw_parts(weights, len).to_vec());
        plan.validate()?;
        solver.config.plan = plan;
        Ok(())
    })
}

/// Write progress to `path` every `interval` subproblems; NULL disables.
///
/// # Safety
/// `solver` must be a live handle; `path` NULL or a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn queens_solver_set_checkpoint(
    solver: *mut QueensSolver,
    path: *const c_char,
    interval: u64,
) -> QueensStatus {
    guard(|| {
        let solver = borrow_mut(solver, "solver")?;
        solver.config.checkpoint =
            if path.is_null() { None } else { Some(PathBuf::from(string_arg(path, "checkpoint path")?)) };
        solver.config.checkpoint_interval = interval.max(1);
        Ok(())
    })
}

/// Run the solver to completion.
///
/// # Safety
/// `solver` must be a live handle and `out` valid for a report handle.
#[no_mangle]
pub unsafe extern "C" fn queens_solver_run(solver: *const QueensSolver, out: *mut *mut QueensReport) -> QueensStatus {
    guard(|| {
        let solver = borrow(solver, "solver")?;
        if out.is_null() {
            return Err(invalid("null output pointer"));
        }
        let report = cmd_solve(&solver.config, &RunControl::new(), &mut io::sink())?;
        write_out(out, Box::into_raw(Box::new(QueensReport { report })))
    })
}

/// # Safety
/// `report` must come from [`queens_solver_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn queens_report_free(report: *mut QueensReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn queens_report_total(report: *const QueensReport, out: *mut u64) -> QueensStatus {
    guard(|| write_out(out, borrow(report, "report")?.report.total.0))
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn queens_report_subproblems(report: *const QueensReport, out: *mut u64) -> QueensStatus {
    guard(|| write_out(out, borrow(report, "report")?.report.subproblems))
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn queens_report_calc_ms(report: *const QueensReport, out: *mut f64) -> QueensStatus {
    guard(|| write_out(out, borrow(report, "report")?.report.calc_ms))
}

/// The report as JSON. Release the string with [`queens_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn queens_report_json(report: *const QueensReport, out: *mut *mut c_char) -> QueensStatus {
    guard(|| {
        let json = borrow(report, "report")?.report.to_json();
        write_out(out, CString::new(json).expect("JSON has no NUL").into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn queens_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of subproblems after pre-placing `pre_rows` rows (symmetry folded).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn queens_count_subproblems(n: u32, pre_rows: u32, out: *mut u64) -> QueensStatus {
    guard(|| write_out(out, count_subproblems(n, pre_rows)?))
}

/// Count the completions of one partial placement, multiplier not applied.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn queens_count_completions(
    n: u32,
    cur: u32,
    left: u32,
    right: u32,
    placed_rows: u32,
    kernel: QueensKernel,
    out: *mut u64,
) -> QueensStatus {
    guard(|| {
        let sub = Subproblem { cur: BitMask(cur), left: BitMask(left), right: BitMask(right), placed_rows, multiplier: 1 };
        let kernel = match kernel {
            QueensKernel::Iterative => Kernel::Iterative,
            QueensKernel::LastRow => Kernel::LastRow,
        };
        let cfg = StackConfig::smallest_fitting(kernel.frames_needed(n, placed_rows)).unwrap_or_default();
        write_out(out, kernel.count(n, &sub, &cfg)?.count.0)
    })
}

/// Bank conflict of one warp request of `len` byte addresses, each reading
/// `width` (4 or 16) bytes. `full_warp` evaluates wide accesses without
/// splitting them into hardware phases.
///
/// # Safety
/// `addresses` must point to `len` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn queens_conflict_degree(
    bank_count: u32,
    word_bytes: u32,
    warp_size: u32,
    addresses: *const u64,
    len: usize,
    width: u32,
    full_warp: bool,
    out: *mut QueensConflict,
) -> QueensStatus {
    guard(|| {
        if addresses.is_null() && len > 0 {
            return Err(invalid("null address array"));
        }
        let addresses = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(addresses, len).to_vec() };
        let geometry = BankGeometry { bank_count, word_bytes, warp_size };
        let phasing = if full_warp { Phasing::FullWarp } else { Phasing::Hardware };
        let c = conflict_degree_with(&geometry, &AccessRequest { addresses, width }, phasing)?;
        write_out(out, QueensConflict { transactions: c.transactions, max_degree: c.max_degree })
    })
}
