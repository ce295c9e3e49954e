use std::ffi::{CStr, CString};
use std::ptr;

use queens_ffi::*;

fn last_error() -> String {
    let p = queens_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_through_handles() {
    unsafe {
        let mut solver = ptr::null_mut();
        assert_eq!(queens_solver_new(11, 3, &mut solver), QueensStatus::Ok);
        let name = CString::new("config1").unwrap();
        assert_eq!(queens_solver_set_config(solver, name.as_ptr()), QueensStatus::Ok);
        assert_eq!(queens_solver_set_kernel(solver, QueensKernel::Iterative), QueensStatus::Ok);
        assert_eq!(queens_solver_set_partition(solver, QueensStrategy::Stealing, 3), QueensStatus::Ok);

        let mut report = ptr::null_mut();
        assert_eq!(queens_solver_run(solver, &mut report), QueensStatus::Ok);
        let mut total = 0;
        assert_eq!(queens_report_total(report, &mut total), QueensStatus::Ok);
        assert_eq!(total, 2680);
        let mut subs = 0;
        assert_eq!(queens_report_subproblems(report, &mut subs), QueensStatus::Ok);
        let mut direct = 0;
        assert_eq!(queens_count_subproblems(11, 3, &mut direct), QueensStatus::Ok);
        assert_eq!(subs, direct);

        let mut json = ptr::null_mut();
        assert_eq!(queens_report_json(report, &mut json), QueensStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        queens_string_free(json);
        assert!(text.contains("\"total\": 2680"));

        let weights = [0.5, 0.3, 0.2];
        assert_eq!(queens_solver_set_weights(solver, weights.as_ptr(), weights.len()), QueensStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(queens_solver_run(solver, &mut again), QueensStatus::Ok);
        assert_eq!(queens_report_total(again, &mut total), QueensStatus::Ok);
        assert_eq!(total, 2680);

        queens_report_free(report);
        queens_report_free(again);
        queens_solver_free(solver);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut solver = ptr::null_mut();
        assert_eq!(queens_solver_new(40, 3, &mut solver), QueensStatus::Config);
        assert!(last_error().contains("40"));
        assert!(solver.is_null());

        assert_eq!(queens_solver_new(22, 2, &mut solver), QueensStatus::Ok);
        let small = CString::new("config5").unwrap();
        assert_eq!(queens_solver_set_config(solver, small.as_ptr()), QueensStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(queens_solver_run(solver, &mut report), QueensStatus::Config);
        assert!(last_error().contains("config5"));
        let bogus = CString::new("config9").unwrap();
        assert_eq!(queens_solver_set_config(solver, bogus.as_ptr()), QueensStatus::Config);
        assert_eq!(queens_solver_set_config(solver, ptr::null()), QueensStatus::InvalidArgument);
        assert_eq!(queens_solver_set_partition(solver, QueensStrategy::Uniform, 0), QueensStatus::Config);
        queens_solver_free(solver);

        assert_eq!(queens_solver_run(ptr::null(), &mut report), QueensStatus::InvalidArgument);
        assert_eq!(queens_report_total(ptr::null(), ptr::null_mut()), QueensStatus::InvalidArgument);
        assert_eq!(queens_count_subproblems(8, 2, ptr::null_mut()), QueensStatus::InvalidArgument);
        queens_solver_free(ptr::null_mut());
        queens_report_free(ptr::null_mut());
    }
}

#[test]
fn checkpointed_run_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("ffi.ckpt").to_str().unwrap()).unwrap();
    unsafe {
        let mut solver = ptr::null_mut();
        assert_eq!(queens_solver_new(10, 3, &mut solver), QueensStatus::Ok);
        assert_eq!(queens_solver_set_checkpoint(solver, path.as_ptr(), 10), QueensStatus::Ok);
        let mut report = ptr::null_mut();
        assert_eq!(queens_solver_run(solver, &mut report), QueensStatus::Ok);
        let mut total = 0;
        queens_report_total(report, &mut total);
        assert_eq!(total, 724);
        queens_report_free(report);
        queens_solver_free(solver);
    }
    let text = std::fs::read_to_string(dir.path().join("ffi.ckpt")).unwrap();
    assert!(text.lines().last().unwrap().starts_with("checksum "));
}

#[test]
fn completions_and_bank_queries() {
    unsafe {
        let mut count = 0;
        // Queen in column 1 of row 0 on a 6 x 6 board.
        assert_eq!(queens_count_completions(6, 0b10, 0b100, 0b1, 1, QueensKernel::LastRow, &mut count), QueensStatus::Ok);
        assert_eq!(count, 1);
        assert_eq!(queens_count_completions(6, 0, 0, 0, 0, QueensKernel::Iterative, &mut count), QueensStatus::Ok);
        assert_eq!(count, 4);

        let mut c = QueensConflict::default();
        let row: Vec<u64> = (0..32).map(|t| 4 * t).collect();
        assert_eq!(queens_conflict_degree(32, 4, 32, row.as_ptr(), row.len(), 4, false, &mut c), QueensStatus::Ok);
        assert_eq!(c.max_degree, 1);
        let column: Vec<u64> = (0..32).map(|t| 128 * t).collect();
        queens_conflict_degree(32, 4, 32, column.as_ptr(), column.len(), 4, false, &mut c);
        assert_eq!(c.max_degree, 32);
        let wide: Vec<u64> = (0..32).map(|t| 16 * t).collect();
        queens_conflict_degree(32, 4, 32, wide.as_ptr(), wide.len(), 16, true, &mut c);
        assert_eq!(c.max_degree, 4);
        queens_conflict_degree(32, 4, 32, wide.as_ptr(), wide.len(), 16, false, &mut c);
        assert_eq!(c, QueensConflict { transactions: 4, max_degree: 1 });
        assert_eq!(queens_conflict_degree(32, 4, 32, wide.as_ptr(), 2, 8, false, &mut c), QueensStatus::Config);
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(queens_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
