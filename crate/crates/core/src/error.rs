use std::io;

use thiserror::Error;

/// Errors produced anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("board size {0} is outside the supported range 1..=32")]
    BoardSize(u32),

    #[error("pre-placed rows {pre_rows} must satisfy 1 <= R < n (n = {n}, R <= {max})", max = crate::subproblems::MAX_PRE_ROWS)]
    PreRows { n: u32, pre_rows: u32 },

    #[error(
        "stack config {config} holds {available} frames but the search needs {required}{hint}"
    )]
    Depth {
        config: String,
        required: u32,
        available: u32,
        hint: String,
    },

    #[error("unknown stack config `{0}` (expected config1..config5 or words:<N>)")]
    UnknownConfig(String),

    #[error("solution counter overflowed 64 bits")]
    Overflow,

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("aggregation mismatch: {0}")]
    Aggregate(String),

    #[error("worker panicked while solving subproblem {index}: {message}")]
    WorkerPanic { index: u64, message: String },

    #[error("address {address:#x} is not aligned to {align} bytes")]
    Misaligned { address: u64, align: u32 },

    #[error("unsupported access width {0} (expected 4 or 16)")]
    AccessWidth(u32),

    #[error("layout `{layout}` maps two stack words to byte address {address:#x}")]
    LayoutNotInjective { layout: String, address: u64 },

    #[error("invalid bank geometry: {0}")]
    Geometry(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code used by the `queens` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Overflow => 3,
            Error::Checkpoint(_) | Error::Io(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
