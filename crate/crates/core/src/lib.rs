//! Parallel N-Queens solution counting.
//!
//! Boards are encoded as three 32-bit masks and searched depth-first over a
//! bounded explicit stack. The first rows are pre-placed to split the search
//! into independent subproblems, folded by mirror symmetry, which workers
//! then count in parallel. [`bankmodel`] is an analytical model of banked
//! scratchpad memory used to check stack layouts for bank conflicts.

pub mod bankmodel;
pub mod checkpoint;
pub mod cli;
pub mod error;
pub mod mask;
pub mod report;
pub mod scheduler;
pub mod solver;
pub mod subproblems;

pub use error::{Error, Result};
pub use mask::BitMask;
pub use solver::{Kernel, SolutionCount, StackConfig, Subproblem};
pub use subproblems::{GenerationPlan, SubproblemBatch};
