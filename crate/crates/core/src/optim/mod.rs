//! Update rules and the run loop.

mod run;
mod spec;
mod steps;

pub use crate::history::{init_history, HistoryInit};
pub use run::{run_optimizer, run_with, RunError, RunResult, RunSettings, Start, TraceRow, DIVERGENCE_LOSS};
pub use spec::{Method, OptimizerKind, OptimizerSpec, DEFAULT_ADAM_BETAS, DEFAULT_ADAM_EPS};
pub use steps::{adam_step, interpolatron_step, momentum_step, nesterov_step, sgd_step, AdamState};

pub(crate) use steps::mixed_step;
