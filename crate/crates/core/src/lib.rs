//! Interpolation-scheme first-order optimizers.
//!
//! The central update mixes the last `k` iterates and gradients with convex
//! weights `α`:
//!
//! ```text
//! x⁺ = Σ α_i x^{(t−i)} − β Σ α_i g^{(t−i)}
//! ```
//!
//! Alongside it live SGD, heavy-ball momentum, Nesterov and Adam baselines,
//! least-squares (Anderson) mixing, a few test objectives, and a `theory`
//! module that certifies linear rates on strongly convex quadratics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anderson;
mod error;
mod history;
mod mixing;
pub mod nets;
pub mod optim;
mod problem;
pub mod problems;
pub mod rng;
mod schedule;
pub mod theory;
mod vector;

pub use anderson::{anderson_mixing, anderson_step, projected_mixing_k2, AndersonMixing, GradientBlock};
pub use error::{Error, Result};
pub use history::{init_history, HistoryInit, HistoryWindow};
pub use mixing::{MixingCoefficients, MixingMode, ALPHA_SUM_TOL};
pub use optim::{run_optimizer, run_with, OptimizerKind, OptimizerSpec, RunError, RunResult, RunSettings, TraceRow};
pub use problem::{sample_batch, steps_per_epoch, Problem};
pub use schedule::{schedule_value, StepSchedule};
pub use vector::{linear_combination, Vector};
