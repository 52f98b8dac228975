//! The seeded optimization loop.

use thiserror::Error;

use crate::anderson::anderson_step;
use crate::error::Error;
use crate::history::{init_history, HistoryWindow};
use crate::optim::spec::{Method, OptimizerSpec};
use crate::optim::steps::{adam_step, interpolatron_step, momentum_step, nesterov_step, sgd_step, AdamState};
use crate::problem::{steps_per_epoch, Problem};
use crate::rng::derive_seed;
use crate::schedule::StepSchedule;
use crate::vector::Vector;

/// Loss magnitude beyond which a run counts as diverged.
pub const DIVERGENCE_LOSS: f64 = 1e12;

/// One optimization step.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 1-based step index `t`.
    pub step: u64,
    /// 0-based epoch the step belongs to.
    pub epoch: u64,
    pub beta: f64,
    /// Evaluation loss at the new iterate `x^{(t)}`.
    pub loss: f64,
    /// Norm of the mini-batch gradient `g^{(t−1)}` consumed by the step.
    pub grad_norm: f64,
    /// Mixing weights chosen this step (Anderson variants only).
    pub alpha: Option<Vec<f64>>,
    /// `x^{(t)}` when iterate logging is on.
    pub iterate: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub trace: Vec<TraceRow>,
    pub final_iterate: Vector,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("run diverged at step {step}: {reason}")]
    Diverged {
        step: u64,
        reason: String,
        /// Rows up to and including the diverging step.
        trace: Vec<TraceRow>,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

impl RunError {
    pub fn diverged_step(&self) -> Option<u64> {
        match self {
            RunError::Diverged { step, .. } => Some(*step),
            RunError::Invalid(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSettings {
    pub steps: u64,
    pub batch_size: usize,
    pub seed: u64,
    pub log_iterates: bool,
}

impl RunSettings {
    pub fn new(steps: u64, batch_size: usize, seed: u64) -> Self {
        Self {
            steps,
            batch_size,
            seed,
            log_iterates: false,
        }
    }

    pub fn log_iterates(mut self, on: bool) -> Self {
        self.log_iterates = on;
        self
    }
}

/// Where a run begins.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// `x^{(0)}` from [`Problem::initial_point`] and the spec's history init.
    Fresh,
    /// Explicit `x^{(0)}` and the slots before it (window length must match
    /// [`OptimizerSpec::window_len`]).
    Explicit { x0: Vector, history: HistoryWindow },
}

/// Runs `steps` updates of `spec` on `problem` from a fresh start.
pub fn run_optimizer(
    problem: &dyn Problem,
    spec: &OptimizerSpec,
    schedule: &StepSchedule,
    steps: u64,
    batch_size: usize,
    seed: u64,
) -> Result<RunResult, RunError> {
    run_with(problem, spec, schedule, RunSettings::new(steps, batch_size, seed), Start::Fresh)
}

pub fn run_with(
    problem: &dyn Problem,
    spec: &OptimizerSpec,
    schedule: &StepSchedule,
    settings: RunSettings,
    start: Start,
) -> Result<RunResult, RunError> {
    spec.validate()?;
    if settings.steps == 0 {
        return Err(crate::error::invalid("steps", "must be positive").into());
    }
    if settings.batch_size == 0 {
        return Err(crate::error::invalid("batch_size", "must be positive").into());
    }
    let (mut x, mut window) = match start {
        Start::Fresh => {
            let x0 = problem.initial_point(settings.seed);
            let window = init_history(&x0, spec.window_len(), spec.history_init)?;
            (x0, window)
        }
        Start::Explicit { x0, history } => {
            if history.k() != spec.window_len() {
                return Err(Error::LengthMismatch {
                    expected: spec.window_len(),
                    actual: history.k(),
                }
                .into());
            }
            (x0, history)
        }
    };
    x.ensure_dim(problem.dim())?;
    x.ensure_dim(window.dim())?;

    let per_epoch = steps_per_epoch(problem.num_samples(), settings.batch_size);
    let mut adam = AdamState::zeros(problem.dim());
    let mut trace = Vec::with_capacity(settings.steps as usize);

    for t in 1..=settings.steps {
        let epoch = (t - 1) / per_epoch;
        let beta = schedule.value(epoch);
        let g = problem.stochastic_gradient(&x, derive_seed(settings.seed, t), settings.batch_size);
        let grad_norm = g.norm();
        window.push(x.clone(), g.clone())?;

        let mut alpha = None;
        let next = match &spec.method {
            Method::Sgd => sgd_step(&x, &g, beta),
            Method::Momentum { tau } => momentum_step(window.iterate(0), window.iterate(1), &g, *tau, beta),
            Method::Nesterov { tau } => nesterov_step(
                window.iterate(0),
                window.iterate(1),
                &g,
                window.gradient(1),
                *tau,
                beta,
            ),
            Method::Adam { betas, eps } => {
                let (next, state) = adam_step(&adam, &x, &g, beta, *betas, *eps, t);
                adam = state;
                next
            }
            Method::Interpolatron { alphas } => interpolatron_step(&window, alphas, beta)?,
            Method::Anderson { ridge, .. } => {
                let (next, a) = anderson_step(&window, beta, *ridge, false)?;
                alpha = Some(a.as_slice().to_vec());
                next
            }
            Method::ProjectedAnderson => {
                let (next, a) = anderson_step(&window, beta, 0.0, true)?;
                alpha = Some(a.as_slice().to_vec());
                next
            }
        };
        x = next;

        let loss = problem.eval_loss(&x);
        trace.push(TraceRow {
            step: t,
            epoch,
            beta,
            loss,
            grad_norm,
            alpha,
            iterate: settings.log_iterates.then(|| x.to_vec()),
        });

        let reason = if !x.is_finite() {
            Some("non-finite iterate".to_string())
        } else if !loss.is_finite() || loss.abs() > DIVERGENCE_LOSS {
            Some(format!("loss {loss:e} exceeds divergence threshold"))
        } else {
            None
        };
        if let Some(reason) = reason {
            return Err(RunError::Diverged { step: t, reason, trace });
        }
    }

    Ok(RunResult {
        trace,
        final_iterate: x,
        seed: settings.seed,
    })
}
