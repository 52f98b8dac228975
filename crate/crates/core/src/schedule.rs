//! Piecewise-constant learning-rate schedules keyed on epochs.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `β(epoch) = beta0 · factor^m`, `m` = number of decay epochs `≤ epoch`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    beta0: f64,
    decay_epochs: Vec<u64>,
    factor: f64,
}

impl StepSchedule {
    pub fn new(beta0: f64, decay_epochs: Vec<u64>, factor: f64) -> Result<Self> {
        if !(beta0 > 0.0 && beta0.is_finite()) {
            return Err(invalid("beta0", format!("must be positive, got {beta0}")));
        }
        if !(factor > 0.0 && factor < 1.0) {
            return Err(invalid("factor", format!("must lie in (0, 1), got {factor}")));
        }
        if decay_epochs.contains(&0) {
            return Err(invalid("decay_epochs", "epochs must be positive"));
        }
        if decay_epochs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("decay_epochs", "must be strictly increasing"));
        }
        Ok(Self {
            beta0,
            decay_epochs,
            factor,
        })
    }

    /// A schedule that never decays.
    pub fn constant(beta0: f64) -> Result<Self> {
        Self::new(beta0, Vec::new(), 0.1)
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn decay_epochs(&self) -> &[u64] {
        &self.decay_epochs
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    pub fn value(&self, epoch: u64) -> f64 {
        let m = self.decay_epochs.iter().take_while(|&&e| e <= epoch).count();
        self.beta0 * self.factor.powi(m as i32)
    }

    /// Same decay points with a different initial rate.
    pub fn with_beta0(&self, beta0: f64) -> Result<Self> {
        Self::new(beta0, self.decay_epochs.clone(), self.factor)
    }
}

/// Free-function form of [`StepSchedule::value`].
pub fn schedule_value(schedule: &StepSchedule, epoch: u64) -> f64 {
    schedule.value(epoch)
}
