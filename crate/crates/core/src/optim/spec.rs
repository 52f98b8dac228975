use std::fmt;

use crate::anderson::DEFAULT_RIDGE;
use crate::error::{invalid, Result};
use crate::history::HistoryInit;
use crate::mixing::{MixingCoefficients, MixingMode};

pub const DEFAULT_ADAM_BETAS: (f64, f64) = (0.9, 0.999);
pub const DEFAULT_ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimizerKind {
    Sgd,
    Momentum,
    Nesterov,
    Adam,
    Interpolatron,
    Anderson,
    ProjectedAnderson,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Momentum => "momentum",
            OptimizerKind::Nesterov => "nesterov",
            OptimizerKind::Adam => "adam",
            OptimizerKind::Interpolatron => "interpolatron",
            OptimizerKind::Anderson => "anderson",
            OptimizerKind::ProjectedAnderson => "projected-anderson",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "sgd" => OptimizerKind::Sgd,
            "momentum" | "heavy-ball" => OptimizerKind::Momentum,
            "nesterov" => OptimizerKind::Nesterov,
            "adam" => OptimizerKind::Adam,
            "interpolatron" => OptimizerKind::Interpolatron,
            "anderson" => OptimizerKind::Anderson,
            "projected-anderson" => OptimizerKind::ProjectedAnderson,
            _ => return None,
        })
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Update rule together with exactly the hyperparameters it needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Sgd,
    Momentum { tau: f64 },
    Nesterov { tau: f64 },
    Adam { betas: (f64, f64), eps: f64 },
    Interpolatron { alphas: MixingCoefficients },
    Anderson { k: usize, ridge: f64 },
    /// Two-step Anderson with α projected onto `[0, 1]`.
    ProjectedAnderson,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerSpec {
    pub method: Method,
    pub history_init: HistoryInit,
}

impl OptimizerSpec {
    pub fn new(method: Method) -> Result<Self> {
        let spec = Self {
            method,
            history_init: HistoryInit::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn sgd() -> Self {
        Self::new(Method::Sgd).expect("valid")
    }

    pub fn momentum(tau: f64) -> Result<Self> {
        Self::new(Method::Momentum { tau })
    }

    pub fn nesterov(tau: f64) -> Result<Self> {
        Self::new(Method::Nesterov { tau })
    }

    pub fn adam() -> Self {
        Self::new(Method::Adam {
            betas: DEFAULT_ADAM_BETAS,
            eps: DEFAULT_ADAM_EPS,
        })
        .expect("valid")
    }

    pub fn interpolatron(alphas: Vec<f64>) -> Result<Self> {
        Self::new(Method::Interpolatron {
            alphas: MixingCoefficients::interpolation(alphas)?,
        })
    }

    pub fn anderson(k: usize) -> Result<Self> {
        Self::new(Method::Anderson {
            k,
            ridge: DEFAULT_RIDGE,
        })
    }

    pub fn projected_anderson() -> Self {
        Self::new(Method::ProjectedAnderson).expect("valid")
    }

    pub fn with_history_init(mut self, init: HistoryInit) -> Self {
        self.history_init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let check_tau = |tau: f64| {
            if (0.0..1.0).contains(&tau) {
                Ok(())
            } else {
                Err(invalid("tau", format!("must lie in [0, 1), got {tau}")))
            }
        };
        match &self.method {
            Method::Sgd | Method::ProjectedAnderson => Ok(()),
            Method::Momentum { tau } | Method::Nesterov { tau } => check_tau(*tau),
            Method::Adam { betas, eps } => {
                if !((0.0..1.0).contains(&betas.0) && (0.0..1.0).contains(&betas.1)) {
                    return Err(invalid("adam_betas", "both must lie in [0, 1)"));
                }
                if !(*eps > 0.0) {
                    return Err(invalid("adam_eps", "must be positive"));
                }
                Ok(())
            }
            Method::Interpolatron { alphas } => {
                if alphas.mode() != MixingMode::Interpolation {
                    return Err(invalid("alphas", "interpolatron needs interpolation-mode alphas"));
                }
                Ok(())
            }
            Method::Anderson { k, ridge } => {
                if *k == 0 {
                    return Err(invalid("k", "must be positive"));
                }
                if !(*ridge >= 0.0 && ridge.is_finite()) {
                    return Err(invalid("ridge", "must be nonnegative"));
                }
                Ok(())
            }
        }
    }

    pub fn kind(&self) -> OptimizerKind {
        match self.method {
            Method::Sgd => OptimizerKind::Sgd,
            Method::Momentum { .. } => OptimizerKind::Momentum,
            Method::Nesterov { .. } => OptimizerKind::Nesterov,
            Method::Adam { .. } => OptimizerKind::Adam,
            Method::Interpolatron { .. } => OptimizerKind::Interpolatron,
            Method::Anderson { .. } => OptimizerKind::Anderson,
            Method::ProjectedAnderson => OptimizerKind::ProjectedAnderson,
        }
    }

    /// History length `k` as a hyperparameter (1 for the single-point rules).
    pub fn k(&self) -> usize {
        match &self.method {
            Method::Interpolatron { alphas } => alphas.len(),
            Method::Anderson { k, .. } => *k,
            Method::ProjectedAnderson => 2,
            _ => 1,
        }
    }

    /// Slots the run loop keeps; the extrapolation rules look one step back.
    pub fn window_len(&self) -> usize {
        match self.method {
            Method::Momentum { .. } | Method::Nesterov { .. } => 2,
            _ => self.k(),
        }
    }

    /// Ratio between the per-step drift under a constant gradient and `β`:
    /// 1 for SGD, `1/(1−τ)` for the extrapolation rules, `1/Σ i·α_i` for
    /// interpolation. `None` for the adaptive rules.
    pub fn drift_factor(&self) -> Option<f64> {
        match &self.method {
            Method::Sgd => Some(1.0),
            Method::Momentum { tau } | Method::Nesterov { tau } => Some(1.0 / (1.0 - tau)),
            Method::Interpolatron { alphas } => Some(1.0 / alphas.mean_lag()),
            _ => None,
        }
    }

    /// Mixing weights logged per step (adaptive rules only).
    pub fn logs_alpha(&self) -> bool {
        matches!(self.method, Method::Anderson { .. } | Method::ProjectedAnderson)
    }
}
