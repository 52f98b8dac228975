//! Mixing coefficients over a k-step history.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `Σ α_i = 1`.
pub const ALPHA_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MixingMode {
    /// Convex weights: every `α_i ∈ [0, 1]`.
    Interpolation,
    /// Affine weights of any sign (Anderson mixing).
    Affine,
}

/// The weights `α = (α_1, …, α_k)`, newest history slot first.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingCoefficients {
    alphas: Vec<f64>,
    mode: MixingMode,
}

impl MixingCoefficients {
    pub fn new(alphas: Vec<f64>, mode: MixingMode) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParameter {
                name: "alphas",
                reason: "need at least one coefficient".into(),
            });
        }
        if let Some((index, &value)) = alphas.iter().enumerate().find(|(_, a)| !a.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        let sum: f64 = alphas.iter().sum();
        if (sum - 1.0).abs() > ALPHA_SUM_TOL {
            return Err(Error::AlphaSum { sum });
        }
        if mode == MixingMode::Interpolation {
            if let Some((index, &value)) = alphas
                .iter()
                .enumerate()
                .find(|(_, a)| !(0.0..=1.0).contains(*a))
            {
                return Err(Error::AlphaRange { index, value });
            }
        }
        Ok(Self { alphas, mode })
    }

    pub fn interpolation(alphas: Vec<f64>) -> Result<Self> {
        Self::new(alphas, MixingMode::Interpolation)
    }

    pub fn affine(alphas: Vec<f64>) -> Result<Self> {
        Self::new(alphas, MixingMode::Affine)
    }

    /// `(1/k, …, 1/k)`.
    pub fn uniform(k: usize, mode: MixingMode) -> Self {
        assert!(k > 0);
        Self {
            alphas: vec![1.0 / k as f64; k],
            mode,
        }
    }

    /// `(1, 0, …, 0)`: all weight on the newest slot.
    pub fn newest(k: usize, mode: MixingMode) -> Self {
        assert!(k > 0);
        let mut alphas = vec![0.0; k];
        alphas[0] = 1.0;
        Self { alphas, mode }
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn mode(&self) -> MixingMode {
        self.mode
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alphas
    }

    pub fn sum(&self) -> f64 {
        self.alphas.iter().sum()
    }

    /// True when every weight lies in `[0, 1]`, whatever the mode.
    pub fn is_in_unit_box(&self) -> bool {
        self.alphas.iter().all(|a| (0.0..=1.0).contains(a))
    }

    /// `Σ_i i·α_i`: the lag-weighted mean. A k-step update driven by a
    /// constant gradient `g` drifts by `−β g / Σ_i i·α_i` per step.
    pub fn mean_lag(&self) -> f64 {
        self.alphas
            .iter()
            .enumerate()
            .map(|(i, a)| (i + 1) as f64 * a)
            .sum()
    }
}
