use std::ops::Range;

use crate::error::{Error, Result};

/// Distances below this are treated as converged and cut from the tail.
pub const FIT_FLOOR: f64 = 1e-13;
pub const MIN_FIT_ENTRIES: usize = 10;

/// Empirical linear rate `‖x^{(t)} − x*‖ ≈ d0_hat · xi_hat^t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub xi_hat: f64,
    pub d0_hat: f64,
    /// Indices `t` used by the least-squares fit.
    pub window: Range<usize>,
}

impl RateFit {
    pub fn predict(&self, t: usize) -> f64 {
        self.d0_hat * self.xi_hat.powi(t as i32)
    }
}

/// Least-squares fit of `ln d_t` against `t` over the tail half of the usable
/// prefix. The prefix ends at the first entry that is not a finite number
/// `≥ 1e-13`; `t` is the index into `distances`.
pub fn fit_rate(distances: &[f64]) -> Result<RateFit> {
    let usable = distances
        .iter()
        .position(|d| !(d.is_finite() && *d >= FIT_FLOOR))
        .unwrap_or(distances.len());
    if usable < MIN_FIT_ENTRIES {
        return Err(Error::TooFewEntries {
            usable,
            required: MIN_FIT_ENTRIES,
        });
    }
    let window = usable / 2..usable;
    let n = window.len() as f64;
    let t_mean = window.clone().map(|t| t as f64).sum::<f64>() / n;
    let y_mean = window.clone().map(|t| distances[t].ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for t in window.clone() {
        let dt = t as f64 - t_mean;
        sxy += dt * (distances[t].ln() - y_mean);
        sxx += dt * dt;
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * t_mean;
    Ok(RateFit {
        xi_hat: slope.exp(),
        d0_hat: intercept.exp(),
        window,
    })
}
