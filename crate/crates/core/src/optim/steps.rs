//! Single-step update rules.
//!
//! Each rule is a pure function of its inputs. Argument dimensions must
//! agree; the unchecked rules panic otherwise.

use crate::error::{Error, Result};
use crate::history::HistoryWindow;
use crate::mixing::{MixingCoefficients, MixingMode};
use crate::vector::{weighted_sum, Vector};

/// `x − β g`.
pub fn sgd_step(x: &Vector, g: &Vector, beta: f64) -> Vector {
    x.sub_scaled(g, beta)
}

/// Heavy ball: `(1+τ) x_t − τ x_{t−1} − β g_t`.
pub fn momentum_step(x_t: &Vector, x_prev: &Vector, g_t: &Vector, tau: f64, beta: f64) -> Vector {
    debug_assert!((0.0..1.0).contains(&tau));
    extrapolate(x_t, x_prev, tau).sub_scaled(g_t, beta)
}

/// Nesterov: `(1+τ) x_t − τ x_{t−1} − β[(1+τ) g_t − τ g_{t−1}]`.
pub fn nesterov_step(
    x_t: &Vector,
    x_prev: &Vector,
    g_t: &Vector,
    g_prev: &Vector,
    tau: f64,
    beta: f64,
) -> Vector {
    debug_assert!((0.0..1.0).contains(&tau));
    extrapolate(x_t, x_prev, tau).sub_scaled(&extrapolate(g_t, g_prev, tau), beta)
}

/// `(1+τ) a − τ b`, evaluated as `a + τ(a − b)` so that `τ = 0` and `a = b`
/// both return `a` bit for bit.
fn extrapolate(a: &Vector, b: &Vector, tau: f64) -> Vector {
    a.zip_map(b, |a, b| a + tau * (a - b))
}

/// First and second moment accumulators of Adam.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vector,
    pub v: Vector,
}

impl AdamState {
    pub fn zeros(dim: usize) -> Self {
        Self {
            m: Vector::zeros(dim),
            v: Vector::zeros(dim),
        }
    }
}

/// Bias-corrected Adam update at step `t ≥ 1`.
pub fn adam_step(
    state: &AdamState,
    x: &Vector,
    g: &Vector,
    beta: f64,
    betas: (f64, f64),
    eps: f64,
    t: u64,
) -> (Vector, AdamState) {
    assert!(t >= 1, "Adam step index starts at 1");
    let (b1, b2) = betas;
    let m = state.m.zip_map(g, |m, g| b1 * m + (1.0 - b1) * g);
    let v = state.v.zip_map(g, |v, g| b2 * v + (1.0 - b2) * g * g);
    let c1 = 1.0 - b1.powi(t as i32);
    let c2 = 1.0 - b2.powi(t as i32);
    let entries = x
        .iter()
        .zip(m.iter().zip(v.iter()))
        .map(|(&x, (&m, &v))| x - beta * (m / c1) / ((v / c2).sqrt() + eps))
        .collect();
    (Vector::from_raw(entries), AdamState { m, v })
}

/// The k-step interpolation update
/// `Σ_i α_i x^{(t−i)} − β Σ_i α_i g^{(t−i)}`.
pub fn interpolatron_step(
    history: &HistoryWindow,
    alphas: &MixingCoefficients,
    beta: f64,
) -> Result<Vector> {
    if alphas.mode() != MixingMode::Interpolation {
        return Err(Error::Precondition(
            "interpolatron_step requires interpolation-mode alphas".into(),
        ));
    }
    mixed_step(history, alphas, beta)
}

/// The interpolation update with arbitrary affine weights.
pub(crate) fn mixed_step(
    history: &HistoryWindow,
    alphas: &MixingCoefficients,
    beta: f64,
) -> Result<Vector> {
    if history.k() != alphas.len() {
        return Err(Error::LengthMismatch {
            expected: alphas.len(),
            actual: history.k(),
        });
    }
    let x = weighted_sum(alphas.as_slice(), history.iterates());
    let g = weighted_sum(alphas.as_slice(), history.gradients());
    Ok(x.sub_scaled(&g, beta))
}
