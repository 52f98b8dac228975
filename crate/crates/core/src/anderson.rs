//! Data-driven mixing coefficients.
//!
//! Anderson mixing picks the affine weights that minimise the norm of the
//! combined gradient `‖Σ α_i g^{(t−i)}‖²` subject to `Σ α_i = 1`. With the
//! `k × k` Gram matrix `M_ij = ⟨g^{(t−i)}, g^{(t−j)}⟩` the minimiser is
//! `α = M⁻¹1 / (1ᵀM⁻¹1)`. The system is regularised with a ridge scaled by
//! `tr(M)/k`, which keeps α invariant to a global rescaling of the gradients.
//!
//! For `k = 2` the interpolation-constrained problem (α on the simplex) has
//! a closed form: minimise over the scalar `α_2` and clamp to `[0, 1]`.

use crate::error::{invalid, Error, Result};
use crate::history::HistoryWindow;
use crate::mixing::{MixingCoefficients, MixingMode};
use crate::optim::mixed_step;
use crate::vector::Vector;

/// Ridge applied to the Gram system, relative to `tr(M)/k`.
pub const DEFAULT_RIDGE: f64 = 1e-10;

/// Pivot magnitude, relative to `tr(M)`, below which the (shifted) Gram
/// system counts as rank deficient. The default ridge sits below this, so a
/// degenerate block falls back rather than returning a noise-dominated
/// solve; a larger ridge regularises it instead.
const PIVOT_TOL: f64 = 1e-8;

/// Squared difference norm below which the two-step problem is degenerate.
const DEGENERATE_DIFF: f64 = 1e-24;

/// Gradients `g^{(t−1)}, …, g^{(t−k)}`, newest first.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientBlock {
    gradients: Vec<Vector>,
}

impl GradientBlock {
    pub fn new(gradients: Vec<Vector>) -> Result<Self> {
        let first = gradients
            .first()
            .ok_or_else(|| invalid("gradients", "block needs at least one gradient"))?;
        let dim = first.dim();
        for g in &gradients {
            g.ensure_dim(dim)?;
        }
        Ok(Self { gradients })
    }

    pub fn from_history(history: &HistoryWindow) -> Self {
        Self {
            gradients: history.gradients().cloned().collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.gradients.len()
    }

    pub fn gradients(&self) -> &[Vector] {
        &self.gradients
    }

    /// `Σ α_i g_i`.
    pub fn combine(&self, alphas: &[f64]) -> Vector {
        crate::vector::weighted_sum(alphas, self.gradients.iter())
    }
}

/// Pairwise inner products `M_ij = ⟨g_i, g_j⟩` (row-major, `k × k`).
pub fn gram_matrix(block: &GradientBlock) -> Vec<Vec<f64>> {
    let k = block.k();
    let g = block.gradients();
    let mut m = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let d = g[i].dot(&g[j]);
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    m
}

/// Result of [`anderson_mixing`].
#[derive(Debug, Clone, PartialEq)]
pub struct AndersonMixing {
    pub alphas: MixingCoefficients,
    /// The Gram system could not be solved; `alphas` is uniform.
    pub fallback: bool,
}

/// Affine least-squares weights over the block.
pub fn anderson_mixing(block: &GradientBlock, ridge: f64) -> Result<AndersonMixing> {
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(invalid("ridge", "must be nonnegative"));
    }
    let k = block.k();
    if k == 1 {
        return Ok(AndersonMixing {
            alphas: MixingCoefficients::newest(1, MixingMode::Affine),
            fallback: false,
        });
    }
    let fallback = || AndersonMixing {
        alphas: MixingCoefficients::uniform(k, MixingMode::Affine),
        fallback: true,
    };

    let mut m = gram_matrix(block);
    let trace: f64 = (0..k).map(|i| m[i][i]).sum();
    if !(trace > 0.0 && trace.is_finite()) {
        return Ok(fallback());
    }
    let shift = ridge * trace / k as f64;
    for (i, row) in m.iter_mut().enumerate() {
        row[i] += shift;
    }
    let Some(w) = solve_pivoted(m, vec![1.0; k], PIVOT_TOL * trace) else {
        return Ok(fallback());
    };
    let total: f64 = w.iter().sum();
    if !(total.is_finite() && total != 0.0) {
        return Ok(fallback());
    }
    match MixingCoefficients::affine(w.iter().map(|wi| wi / total).collect()) {
        Ok(alphas) => Ok(AndersonMixing {
            alphas,
            fallback: false,
        }),
        Err(_) => Ok(fallback()),
    }
}

/// Gaussian elimination with partial pivoting. `None` when a pivot falls
/// below `pivot_floor` in magnitude.
fn solve_pivoted(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, pivot_floor: f64) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if !(a[pivot_row][col].abs() > pivot_floor) {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let (done, rest) = a.split_at_mut(col + 1);
        let pivot = &done[col];
        for (offset, r) in rest.iter_mut().enumerate() {
            let row = col + 1 + offset;
            let factor = r[col] / pivot[col];
            if factor == 0.0 {
                continue;
            }
            for (rc, pc) in r[col..].iter_mut().zip(&pivot[col..]) {
                *rc -= factor * pc;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Two-step weights `(1 − α_2, α_2)` with `α_2` minimising
/// `‖(1−α_2) g_new + α_2 g_old‖²` and clamped to `[0, 1]`.
pub fn projected_mixing_k2(g_new: &Vector, g_old: &Vector) -> Result<MixingCoefficients> {
    g_old.ensure_dim(g_new.dim())?;
    let diff = g_new.sub(g_old);
    let denom = diff.norm_squared();
    if denom < DEGENERATE_DIFF {
        return Ok(MixingCoefficients::newest(2, MixingMode::Interpolation));
    }
    let a2 = (g_new.dot(&diff) / denom).clamp(0.0, 1.0);
    MixingCoefficients::interpolation(vec![1.0 - a2, a2])
}

/// Chooses α from the window's gradients and applies the k-step update.
/// Returns the new iterate and the weights used.
pub fn anderson_step(
    history: &HistoryWindow,
    beta: f64,
    ridge: f64,
    projected: bool,
) -> Result<(Vector, MixingCoefficients)> {
    let alphas = if projected {
        if history.k() != 2 {
            return Err(Error::Precondition(format!(
                "projected Anderson needs k = 2, got k = {}",
                history.k()
            )));
        }
        projected_mixing_k2(history.gradient(0), history.gradient(1))?
    } else {
        anderson_mixing(&GradientBlock::from_history(history), ridge)?.alphas
    };
    let next = mixed_step(history, &alphas, beta)?;
    Ok((next, alphas))
}
