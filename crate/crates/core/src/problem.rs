//! The objective abstraction consumed by the optimizers.

use rand::seq::index;

use crate::rng;
use crate::vector::Vector;

/// A differentiable objective `f(x) = (1/n) Σ f_i(x) (+ regularizer)`.
///
/// Implementations must be pure: every random choice flows through
/// `batch_seed` (or `seed` for [`Problem::initial_point`]).
pub trait Problem: Send + Sync {
    fn dim(&self) -> usize;

    /// Number of data terms `n`; analytic objectives report 1.
    fn num_samples(&self) -> usize {
        1
    }

    fn loss(&self, x: &Vector) -> f64;

    fn full_gradient(&self, x: &Vector) -> Vector;

    /// Mini-batch gradient over `batch_size` indices drawn without
    /// replacement from `batch_seed`. A batch covering the whole data set
    /// must return exactly [`Problem::full_gradient`].
    fn stochastic_gradient(&self, x: &Vector, batch_seed: u64, batch_size: usize) -> Vector {
        let _ = (batch_seed, batch_size);
        self.full_gradient(x)
    }

    /// Loss recorded in traces. Defaults to the training loss.
    fn eval_loss(&self, x: &Vector) -> f64 {
        self.loss(x)
    }

    /// Starting point `x^{(0)}` for a run with the given seed.
    fn initial_point(&self, seed: u64) -> Vector;
}

/// Sorted batch of `batch_size` distinct indices in `0..n`.
///
/// Returns `None` when the batch would cover every sample; callers then use
/// the full-data path so the result is bitwise identical to it.
pub fn sample_batch(n: usize, batch_size: usize, batch_seed: u64) -> Option<Vec<usize>> {
    assert!(batch_size > 0, "batch size must be positive");
    if batch_size >= n {
        return None;
    }
    let mut rng = rng::seeded(batch_seed);
    let mut idx = index::sample(&mut rng, n, batch_size).into_vec();
    idx.sort_unstable();
    Some(idx)
}

/// Steps per epoch, `⌈n / batch_size⌉`.
pub fn steps_per_epoch(n: usize, batch_size: usize) -> u64 {
    n.div_ceil(batch_size).max(1) as u64
}
