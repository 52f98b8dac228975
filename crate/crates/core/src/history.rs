//! The sliding window of past iterates and gradients.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::vector::Vector;

/// Last `k` iterates and the gradients evaluated at them, newest first.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryWindow {
    iterates: VecDeque<Vector>,
    gradients: VecDeque<Vector>,
}

impl HistoryWindow {
    /// Builds a window from newest-first sequences of equal length and dim.
    pub fn new(iterates: Vec<Vector>, gradients: Vec<Vector>) -> Result<Self> {
        if iterates.is_empty() {
            return Err(invalid("k", "history window needs at least one slot"));
        }
        if gradients.len() != iterates.len() {
            return Err(Error::LengthMismatch {
                expected: iterates.len(),
                actual: gradients.len(),
            });
        }
        let dim = iterates[0].dim();
        for v in iterates.iter().chain(gradients.iter()) {
            v.ensure_dim(dim)?;
        }
        Ok(Self {
            iterates: iterates.into(),
            gradients: gradients.into(),
        })
    }

    /// Every slot holds `(x, g)`.
    pub fn replicate(x: &Vector, g: &Vector, k: usize) -> Result<Self> {
        Self::new(vec![x.clone(); k], vec![g.clone(); k])
    }

    pub fn k(&self) -> usize {
        self.iterates.len()
    }

    pub fn dim(&self) -> usize {
        self.iterates[0].dim()
    }

    /// Prepends `(iterate, gradient)` and evicts the oldest pair.
    pub fn push(&mut self, iterate: Vector, gradient: Vector) -> Result<()> {
        iterate.ensure_dim(self.dim())?;
        gradient.ensure_dim(self.dim())?;
        self.iterates.pop_back();
        self.gradients.pop_back();
        self.iterates.push_front(iterate);
        self.gradients.push_front(gradient);
        Ok(())
    }

    pub fn iterates(&self) -> impl ExactSizeIterator<Item = &Vector> {
        self.iterates.iter()
    }

    pub fn gradients(&self) -> impl ExactSizeIterator<Item = &Vector> {
        self.gradients.iter()
    }

    /// Iterate `i` steps back (0 = newest).
    pub fn iterate(&self, i: usize) -> &Vector {
        &self.iterates[i]
    }

    pub fn gradient(&self, i: usize) -> &Vector {
        &self.gradients[i]
    }
}

/// How the slots before the first step are filled.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum HistoryInit {
    /// Past iterates equal `x0`; past gradients are zero.
    #[default]
    ReplicateZero,
    /// Past iterates and gradients drawn from a normal truncated at ±2σ.
    TruncatedNormal { stddev: f64, seed: u64 },
}

/// Window holding the `k` slots that precede `x0`.
///
/// The run loop pushes `(x0, g(x0))` before the first update, which evicts
/// the oldest of these slots; so `x^{(-1)} … x^{(-k+1)}` and their gradients
/// are the ones an update ever sees.
pub fn init_history(x0: &Vector, k: usize, strategy: HistoryInit) -> Result<HistoryWindow> {
    if k == 0 {
        return Err(invalid("k", "must be positive"));
    }
    match strategy {
        HistoryInit::ReplicateZero => HistoryWindow::replicate(x0, &Vector::zeros(x0.dim()), k),
        HistoryInit::TruncatedNormal { stddev, seed } => {
            if !(stddev > 0.0 && stddev.is_finite()) {
                return Err(invalid("stddev", "must be positive"));
            }
            let mut rng = rng::seeded(seed);
            let mut draw = || {
                Vector::from_raw(
                    (0..x0.dim())
                        .map(|_| rng::truncated_normal(&mut rng, stddev))
                        .collect(),
                )
            };
            let mut iterates = Vec::with_capacity(k);
            let mut gradients = Vec::with_capacity(k);
            for _ in 0..k {
                iterates.push(draw());
                gradients.push(draw());
            }
            HistoryWindow::new(iterates, gradients)
        }
    }
}
