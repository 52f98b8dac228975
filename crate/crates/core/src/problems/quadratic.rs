use crate::error::{invalid, Error, Result};
use crate::problem::Problem;
use crate::vector::Vector;

/// `f(x) = ½ Σ h_i (x_i − x*_i)²` with a positive diagonal Hessian.
///
/// `μ = min h_i` and `η = max h_i` are its strong-convexity and smoothness
/// constants.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    diag_hessian: Vec<f64>,
    optimum: Vector,
    start: Vector,
}

impl QuadraticProblem {
    pub fn new(diag_hessian: Vec<f64>, optimum: Vector, start: Vector) -> Result<Self> {
        if diag_hessian.is_empty() {
            return Err(invalid("diag_hessian", "needs at least one eigenvalue"));
        }
        if let Some(h) = diag_hessian.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(invalid("diag_hessian", format!("eigenvalues must be positive, got {h}")));
        }
        optimum.ensure_dim(diag_hessian.len())?;
        start.ensure_dim(diag_hessian.len())?;
        Ok(Self {
            diag_hessian,
            optimum,
            start,
        })
    }

    /// `d` eigenvalues log-spaced from `mu` to `eta` inclusive.
    pub fn log_spaced(mu: f64, eta: f64, d: usize) -> Result<Vec<f64>> {
        if !(mu > 0.0 && eta >= mu) {
            return Err(invalid("mu/eta", "need 0 < mu <= eta"));
        }
        if d == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        if d == 1 {
            return Ok(vec![mu]);
        }
        let (lo, hi) = (mu.ln(), eta.ln());
        Ok((0..d)
            .map(|i| {
                if i == d - 1 {
                    eta
                } else {
                    (lo + (hi - lo) * i as f64 / (d - 1) as f64).exp()
                }
            })
            .collect())
    }

    pub fn diag_hessian(&self) -> &[f64] {
        &self.diag_hessian
    }

    pub fn optimum(&self) -> &Vector {
        &self.optimum
    }

    pub fn start(&self) -> &Vector {
        &self.start
    }

    pub fn mu(&self) -> f64 {
        self.diag_hessian.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn eta(&self) -> f64 {
        self.diag_hessian.iter().copied().fold(0.0, f64::max)
    }

    /// `‖x − x*‖`.
    pub fn distance(&self, x: &Vector) -> f64 {
        x.sub(&self.optimum).norm()
    }

    /// `H u` for the diagonal Hessian.
    pub fn hessian_apply(&self, u: &Vector) -> Result<Vector> {
        if u.dim() != self.diag_hessian.len() {
            return Err(Error::DimensionMismatch {
                expected: self.diag_hessian.len(),
                actual: u.dim(),
            });
        }
        Ok(Vector::from_raw(
            u.iter().zip(&self.diag_hessian).map(|(u, h)| h * u).collect(),
        ))
    }
}

impl Problem for QuadraticProblem {
    fn dim(&self) -> usize {
        self.diag_hessian.len()
    }

    fn loss(&self, x: &Vector) -> f64 {
        0.5 * x
            .iter()
            .zip(self.optimum.iter())
            .zip(&self.diag_hessian)
            .map(|((x, o), h)| h * (x - o) * (x - o))
            .sum::<f64>()
    }

    fn full_gradient(&self, x: &Vector) -> Vector {
        Vector::from_raw(
            x.iter()
                .zip(self.optimum.iter())
                .zip(&self.diag_hessian)
                .map(|((x, o), h)| h * (x - o))
                .collect(),
        )
    }

    fn initial_point(&self, _seed: u64) -> Vector {
        self.start.clone()
    }
}
