//! Linear-rate theory for interpolation updates on strongly convex quadratics.
//!
//! With `J = I − βH`, the error `e^{(t)} = x^{(t)} − x*` obeys
//! `e^{(t)} = Σ α_i J e^{(t−i)}`. For a diagonal Hessian this decouples into
//! one `m × m` companion matrix per eigenvalue `h`, whose characteristic
//! polynomial is `λ^m − Σ α_i (1 − βh) λ^{m−i}`.

mod fit;
mod roots;

pub use fit::{fit_rate, RateFit, FIT_FLOOR, MIN_FIT_ENTRIES};
pub use roots::{lemma2_xi, max_modulus_root, polynomial_roots};

use crate::error::{invalid, Error, Result};
use crate::mixing::{MixingCoefficients, MixingMode};

pub type Matrix = Vec<Vec<f64>>;

/// One-step gradient-descent contraction `max(|1 − βμ|, |1 − βη|)`.
pub fn theta(beta: f64, mu: f64, eta: f64) -> f64 {
    (1.0 - beta * mu).abs().max((1.0 - beta * eta).abs())
}

/// History weights, step size and Hessian spectrum of a linear recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionSpec {
    alphas: MixingCoefficients,
    beta: f64,
    hessian_eigs: Vec<f64>,
}

impl CompanionSpec {
    pub fn new(alphas: MixingCoefficients, beta: f64, hessian_eigs: Vec<f64>) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid("beta", "must be positive"));
        }
        if hessian_eigs.is_empty() {
            return Err(invalid("hessian_eigs", "need at least one eigenvalue"));
        }
        if hessian_eigs.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(invalid("hessian_eigs", "eigenvalues must be positive"));
        }
        Ok(Self {
            alphas,
            beta,
            hessian_eigs,
        })
    }

    /// History length.
    pub fn m(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &MixingCoefficients {
        &self.alphas
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn hessian_eigs(&self) -> &[f64] {
        &self.hessian_eigs
    }

    fn eig(&self, index: usize) -> Result<f64> {
        self.hessian_eigs
            .get(index)
            .copied()
            .ok_or_else(|| invalid("eig_index", format!("{index} out of range for {} eigenvalues", self.hessian_eigs.len())))
    }
}

/// Top row `α_i (1 − βh)`, identity on the subdiagonal.
pub fn companion_matrix(spec: &CompanionSpec, eig_index: usize) -> Result<Matrix> {
    let j = 1.0 - spec.beta * spec.eig(eig_index)?;
    let m = spec.m();
    let mut a = vec![vec![0.0; m]; m];
    for (i, alpha) in spec.alphas.as_slice().iter().enumerate() {
        a[0][i] = alpha * j;
    }
    for i in 1..m {
        a[i][i - 1] = 1.0;
    }
    Ok(a)
}

/// Leading-first coefficients of `λ^m − Σ α_i (1 − βh) λ^{m−i}`.
pub fn characteristic_coeffs(spec: &CompanionSpec, eig_index: usize) -> Result<Vec<f64>> {
    let j = 1.0 - spec.beta * spec.eig(eig_index)?;
    let mut c = Vec::with_capacity(spec.m() + 1);
    c.push(1.0);
    c.extend(spec.alphas.as_slice().iter().map(|a| -a * j));
    Ok(c)
}

/// The `md × md` block companion matrix for a dense symmetric Hessian: block
/// row `α_i (I − βH)` on top, identity blocks on the subdiagonal.
pub fn block_companion_matrix(alphas: &MixingCoefficients, beta: f64, hessian: &Matrix) -> Result<Matrix> {
    let d = hessian.len();
    if d == 0 || hessian.iter().any(|row| row.len() != d) {
        return Err(invalid("hessian", "must be a non-empty square matrix"));
    }
    let m = alphas.len();
    let mut a = vec![vec![0.0; m * d]; m * d];
    for (i, alpha) in alphas.as_slice().iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                let identity = if r == c { 1.0 } else { 0.0 };
                a[r][i * d + c] = alpha * (identity - beta * hessian[r][c]);
            }
        }
    }
    for i in 1..m {
        for r in 0..d {
            a[i * d + r][(i - 1) * d + r] = 1.0;
        }
    }
    Ok(a)
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| (0..inner).map(|k| row[k] * b[k][c]).sum())
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn frobenius_norm(a: &Matrix) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

/// A certified linear rate: `‖e^{(t)}‖ ≤ d0 · ξ^t · ‖e_0‖` for the stacked
/// error `e_0` of the first `m` slots.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCertificate {
    pub xi: f64,
    pub d0: f64,
    pub theta: f64,
    pub spectral_radius: f64,
}

/// Cap on the powers inspected when bounding `sup_t ‖A^t‖ / ξ^t`.
const MAX_POWERS: usize = 100_000;

/// `sup_t ‖A^t‖_F / ξ^t`, scanning powers until the ratio has decayed well
/// below its running maximum.
fn transient_constant(a: &Matrix, xi: f64) -> f64 {
    let m = a.len();
    let mut power: Matrix = (0..m)
        .map(|r| (0..m).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut best = frobenius_norm(&power);
    let mut scale = 1.0;
    for t in 1..=MAX_POWERS {
        power = mat_mul(a, &power);
        scale *= xi;
        let ratio = frobenius_norm(&power) / scale;
        best = best.max(ratio);
        if t >= 4 * m && ratio < 1e-6 * best {
            break;
        }
        if !scale.is_normal() {
            break;
        }
    }
    best
}

/// Certifies the rate of the decoupled recursion for every listed eigenvalue.
///
/// `spectral_radius` is the largest root modulus across eigenvalues,
/// `xi = (spectral_radius + 1)/2`, and `d0 = max_h sup_t ‖A_h^t‖_F / ξ^t`.
pub fn certify(spec: &CompanionSpec, mu: f64, eta: f64) -> Result<RateCertificate> {
    if !(mu > 0.0 && eta >= mu) {
        return Err(invalid("mu/eta", "need 0 < mu <= eta"));
    }
    let th = theta(spec.beta, mu, eta);
    if th >= 1.0 {
        return Err(Error::NoCertificate { theta: th });
    }
    if spec.alphas.mode() != MixingMode::Interpolation {
        return Err(Error::Precondition("certificates need interpolation-mode alphas".into()));
    }
    if let Some(h) = spec.hessian_eigs.iter().find(|h| !(mu..=eta).contains(*h)) {
        return Err(Error::Precondition(format!("eigenvalue {h} outside [{mu}, {eta}]")));
    }

    let mut spectral_radius: f64 = 0.0;
    for i in 0..spec.hessian_eigs.len() {
        spectral_radius = spectral_radius.max(max_modulus_root(&characteristic_coeffs(spec, i)?)?);
    }
    if spectral_radius >= 1.0 {
        return Err(Error::Precondition(format!("spectral radius {spectral_radius} is not below 1")));
    }
    let xi = (spectral_radius + 1.0) / 2.0;
    let mut d0: f64 = 0.0;
    for i in 0..spec.hessian_eigs.len() {
        d0 = d0.max(transient_constant(&companion_matrix(spec, i)?, xi));
    }
    Ok(RateCertificate {
        xi,
        d0,
        theta: th,
        spectral_radius,
    })
}
