//! Polynomial roots by simultaneous (Aberth) iteration, and the real-root
//! bisection used for the comparison-polynomial bound.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::rng;

const STEP_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 500;
const INIT_SEED: u64 = 0x005e_ed0f_a6e7;

/// Horner evaluation of `p` and `p'` for leading-first coefficients.
fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = coeffs[0];
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// All complex roots of `coeffs[0] λ^n + … + coeffs[n]`.
///
/// Exact trailing zeros are factored out as roots at the origin. Converges
/// when every correction is below `1e-12` (relative to `max(1, |z|)`); the
/// result is accepted only if each root leaves `|p(λ)| < 1e-8 · max|coeff|`.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    if coeffs.len() < 2 {
        return Err(invalid("coeffs", "degree must be at least 1"));
    }
    if coeffs[0] == 0.0 {
        return Err(invalid("coeffs", "leading coefficient must be nonzero"));
    }
    if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
        return Err(invalid("coeffs", format!("coefficients must be finite, got {c}")));
    }

    let zeros_at_origin = coeffs.iter().rev().take_while(|&&c| c == 0.0).count();
    let reduced = &coeffs[..coeffs.len() - zeros_at_origin];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    let n = reduced.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(Complex64::new(-reduced[1] / reduced[0], 0.0));
        return Ok(roots);
    }

    let monic: Vec<Complex64> = reduced.iter().map(|c| Complex64::new(c / reduced[0], 0.0)).collect();
    // Start on a circle with the geometric-mean root modulus, rotated and
    // jittered so no start sits on a symmetry axis.
    let radius = monic[n].norm().powf(1.0 / n as f64).max(f64::MIN_POSITIVE.sqrt());
    let mut r = rng::seeded(INIT_SEED);
    let offset: f64 = r.random_range(0.1..0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| {
            let jitter: f64 = r.random_range(0.9..1.1);
            let angle = std::f64::consts::TAU * (j as f64 + offset) / n as f64;
            Complex64::from_polar(radius * jitter, angle)
        })
        .collect();

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut max_step: f64 = 0.0;
        for j in 0..n {
            let (p, dp) = eval_with_derivative(&monic, z[j]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&k| k != j).map(|k| (z[j] - z[k]).inv()).sum();
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if step.is_finite() {
                z[j] -= step;
                max_step = max_step.max(step.norm() / z[j].norm().max(1.0));
            }
        }
        if max_step <= STEP_TOL {
            break;
        }
    }

    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let residual = z.iter().map(|&zj| eval(coeffs, zj).norm()).fold(0.0, f64::max);
    // Multiple roots converge only linearly, so the residual is the arbiter.
    if !(residual < RESIDUAL_TOL * scale) {
        return Err(Error::RootsNotConverged { iterations, residual });
    }
    roots.extend(z);
    Ok(roots)
}

/// `max |λ|` over the complex roots of the polynomial.
pub fn max_modulus_root(coeffs: &[f64]) -> Result<f64> {
    Ok(polynomial_roots(coeffs)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// For `p(x) = |ρ| x^m − Σ_{i=1}^m |ρ_i| x^{m−i}`, finds the unique root
/// `ζ ∈ [0, 1)` by bisection and returns `ξ = (ζ + 1)/2`.
///
/// Requires `|ρ| > Σ |ρ_i|`.
pub fn lemma2_xi(rho: f64, rhos: &[f64]) -> Result<f64> {
    if rhos.is_empty() {
        return Err(invalid("rhos", "need at least one coefficient"));
    }
    if !rho.is_finite() || rhos.iter().any(|r| !r.is_finite()) {
        return Err(invalid("rho", "coefficients must be finite"));
    }
    let lead = rho.abs();
    let tail: f64 = rhos.iter().map(|r| r.abs()).sum();
    if !(lead > tail) {
        return Err(Error::Precondition(format!(
            "need |rho| > sum |rho_i|, got {lead} <= {tail}"
        )));
    }
    let m = rhos.len() as i32;
    let p = |x: f64| {
        lead * x.powi(m)
            - rhos
                .iter()
                .enumerate()
                .map(|(i, r)| r.abs() * x.powi(m - 1 - i as i32))
                .sum::<f64>()
    };
    // p(x)/x^m is increasing on (0, ∞), so p has one sign change in [0, 1].
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if p(lo) > 0.0 {
        return Ok(0.5);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi + 1.0) / 2.0)
}
