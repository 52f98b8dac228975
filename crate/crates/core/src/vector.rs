//! Dense parameter / gradient vectors.

use std::fmt;
use std::ops::Index;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mixing::MixingCoefficients;

/// An immutable dense vector of finite `f64` entries.
///
/// Cloning is cheap (the storage is shared); every arithmetic operation
/// returns a fresh vector.
#[derive(Clone, PartialEq)]
pub struct Vector {
    entries: Arc<[f64]>,
}

impl Vector {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self::from_raw(entries))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self::from_raw(vec![0.0; dim])
    }

    /// Wraps arithmetic output without re-validating it.
    ///
    /// Results of updates may overflow; the run loop checks
    /// [`Vector::is_finite`] and aborts on divergence.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        Self {
            entries: entries.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.entries.to_vec()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.entries.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.iter().zip(other.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                actual: self.dim(),
            })
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Vector {
        self.map(|a| c * a)
    }

    /// `self - step * direction`, evaluated entrywise as `x - (step * d)`.
    pub fn sub_scaled(&self, direction: &Vector, step: f64) -> Vector {
        self.zip_map(direction, |x, d| x - step * d)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector::from_raw(self.iter().map(|&a| f(a)).collect())
    }

    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Vector::from_raw(
            self.iter()
                .zip(other.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.entries[index]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter()).finish()
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Vector::new(entries)
    }
}

impl<'a> IntoIterator for &'a Vector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// `Σ_i α_i v_i`, componentwise.
pub fn linear_combination(coeffs: &MixingCoefficients, vectors: &[Vector]) -> Result<Vector> {
    if vectors.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            expected: coeffs.len(),
            actual: vectors.len(),
        });
    }
    let dim = vectors[0].dim();
    for v in vectors {
        v.ensure_dim(dim)?;
    }
    Ok(weighted_sum(coeffs.as_slice(), vectors.iter()))
}

/// Unchecked weighted sum. The accumulator starts from the first term so a
/// weight vector `(1, 0, ..)` reproduces its first input bit for bit.
pub(crate) fn weighted_sum<'a>(
    weights: &[f64],
    mut vectors: impl Iterator<Item = &'a Vector>,
) -> Vector {
    let first = vectors.next().expect("at least one vector");
    let mut acc: Vec<f64> = first.iter().map(|v| weights[0] * v).collect();
    for (w, v) in weights[1..].iter().zip(vectors) {
        for (a, x) in acc.iter_mut().zip(v.iter()) {
            *a += w * x;
        }
    }
    Vector::from_raw(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixing::MixingMode;
    use proptest::prelude::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            Vector::new(vec![f64::INFINITY]),
            Err(Error::NonFinite { index: 0, .. })
        ));
        assert_eq!(Vector::new(vec![]), Err(Error::EmptyVector));
    }

    #[test]
    fn combination_examples() {
        let one = MixingCoefficients::interpolation(vec![1.0]).unwrap();
        assert_eq!(linear_combination(&one, &[v(&[3.0, -2.0])]).unwrap(), v(&[3.0, -2.0]));

        let half = MixingCoefficients::interpolation(vec![0.5, 0.5]).unwrap();
        assert_eq!(linear_combination(&half, &[v(&[2.0]), v(&[4.0])]).unwrap(), v(&[3.0]));

        let c = MixingCoefficients::interpolation(vec![0.3, 0.7]).unwrap();
        let out = linear_combination(&c, &[v(&[2.0]), v(&[4.0])]).unwrap();
        assert!((out[0] - 3.4).abs() < 1e-15);
    }

    #[test]
    fn combination_rejects_mismatch() {
        let c = MixingCoefficients::interpolation(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            linear_combination(&c, &[v(&[1.0])]),
            Err(Error::LengthMismatch { expected: 2, actual: 1 })
        ));
        assert!(matches!(
            linear_combination(&c, &[v(&[1.0]), v(&[1.0, 2.0])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn affine_alphas() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-2.0f64..2.0, 1..5).prop_map(|mut a| {
            let s: f64 = a[1..].iter().sum();
            a[0] = 1.0 - s;
            a
        })
    }

    proptest! {
        #[test]
        fn combination_is_shift_equivariant(
            alphas in affine_alphas(),
            seed_vals in prop::collection::vec(-10.0f64..10.0, 12),
            shift in -5.0f64..5.0,
        ) {
            let k = alphas.len();
            let coeffs = MixingCoefficients::new(alphas, MixingMode::Affine).unwrap();
            let dim = 3;
            let vs: Vec<Vector> = (0..k)
                .map(|i| v(&seed_vals[i * dim..(i + 1) * dim]))
                .collect();
            let shifted: Vec<Vector> = vs.iter().map(|x| x.map(|e| e + shift)).collect();
            let base = linear_combination(&coeffs, &vs).unwrap();
            let moved = linear_combination(&coeffs, &shifted).unwrap();
            for i in 0..dim {
                prop_assert!((moved[i] - (base[i] + shift)).abs() <= 1e-12);
            }
        }
    }
}
