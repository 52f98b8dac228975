use crate::error::{invalid, Result};
use crate::rng;
use crate::vector::Vector;

/// Distance of each class centre from the origin.
pub const CENTER_SCALE: f64 = 2.0;

/// Gaussian clusters with balanced, interleaved labels (`label_i = i mod C`).
#[derive(Debug, Clone, PartialEq)]
pub struct BlobsDataset {
    pub points: Vec<Vector>,
    pub labels: Vec<usize>,
    pub classes: usize,
    pub seed: u64,
}

impl BlobsDataset {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn all_indices(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }
}

/// Centre of class `c`: `±CENTER_SCALE` on axis `c mod p`, sign flipping for
/// each further wrap around the axes.
pub fn class_center(c: usize, p: usize) -> Vector {
    let mut e = vec![0.0; p];
    let sign = if (c / p).is_multiple_of(2) { 1.0 } else { -1.0 };
    e[c % p] = sign * CENTER_SCALE;
    Vector::from_raw(e)
}

pub fn make_blobs(n: usize, p: usize, classes: usize, spread: f64, seed: u64) -> Result<BlobsDataset> {
    if n == 0 || p == 0 || classes == 0 {
        return Err(invalid("n/p/classes", "must be positive"));
    }
    if !n.is_multiple_of(classes) {
        return Err(invalid("n", format!("{n} is not divisible by {classes} classes")));
    }
    if !(spread >= 0.0 && spread.is_finite()) {
        return Err(invalid("spread", "must be nonnegative"));
    }
    let centers: Vec<Vector> = (0..classes).map(|c| class_center(c, p)).collect();
    let mut r = rng::seeded(seed);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % classes;
        let point = centers[label]
            .iter()
            .map(|c| c + spread * rng::standard_normal(&mut r))
            .collect();
        points.push(Vector::from_raw(point));
        labels.push(label);
    }
    Ok(BlobsDataset {
        points,
        labels,
        classes,
        seed,
    })
}
