//! Benchmark fixtures shared by the criterion benches.

use interpolatron::nets::{MlpArchitecture, MlpBlobsProblem};
use interpolatron::problems::make_blobs;
use interpolatron::rng::{seeded, standard_normal};
use interpolatron::{GradientBlock, HistoryWindow, Vector};

pub fn random_vector(d: usize, seed: u64) -> Vector {
    let mut rng = seeded(seed);
    Vector::new((0..d).map(|_| standard_normal(&mut rng)).collect()).expect("finite draws")
}

/// `k` random gradients of dimension `d`.
pub fn gradient_block(k: usize, d: usize, seed: u64) -> GradientBlock {
    GradientBlock::new((0..k as u64).map(|i| random_vector(d, seed + i)).collect()).expect("consistent dims")
}

pub fn history(k: usize, d: usize, seed: u64) -> HistoryWindow {
    let xs = (0..k as u64).map(|i| random_vector(d, seed + i)).collect();
    let gs = (0..k as u64).map(|i| random_vector(d, seed + 100 + i)).collect();
    HistoryWindow::new(xs, gs).expect("consistent dims")
}

/// The default (4, 16, 3) classifier on 300 training points.
pub fn mlp_problem() -> MlpBlobsProblem {
    let arch = MlpArchitecture::new(vec![4, 16, 3], 2e-4).expect("valid widths");
    let train = make_blobs(300, 4, 3, 1.0, 1).expect("valid blobs");
    let eval = make_blobs(150, 4, 3, 1.0, 2).expect("valid blobs");
    MlpBlobsProblem::new(arch, train, eval).expect("matching dims")
}
