//! A small rectifier MLP with hand-derived backpropagation.
//!
//! Parameters are one flat vector. Each layer stores its weights row-major
//! (`out × in`) followed by its biases. The loss is the mean softmax
//! cross-entropy of the batch plus `λ‖params‖²`.

use crate::error::{invalid, Result};
use crate::problem::{sample_batch, Problem};
use crate::problems::BlobsDataset;
use crate::rng;
use crate::vector::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct MlpArchitecture {
    widths: Vec<usize>,
    weight_decay: f64,
}

impl MlpArchitecture {
    /// `widths = [input, hidden…, classes]`.
    pub fn new(widths: Vec<usize>, weight_decay: f64) -> Result<Self> {
        if widths.len() < 2 {
            return Err(invalid("layer_widths", "need at least input and output widths"));
        }
        if widths.contains(&0) {
            return Err(invalid("layer_widths", "widths must be positive"));
        }
        if !(weight_decay >= 0.0 && weight_decay.is_finite()) {
            return Err(invalid("weight_decay", "must be nonnegative"));
        }
        Ok(Self { widths, weight_decay })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn weight_decay(&self) -> f64 {
        self.weight_decay
    }

    pub fn num_layers(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn classes(&self) -> usize {
        *self.widths.last().expect("non-empty")
    }

    /// `Σ (w_i·w_{i+1} + w_{i+1})`.
    pub fn param_count(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// Offsets of (weights, biases) for layer `l`.
    fn layer_offsets(&self, l: usize) -> (usize, usize) {
        let start: usize = self.widths[..=l].windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        (start, start + self.widths[l] * self.widths[l + 1])
    }

    /// Variance-scaling init: weights `N(0, 2/fan_in)`, zero biases.
    pub fn init_params(&self, seed: u64) -> Vector {
        let mut r = rng::seeded(seed);
        let mut params = vec![0.0; self.param_count()];
        for l in 0..self.num_layers() {
            let (w_off, b_off) = self.layer_offsets(l);
            let std = (2.0 / self.widths[l] as f64).sqrt();
            for p in &mut params[w_off..b_off] {
                *p = std * rng::standard_normal(&mut r);
            }
        }
        Vector::from_raw(params)
    }

    fn check(&self, params: &Vector, data: &BlobsDataset) -> Result<()> {
        params.ensure_dim(self.param_count())?;
        if data.input_dim() != self.widths[0] {
            return Err(invalid("layer_widths", "input width does not match the data"));
        }
        if data.classes > self.classes() {
            return Err(invalid("layer_widths", "fewer outputs than classes"));
        }
        Ok(())
    }

    /// Pre-activations of every layer for one input.
    fn forward(&self, params: &[f64], input: &[f64]) -> Vec<Vec<f64>> {
        let mut pre = Vec::with_capacity(self.num_layers());
        let mut act: Vec<f64> = input.to_vec();
        for l in 0..self.num_layers() {
            let (w_off, b_off) = self.layer_offsets(l);
            let (n_in, n_out) = (self.widths[l], self.widths[l + 1]);
            let z: Vec<f64> = (0..n_out)
                .map(|o| {
                    let row = &params[w_off + o * n_in..w_off + (o + 1) * n_in];
                    params[b_off + o] + row.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>()
                })
                .collect();
            act = if l + 1 < self.num_layers() {
                z.iter().map(|&v| relu(v)).collect()
            } else {
                Vec::new()
            };
            pre.push(z);
        }
        pre
    }
}

fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Softmax probabilities and `−log p_label`, computed with max-subtraction.
fn softmax_xent(logits: &[f64], label: usize) -> (Vec<f64>, f64) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let loss = total.ln() - (logits[label] - max);
    (exps.iter().map(|e| e / total).collect(), loss)
}

/// Mean cross-entropy over `batch` plus `λ‖params‖²`.
pub fn mlp_loss(arch: &MlpArchitecture, params: &Vector, data: &BlobsDataset, batch: &[usize]) -> Result<f64> {
    arch.check(params, data)?;
    if batch.is_empty() {
        return Err(invalid("batch", "must not be empty"));
    }
    let p = params.as_slice();
    let xent: f64 = batch
        .iter()
        .map(|&i| {
            let pre = arch.forward(p, data.points[i].as_slice());
            softmax_xent(pre.last().expect("output layer"), data.labels[i]).1
        })
        .sum();
    Ok(xent / batch.len() as f64 + arch.weight_decay * params.norm_squared())
}

/// Exact gradient of [`mlp_loss`] by backpropagation.
pub fn mlp_gradient(arch: &MlpArchitecture, params: &Vector, data: &BlobsDataset, batch: &[usize]) -> Result<Vector> {
    arch.check(params, data)?;
    if batch.is_empty() {
        return Err(invalid("batch", "must not be empty"));
    }
    let p = params.as_slice();
    let scale = 1.0 / batch.len() as f64;
    let mut grad = vec![0.0; p.len()];
    let layers = arch.num_layers();

    for &i in batch {
        let input = data.points[i].as_slice();
        let pre = arch.forward(p, input);
        let (probs, _) = softmax_xent(&pre[layers - 1], data.labels[i]);
        let mut delta: Vec<f64> = probs;
        delta[data.labels[i]] -= 1.0;

        for l in (0..layers).rev() {
            let (w_off, b_off) = arch.layer_offsets(l);
            let (n_in, n_out) = (arch.widths[l], arch.widths[l + 1]);
            let act_in: Vec<f64> = if l == 0 {
                input.to_vec()
            } else {
                pre[l - 1].iter().map(|&v| relu(v)).collect()
            };
            for o in 0..n_out {
                let d = scale * delta[o];
                grad[b_off + o] += d;
                for (g, a) in grad[w_off + o * n_in..w_off + (o + 1) * n_in].iter_mut().zip(&act_in) {
                    *g += d * a;
                }
            }
            if l > 0 {
                // Rectifier derivative at exactly 0 is taken as 0.
                delta = (0..n_in)
                    .map(|j| {
                        if pre[l - 1][j] > 0.0 {
                            (0..n_out).map(|o| p[w_off + o * n_in + j] * delta[o]).sum()
                        } else {
                            0.0
                        }
                    })
                    .collect();
            }
        }
    }
    let decay = 2.0 * arch.weight_decay;
    for (g, w) in grad.iter_mut().zip(p) {
        *g += decay * w;
    }
    Ok(Vector::from_raw(grad))
}

/// Central differences `(f(x + h e_i) − f(x − h e_i)) / 2h`.
pub fn finite_difference_gradient(loss: impl Fn(&Vector) -> f64, x: &Vector, step: f64) -> Result<Vector> {
    if !(step > 0.0) {
        return Err(invalid("step", "must be positive"));
    }
    let mut out = Vec::with_capacity(x.dim());
    let mut probe = x.to_vec();
    for i in 0..x.dim() {
        let orig = probe[i];
        probe[i] = orig + step;
        let up = loss(&Vector::from_raw(probe.clone()));
        probe[i] = orig - step;
        let down = loss(&Vector::from_raw(probe.clone()));
        probe[i] = orig;
        out.push((up - down) / (2.0 * step));
    }
    Ok(Vector::from_raw(out))
}

/// Training objective on a blobs data set with a held-out evaluation split.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpBlobsProblem {
    pub arch: MlpArchitecture,
    pub train: BlobsDataset,
    pub eval: BlobsDataset,
    all_train: Vec<usize>,
    all_eval: Vec<usize>,
}

impl MlpBlobsProblem {
    pub fn new(arch: MlpArchitecture, train: BlobsDataset, eval: BlobsDataset) -> Result<Self> {
        let probe = arch.init_params(0);
        arch.check(&probe, &train)?;
        arch.check(&probe, &eval)?;
        Ok(Self {
            all_train: train.all_indices(),
            all_eval: eval.all_indices(),
            arch,
            train,
            eval,
        })
    }
}

impl Problem for MlpBlobsProblem {
    fn dim(&self) -> usize {
        self.arch.param_count()
    }

    fn num_samples(&self) -> usize {
        self.train.len()
    }

    fn loss(&self, x: &Vector) -> f64 {
        mlp_loss(&self.arch, x, &self.train, &self.all_train).expect("validated at construction")
    }

    fn full_gradient(&self, x: &Vector) -> Vector {
        mlp_gradient(&self.arch, x, &self.train, &self.all_train).expect("validated at construction")
    }

    fn stochastic_gradient(&self, x: &Vector, batch_seed: u64, batch_size: usize) -> Vector {
        match sample_batch(self.train.len(), batch_size, batch_seed) {
            None => self.full_gradient(x),
            Some(batch) => mlp_gradient(&self.arch, x, &self.train, &batch).expect("validated at construction"),
        }
    }

    fn eval_loss(&self, x: &Vector) -> f64 {
        mlp_loss(&self.arch, x, &self.eval, &self.all_eval).expect("validated at construction")
    }

    fn initial_point(&self, seed: u64) -> Vector {
        self.arch.init_params(seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_blobs;
    use proptest::prelude::*;

    fn data() -> BlobsDataset {
        make_blobs(30, 4, 3, 1.0, 5).unwrap()
    }

    #[test]
    fn param_count() {
        let a = MlpArchitecture::new(vec![4, 8, 3], 0.0).unwrap();
        assert_eq!(a.param_count(), 4 * 8 + 8 + 8 * 3 + 3);
        assert_eq!(a.layer_offsets(1), (40, 40 + 24));
        assert!(MlpArchitecture::new(vec![4], 0.0).is_err());
    }

    #[test]
    fn zero_params_give_log_classes() {
        let a = MlpArchitecture::new(vec![4, 8, 3], 0.0).unwrap();
        let loss = mlp_loss(&a, &Vector::zeros(a.param_count()), &data(), &[0, 1, 2, 7]).unwrap();
        assert!((loss - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn weight_decay_term() {
        let d = data();
        let plain = MlpArchitecture::new(vec![4, 8, 3], 0.0).unwrap();
        let decayed = MlpArchitecture::new(vec![4, 8, 3], 2e-4).unwrap();
        let n = plain.param_count() as f64;
        // every entry 10/√n, so ‖params‖² = 100
        let params = Vector::new(vec![10.0 / n.sqrt(); plain.param_count()]).unwrap();
        assert!((params.norm_squared() - 100.0).abs() < 1e-9);
        let batch = [0, 3, 4, 9];
        let a = mlp_loss(&plain, &params, &d, &batch).unwrap();
        let b = mlp_loss(&decayed, &params, &d, &batch).unwrap();
        assert!((b - a - 0.02).abs() < 1e-12);
    }

    #[test]
    fn duplicating_the_batch_keeps_the_mean() {
        let a = MlpArchitecture::new(vec![4, 8, 3], 1e-3).unwrap();
        let params = a.init_params(1);
        let d = data();
        let once = mlp_loss(&a, &params, &d, &[1, 2, 3]).unwrap();
        let twice = mlp_loss(&a, &params, &d, &[1, 2, 3, 1, 2, 3]).unwrap();
        assert!((once - twice).abs() < 1e-14);
    }

    #[test]
    fn dead_units_leave_only_decay() {
        let a = MlpArchitecture::new(vec![4, 8, 3], 0.05).unwrap();
        let d = data();
        let mut p = a.init_params(2).to_vec();
        let (w1, b1) = a.layer_offsets(0);
        // Hidden biases far negative: every rectifier is off for this data.
        for b in &mut p[b1..b1 + 8] {
            *b = -1e3;
        }
        let params = Vector::new(p).unwrap();
        let g = mlp_gradient(&a, &params, &d, &d.all_indices()).unwrap();
        let (w2, b2) = a.layer_offsets(1);
        for i in (w1..b1 + 8).chain(w2..b2) {
            assert_eq!(g[i], 2.0 * 0.05 * params[i], "coordinate {i}");
        }
    }

    #[test]
    fn single_layer_matches_closed_form() {
        let a = MlpArchitecture::new(vec![4, 3], 0.0).unwrap();
        let d = data();
        let params = a.init_params(9);
        let i = 4;
        let g = mlp_gradient(&a, &params, &d, &[i]).unwrap();
        let x = d.points[i].as_slice();
        let logits: Vec<f64> = (0..3)
            .map(|o| params[12 + o] + (0..4).map(|j| params[o * 4 + j] * x[j]).sum::<f64>())
            .collect();
        let total: f64 = logits.iter().map(|z| z.exp()).sum();
        for o in 0..3 {
            let r = logits[o].exp() / total - if o == d.labels[i] { 1.0 } else { 0.0 };
            assert!((g[12 + o] - r).abs() < 1e-14);
            for j in 0..4 {
                assert!((g[o * 4 + j] - r * x[j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn output_layer_gradient_is_outer_product() {
        let a = MlpArchitecture::new(vec![4, 8, 3], 0.0).unwrap();
        let d = data();
        let params = a.init_params(4);
        let i = 11;
        let g = mlp_gradient(&a, &params, &d, &[i]).unwrap();
        let pre = a.forward(params.as_slice(), d.points[i].as_slice());
        let hidden: Vec<f64> = pre[0].iter().map(|&v| relu(v)).collect();
        let (mut r, _) = softmax_xent(&pre[1], d.labels[i]);
        r[d.labels[i]] -= 1.0;
        let (w2, b2) = a.layer_offsets(1);
        for o in 0..3 {
            assert_eq!(g[b2 + o], r[o]);
            for j in 0..8 {
                assert_eq!(g[w2 + o * 8 + j], r[o] * hidden[j]);
            }
        }
    }

    #[test]
    fn finite_differences_examples() {
        let half_sq = |x: &Vector| 0.5 * x[0] * x[0];
        let g = finite_difference_gradient(half_sq, &Vector::new(vec![3.0]).unwrap(), 1e-6).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-9);

        let a = [0.5, -2.0, 3.25];
        let lin = |x: &Vector| x.iter().zip(&a).map(|(x, a)| x * a).sum::<f64>();
        for h in [1e-3, 0.5, 2.0] {
            let g = finite_difference_gradient(lin, &Vector::new(vec![1.0, 2.0, -1.0]).unwrap(), h).unwrap();
            for i in 0..3 {
                assert!((g[i] - a[i]).abs() < 1e-9);
            }
        }
        assert!(finite_difference_gradient(half_sq, &Vector::zeros(1), 0.0).is_err());
    }

    #[test]
    fn finite_differences_on_quadratic() {
        use crate::problems::QuadraticProblem;
        let q = QuadraticProblem::new(
            vec![0.1, 1.0, 3.0],
            Vector::new(vec![1.0, -2.0, 0.5]).unwrap(),
            Vector::zeros(3),
        )
        .unwrap();
        let x = Vector::new(vec![0.3, 0.7, -1.1]).unwrap();
        let fd = finite_difference_gradient(|v| q.loss(v), &x, 1e-6).unwrap();
        assert!(fd.max_abs_diff(&q.full_gradient(&x)) < 1e-6);
    }

    #[test]
    fn full_batch_stochastic_gradient_is_full_gradient() {
        let a = MlpArchitecture::new(vec![4, 8, 3], 2e-4).unwrap();
        let train = make_blobs(30, 4, 3, 1.0, 1).unwrap();
        let eval = make_blobs(15, 4, 3, 1.0, 2).unwrap();
        let prob = MlpBlobsProblem::new(a, train, eval).unwrap();
        let x = prob.initial_point(3);
        assert_eq!(prob.stochastic_gradient(&x, 77, 30), prob.full_gradient(&x));
        assert_eq!(prob.stochastic_gradient(&x, 77, 1000), prob.full_gradient(&x));
        assert_eq!(prob.stochastic_gradient(&x, 77, 8), prob.stochastic_gradient(&x, 77, 8));
        assert_ne!(prob.stochastic_gradient(&x, 77, 8), prob.stochastic_gradient(&x, 78, 8));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn loss_is_permutation_invariant(seed in any::<u64>(), perm in Just((0..12usize).collect::<Vec<_>>()).prop_shuffle()) {
            let a = MlpArchitecture::new(vec![4, 8, 3], 2e-4).unwrap();
            let d = data();
            let params = a.init_params(seed);
            let base: Vec<usize> = (0..12).collect();
            let l1 = mlp_loss(&a, &params, &d, &base).unwrap();
            let l2 = mlp_loss(&a, &params, &d, &perm).unwrap();
            prop_assert!((l1 - l2).abs() <= 1e-13 * l1.abs().max(1.0));
        }
    }
}
