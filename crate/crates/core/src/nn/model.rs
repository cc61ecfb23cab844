use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::FeatureSchema;
use crate::error::{Error, Result};

/// Probabilities are clamped to `[BCE_EPS, 1 - BCE_EPS]` inside the loss.
pub const BCE_EPS: f64 = 1e-7;

/// Fully connected layer, `weights` row-major `out_dim x in_dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Dense {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
        }
    }

    /// Xavier/Glorot uniform weights, zero bias.
    pub fn xavier<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let mut layer = Dense::zeros(in_dim, out_dim);
        for w in &mut layer.weights {
            *w = rng.gen_range(-limit..=limit);
        }
        layer
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.weights.chunks_exact(self.in_dim).zip(&self.bias).map(
            |(row, b)| row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + b,
        ));
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Encoder widths for an input of width `input_dim`: each hidden layer is
/// half (rounded up) the previous one, never narrower than 2.
pub fn layer_dims(input_dim: usize, hidden_layers: usize) -> Vec<usize> {
    let mut dims = vec![input_dim];
    for _ in 0..hidden_layers {
        let prev = *dims.last().unwrap();
        dims.push(prev.div_ceil(2).max(2));
    }
    dims
}

/// Under-complete denoising autoencoder with a per-feature softmax head.
///
/// The encoder maps `d -> ... -> e` through `tanh` layers; the decoder
/// mirrors it back to `d` and ends in raw logits, which are normalized by a
/// softmax over each feature's category block.
#[derive(Clone, Debug, PartialEq)]
pub struct AutoencoderModel {
    schema: FeatureSchema,
    layer_dims: Vec<usize>,
    layers: Vec<Dense>,
}

impl AutoencoderModel {
    /// Randomly initialized model with `hidden_layers` encoder layers.
    pub fn new<R: Rng + ?Sized>(
        schema: FeatureSchema,
        hidden_layers: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if !(1..=3).contains(&hidden_layers) {
            return Err(Error::Config(format!(
                "hidden_layers must be 1..=3, got {hidden_layers}"
            )));
        }
        let dims = layer_dims(schema.total_dim(), hidden_layers);
        let mut layers = Vec::with_capacity(2 * hidden_layers);
        for w in dims.windows(2) {
            layers.push(Dense::xavier(w[0], w[1], rng));
        }
        for w in dims.windows(2).rev() {
            layers.push(Dense::xavier(w[1], w[0], rng));
        }
        AutoencoderModel::from_parts(schema, dims, layers)
    }

    /// Assembles a model from explicit layers, checking every shape.
    pub fn from_parts(
        schema: FeatureSchema,
        layer_dims: Vec<usize>,
        layers: Vec<Dense>,
    ) -> Result<Self> {
        let d = schema.total_dim();
        if layer_dims.len() < 2 || layer_dims[0] != d {
            return Err(Error::SchemaMismatch(format!(
                "layer dims {layer_dims:?} do not start at input width {d}"
            )));
        }
        let code = *layer_dims.last().unwrap();
        if code >= d {
            return Err(Error::Config(format!(
                "autoencoder is not under-complete: code width {code} >= input width {d}"
            )));
        }
        let expected: Vec<(usize, usize)> = layer_dims
            .windows(2)
            .map(|w| (w[0], w[1]))
            .chain(layer_dims.windows(2).rev().map(|w| (w[1], w[0])))
            .collect();
        if layers.len() != expected.len() {
            return Err(Error::Config(format!(
                "expected {} layers, got {}",
                expected.len(),
                layers.len()
            )));
        }
        for (l, &(i, o)) in layers.iter().zip(&expected) {
            if l.in_dim != i
                || l.out_dim != o
                || l.weights.len() != i * o
                || l.bias.len() != o
            {
                return Err(Error::Config(format!(
                    "layer shape {}x{} does not match expected {i}x{o}",
                    l.in_dim, l.out_dim
                )));
            }
        }
        Ok(AutoencoderModel {
            schema,
            layer_dims,
            layers,
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    /// Encoder widths, input first, code last.
    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn code_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    fn check_input(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.schema.total_dim() {
            return Err(Error::Dimension {
                expected: self.schema.total_dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Per-feature category probabilities for input `v`.
    pub fn forward(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_input(v)?;
        let mut x = v.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&x, &mut next);
            if i != last {
                next.iter_mut().for_each(|z| *z = z.tanh());
            }
            std::mem::swap(&mut x, &mut next);
        }
        block_softmax(&self.schema, &mut x);
        Ok(x)
    }

    /// Forward pass keeping each layer's output (post-activation), with the
    /// final entry holding the softmax probabilities.
    fn forward_trace(&self, v: &[f64]) -> Vec<Vec<f64>> {
        let mut trace = Vec::with_capacity(self.layers.len() + 1);
        trace.push(v.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::new();
            layer.apply(trace.last().unwrap(), &mut out);
            if i != last {
                out.iter_mut().for_each(|z| *z = z.tanh());
            } else {
                block_softmax(&self.schema, &mut out);
            }
            trace.push(out);
        }
        trace
    }

    /// Loss and analytic gradients of `bce_loss(forward(v), target)` with
    /// respect to every weight and bias.
    pub fn gradients(&self, v: &[f64], target: &[f64]) -> Result<(f64, Gradients)> {
        let mut grads = Gradients::zeros_like(self);
        let loss = self.accumulate_gradients(v, target, &mut grads)?;
        Ok((loss, grads))
    }

    /// Adds the gradients for one example into `grads`; returns its loss.
    pub(crate) fn accumulate_gradients(
        &self,
        v: &[f64],
        target: &[f64],
        grads: &mut Gradients,
    ) -> Result<f64> {
        self.check_input(v)?;
        self.check_input(target)?;
        let trace = self.forward_trace(v);
        let probs = trace.last().unwrap();
        let loss = bce_loss(&self.schema, probs, target)?;

        // dL/dlogits through the clamp and the per-block softmax
        let mut delta = vec![0.0; probs.len()];
        for block in self.schema.blocks() {
            let c = block.len() as f64;
            let mut dot = 0.0;
            for j in block.clone() {
                let p = probs[j];
                let g = if p > BCE_EPS && p < 1.0 - BCE_EPS {
                    (-target[j] / p + (1.0 - target[j]) / (1.0 - p)) / c
                } else {
                    0.0
                };
                delta[j] = g;
                dot += p * g;
            }
            for j in block {
                delta[j] = probs[j] * (delta[j] - dot);
            }
        }

        for (l, layer) in self.layers.iter().enumerate().rev() {
            let input = &trace[l];
            let g = &mut grads.layers[l];
            for (o, &d) in delta.iter().enumerate() {
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (gw, x) in row.iter_mut().zip(input) {
                    *gw += d * x;
                }
            }
            if l == 0 {
                break;
            }
            // back through the tanh that produced `input`
            let mut prev = vec![0.0; layer.in_dim];
            for (o, &d) in delta.iter().enumerate() {
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += d * w;
                }
            }
            for (p, a) in prev.iter_mut().zip(input) {
                *p *= 1.0 - a * a;
            }
            delta = prev;
        }
        Ok(loss)
    }
}

/// Gradient buffers shaped like a model's layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl Gradients {
    pub fn zeros_like(model: &AutoencoderModel) -> Self {
        Gradients {
            layers: model
                .layers
                .iter()
                .map(|l| Dense::zeros(l.in_dim, l.out_dim))
                .collect(),
        }
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.layers {
            l.weights.iter_mut().chain(l.bias.iter_mut()).for_each(|g| *g *= s);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|g| g.is_finite()))
    }
}

/// In-place softmax over each feature block.
pub fn block_softmax(schema: &FeatureSchema, z: &mut [f64]) {
    for block in schema.blocks() {
        let s = &mut z[block];
        let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for x in s.iter_mut() {
            *x = (*x - max).exp();
            sum += *x;
        }
        s.iter_mut().for_each(|x| *x /= sum);
    }
}

/// Binary cross-entropy averaged within each feature and summed over
/// features.
pub fn bce_loss(schema: &FeatureSchema, predicted: &[f64], target: &[f64]) -> Result<f64> {
    let d = schema.total_dim();
    for len in [predicted.len(), target.len()] {
        if len != d {
            return Err(Error::Dimension {
                expected: d,
                found: len,
            });
        }
    }
    Ok(schema
        .blocks()
        .map(|block| {
            let c = block.len() as f64;
            block
                .map(|j| {
                    let p = predicted[j].clamp(BCE_EPS, 1.0 - BCE_EPS);
                    let y = target[j];
                    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
                })
                .sum::<f64>()
                / c
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Feature, FeatureSchema};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn schema(counts: &[usize]) -> FeatureSchema {
        FeatureSchema::new(
            counts
                .iter()
                .enumerate()
                .map(|(i, &c)| Feature {
                    name: format!("f{i}"),
                    categories: (0..c).map(|j| format!("v{j}")).collect(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn halving_dims() {
        assert_eq!(layer_dims(45, 1), vec![45, 23]);
        assert_eq!(layer_dims(100, 3), vec![100, 50, 25, 13]);
        assert_eq!(layer_dims(5, 3), vec![5, 3, 2, 2]);
    }

    #[test]
    fn rejects_over_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(AutoencoderModel::new(schema(&[2]), 1, &mut rng).is_err());
        assert!(AutoencoderModel::new(schema(&[3]), 1, &mut rng).is_ok());
        assert!(AutoencoderModel::new(schema(&[3, 3]), 4, &mut rng).is_err());
    }

    #[test]
    fn single_category_block_is_certain() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = AutoencoderModel::new(schema(&[1, 3, 2]), 1, &mut rng).unwrap();
        let p = m.forward(&[1.0, 0.2, 0.5, 0.1, 0.9, 0.0]).unwrap();
        assert_eq!(p[0], 1.0);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = AutoencoderModel::new(schema(&[2, 3]), 1, &mut rng).unwrap();
        assert!(matches!(
            m.forward(&[0.0; 4]),
            Err(Error::Dimension { expected: 5, found: 4 })
        ));
    }

    #[test]
    fn bce_hand_case() {
        let s = schema(&[2]);
        let loss = bce_loss(&s, &[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(loss, std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn bce_perfect_reconstruction_is_near_zero() {
        let s = schema(&[2, 3]);
        let target = [0.0, 1.0, 0.0, 0.0, 1.0];
        let loss = bce_loss(&s, &target, &target).unwrap();
        let bound = 2.0 * 3.0 * -(1.0 - BCE_EPS).ln();
        assert!(loss <= bound + 1e-12, "{loss}");
        assert!(loss >= 0.0);
    }

    #[test]
    fn bce_is_order_invariant() {
        let a = schema(&[2, 3]);
        let b = schema(&[3, 2]);
        let pa = [0.3, 0.7, 0.2, 0.5, 0.3];
        let ya = [0.0, 1.0, 0.0, 0.0, 1.0];
        let pb = [0.2, 0.5, 0.3, 0.3, 0.7];
        let yb = [0.0, 0.0, 1.0, 0.0, 1.0];
        assert_abs_diff_eq!(
            bce_loss(&a, &pa, &ya).unwrap(),
            bce_loss(&b, &pb, &yb).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn dead_input_path_has_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = AutoencoderModel::new(schema(&[2, 3]), 1, &mut rng).unwrap();
        let v = [0.0, 1.0, 0.0, 0.4, 0.6];
        let (_, g) = m.gradients(&v, &[0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let first = &g.layers[0];
        for o in 0..first.out_dim {
            assert_eq!(first.weights[o * first.in_dim], 0.0);
            assert_eq!(first.weights[o * first.in_dim + 2], 0.0);
        }
    }

    #[test]
    fn clamped_probabilities_give_finite_gradients() {
        let s = schema(&[2, 2]);
        let mut layers = vec![Dense::zeros(4, 2), Dense::zeros(2, 4)];
        // huge output bias saturates the softmax to exactly 0/1
        layers[1].bias = vec![800.0, -800.0, -800.0, 800.0];
        let m = AutoencoderModel::from_parts(s, vec![4, 2], layers).unwrap();
        let p = m.forward(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 1.0]);
        let (loss, g) = m.gradients(&[1.0, 0.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(loss.is_finite());
        assert!(g.is_finite());
    }
}
