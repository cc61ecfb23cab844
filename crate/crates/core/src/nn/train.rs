use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{AutoencoderModel, Dense, Gradients};
use crate::data::Dataset;
use crate::error::{Error, Result};

pub const DEFAULT_LEARNING_RATE: f64 = 5e-3;
pub const DEFAULT_WEIGHT_DECAY: f64 = 2e-8;
pub const DEFAULT_EPOCHS: usize = 2;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    /// `None` picks a size from the row count, see [`default_batch_size`].
    pub batch_size: Option<usize>,
    /// `None` picks 1 for inputs narrower than 100, else 2.
    pub hidden_layers: Option<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: DEFAULT_LEARNING_RATE,
            weight_decay: DEFAULT_WEIGHT_DECAY,
            epochs: DEFAULT_EPOCHS,
            batch_size: None,
            hidden_layers: None,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be > 0".into()));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::Config("weight_decay must be >= 0".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be >= 1".into()));
        }
        if self.batch_size == Some(0) {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if let Some(h) = self.hidden_layers {
            if !(1..=3).contains(&h) {
                return Err(Error::Config(format!("hidden_layers must be 1..=3, got {h}")));
            }
        }
        Ok(())
    }

    pub fn resolved_hidden_layers(&self, input_dim: usize) -> usize {
        self.hidden_layers
            .unwrap_or(if input_dim < 100 { 1 } else { 2 })
    }

    pub fn resolved_batch_size(&self, n: usize) -> usize {
        self.batch_size.unwrap_or_else(|| default_batch_size(n)).min(n).max(1)
    }
}

/// Batch size from the row count: small tables get small batches so that
/// two epochs still make enough optimizer steps.
pub fn default_batch_size(n: usize) -> usize {
    match n {
        0..=999 => 2,
        1000..=4999 => 8,
        5000..=19_999 => 32,
        _ => 64,
    }
    .min(n.max(1))
}

/// Adds `U[-0.5, 0.5]` noise to every entry and clips to `[0, 1]`.
pub fn add_noise<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> Vec<f64> {
    x.iter()
        .map(|&v| (v + rng.gen_range(-0.5..=0.5)).clamp(0.0, 1.0))
        .collect()
}

/// Mean training loss per epoch.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
    pub batch_losses: Vec<f64>,
    pub steps: usize,
}

struct Adam {
    lr: f64,
    weight_decay: f64,
    step: i32,
    m: Vec<Dense>,
    v: Vec<Dense>,
}

impl Adam {
    fn new(model: &AutoencoderModel, lr: f64, weight_decay: f64) -> Self {
        let zeros = |m: &AutoencoderModel| Gradients::zeros_like(m).layers;
        Adam {
            lr,
            weight_decay,
            step: 0,
            m: zeros(model),
            v: zeros(model),
        }
    }

    fn update(&mut self, model: &mut AutoencoderModel, grads: &Gradients) {
        self.step += 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(self.step);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.step);
        let decay = 1.0 - self.lr * self.weight_decay;
        for (((layer, g), m), v) in model
            .layers_mut()
            .iter_mut()
            .zip(&grads.layers)
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            let params = layer.weights.iter_mut().chain(layer.bias.iter_mut());
            let gs = g.weights.iter().chain(&g.bias);
            let ms = m.weights.iter_mut().chain(m.bias.iter_mut());
            let vs = v.weights.iter_mut().chain(v.bias.iter_mut());
            for (((p, &g), m), v) in params.zip(gs).zip(ms).zip(vs) {
                *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
                *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                *p = *p * decay - self.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
            }
        }
    }
}

/// Trains a fresh autoencoder on `dataset`.
pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<AutoencoderModel> {
    train_with_report(dataset, config).map(|(m, _)| m)
}

pub fn train_with_report(
    dataset: &Dataset,
    config: &TrainConfig,
) -> Result<(AutoencoderModel, TrainReport)> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::Empty("dataset has no rows".into()));
    }
    let schema = dataset.schema().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let hidden = config.resolved_hidden_layers(schema.total_dim());
    let mut model = AutoencoderModel::new(schema, hidden, &mut rng)?;
    let batch_size = config.resolved_batch_size(dataset.len());
    log::debug!(
        "training {:?} on {} rows, batch {batch_size}, {} epochs",
        model.layer_dims(),
        dataset.len(),
        config.epochs
    );

    let clean = dataset.encoded();
    let mut order: Vec<usize> = (0..clean.len()).collect();
    let mut adam = Adam::new(&model, config.learning_rate, config.weight_decay);
    let mut report = TrainReport::default();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (batch_idx, batch) in order.chunks(batch_size).enumerate() {
            let mut grads = Gradients::zeros_like(&model);
            let mut batch_loss = 0.0;
            for &i in batch {
                let noisy = add_noise(&clean[i], &mut rng);
                batch_loss += model.accumulate_gradients(&noisy, &clean[i], &mut grads)?;
            }
            let scale = 1.0 / batch.len() as f64;
            batch_loss *= scale;
            grads.scale(scale);
            if !batch_loss.is_finite() || !grads.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: batch_idx,
                });
            }
            adam.update(&mut model, &grads);
            report.batch_losses.push(batch_loss);
            report.steps += 1;
            epoch_loss += batch_loss * batch.len() as f64;
        }
        let mean = epoch_loss / clean.len() as f64;
        log::debug!("epoch {epoch}: mean loss {mean:.5}");
        report.epoch_losses.push(mean);
    }
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSchema, Item};

    #[test]
    fn noise_clips_at_both_ends() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let out = add_noise(&[1.0, 0.0, 1.0, 0.0], &mut rng);
            assert!(out.iter().all(|v| (0.0..=1.0).contains(v)));
            assert!(out[0] >= 0.5 && out[1] <= 0.5);
        }
    }

    #[test]
    fn noise_is_centered() {
        // unclipped interior point: mean offset over 1e5 draws
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mean: f64 = (0..n)
            .map(|_| add_noise(&[0.5], &mut rng)[0] - 0.5)
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() <= 0.01, "{mean}");
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig { learning_rate: 0.0, ..Default::default() },
            TrainConfig { epochs: 0, ..Default::default() },
            TrainConfig { batch_size: Some(0), ..Default::default() },
            TrainConfig { hidden_layers: Some(4), ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    fn repeated_row_dataset(n: usize) -> Dataset {
        let schema = FeatureSchema::from_pairs(&[
            ("a", &["x", "y", "z"][..]),
            ("b", &["p", "q"][..]),
            ("c", &["r", "s", "t"][..]),
        ])
        .unwrap();
        Dataset::new(schema, vec![vec![1, 0, 2]; n]).unwrap()
    }

    #[test]
    fn fits_a_degenerate_distribution() {
        let ds = repeated_row_dataset(200);
        let model = train(&ds, &TrainConfig::default()).unwrap();
        let clean = ds.encoded().remove(0);
        let p = model.forward(&clean).unwrap();
        for (f, &c) in ds.rows()[0].iter().enumerate() {
            let idx = ds.schema().index_of(Item::new(f, c));
            assert!(p[idx] >= 0.9, "feature {f}: {}", p[idx]);
        }
    }

    #[test]
    fn same_seed_same_weights() {
        let ds = repeated_row_dataset(30);
        let cfg = TrainConfig { seed: 42, ..Default::default() };
        let a = train(&ds, &cfg).unwrap();
        let b = train(&ds, &cfg).unwrap();
        assert_eq!(a, b);
        let c = train(&ds, &TrainConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_dataset_is_rejected() {
        let ds = Dataset::new(repeated_row_dataset(1).schema().clone(), vec![]).unwrap();
        assert!(matches!(train(&ds, &TrainConfig::default()), Err(Error::Empty(_))));
    }
}
