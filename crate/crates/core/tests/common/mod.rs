#![allow(dead_code)]

use std::path::PathBuf;

use aerial_core::data::{encode_row, load_dataset, CsvOptions, Feature, LoadOptions};
use aerial_core::nn::{bce_loss, Dense};
use aerial_core::{AutoencoderModel, Dataset, FeatureSchema, Item};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn schema(features: &[(&str, &[&str])]) -> FeatureSchema {
    FeatureSchema::new(
        features
            .iter()
            .map(|(n, cs)| Feature {
                name: n.to_string(),
                categories: cs.iter().map(|c| c.to_string()).collect(),
            })
            .collect(),
    )
    .unwrap()
}

pub fn item(ds: &Dataset, label: &str) -> Item {
    ds.schema().parse_item(label).unwrap()
}

/// 500 rows with three planted implications (confidence 1, support 0.5):
/// `f1=a -> f2=x`, `f1=b -> f2=y` and `f3=p -> f4=u`, plus two uniform
/// noise features. `f2` copies `f1` and `f4` copies `f3`.
pub fn planted(seed: u64) -> Dataset {
    let s = schema(&[
        ("f1", &["a", "b"]),
        ("f2", &["x", "y"]),
        ("f3", &["p", "q"]),
        ("f4", &["u", "v"]),
        ("n1", &["c0", "c1", "c2"]),
        ("n2", &["d0", "d1", "d2", "d3"]),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 500;
    // exact marginals, shuffled
    let mut f1: Vec<usize> = (0..n).map(|i| i % 2).collect();
    let mut f3 = f1.clone();
    f1.shuffle(&mut rng);
    f3.shuffle(&mut rng);
    let rows = (0..n)
        .map(|i| vec![f1[i], f1[i], f3[i], f3[i], rng.gen_range(0..3), rng.gen_range(0..4)])
        .collect();
    Dataset::new(s, rows).unwrap()
}

pub const PLANTED_RULES: [(&str, &str); 3] = [("f1=a", "f2=x"), ("f1=b", "f2=y"), ("f3=p", "f4=u")];

/// Noiseless two-feature data with `P(f2=x | f1=a) = 1`,
/// `P(f2=x | f1=b) = 0.5` and `P(f2=x | f1=c) = 0`, rows shuffled by `seed`.
pub fn conditionals(seed: u64) -> Dataset {
    let s = schema(&[("f1", &["a", "b", "c"]), ("f2", &["x", "y"])]);
    let mut rows = Vec::new();
    for i in 0..100 {
        rows.push(vec![0, 0]);
        rows.push(vec![1, i % 2]);
        rows.push(vec![2, 1]);
    }
    rows.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Dataset::new(s, rows).unwrap()
}

/// Uniform random data over `features` binary features.
pub fn random_binary(features: usize, n: usize, seed: u64) -> Dataset {
    let names: Vec<String> = (0..features).map(|i| format!("b{i}")).collect();
    let s = FeatureSchema::new(
        names
            .iter()
            .map(|n| Feature {
                name: n.clone(),
                categories: vec!["0".into(), "1".into()],
            })
            .collect(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| (0..features).map(|_| rng.gen_range(0..2)).collect())
        .collect();
    Dataset::new(s, rows).unwrap()
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn breast_cancer() -> Dataset {
    let (ds, _) = load_dataset(
        data_dir().join("breast_cancer.csv"),
        LoadOptions {
            csv: CsvOptions::default(),
            bins: Some(10),
        },
    )
    .unwrap();
    ds
}

/// Random dataset with 1..=`max_features` features of 2..=`max_cats`
/// categories and 1..=`max_rows` rows.
pub fn random_dataset<R: Rng>(rng: &mut R, max_features: usize, max_cats: usize, max_rows: usize) -> Dataset {
    let features: Vec<Feature> = (0..rng.gen_range(1..=max_features))
        .map(|f| Feature {
            name: format!("f{f}"),
            categories: (0..rng.gen_range(2..=max_cats)).map(|c| format!("c{c}")).collect(),
        })
        .collect();
    let s = FeatureSchema::new(features).unwrap();
    // skewed category draws so that some itemsets are frequent
    let rows = (0..rng.gen_range(1..=max_rows))
        .map(|_| {
            s.features()
                .iter()
                .map(|f| {
                    let c = rng.gen_range(0..f.categories.len());
                    if rng.gen_bool(0.5) { 0 } else { c }
                })
                .collect()
        })
        .collect();
    Dataset::new(s, rows).unwrap()
}

/// Largest relative error between analytic gradients and central finite
/// differences of the loss, over every weight and bias.
pub fn max_gradient_error(model: &AutoencoderModel, v: &[f64], target: &[f64], h: f64) -> f64 {
    let (_, grads) = model.gradients(v, target).unwrap();
    let loss = |layers: Vec<Dense>| {
        let m = AutoencoderModel::from_parts(model.schema().clone(), model.layer_dims().to_vec(), layers)
            .unwrap();
        bce_loss(m.schema(), &m.forward(v).unwrap(), target).unwrap()
    };
    let mut worst = 0.0f64;
    for (l, layer) in model.layers().iter().enumerate() {
        for (is_bias, len) in [(false, layer.weights.len()), (true, layer.bias.len())] {
            for i in 0..len {
                let bumped = |delta: f64| {
                    let mut layers = model.layers().to_vec();
                    let p = if is_bias { &mut layers[l].bias[i] } else { &mut layers[l].weights[i] };
                    *p += delta;
                    loss(layers)
                };
                let numeric = (bumped(h) - bumped(-h)) / (2.0 * h);
                let g = &grads.layers[l];
                let analytic = if is_bias { g.bias[i] } else { g.weights[i] };
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-4);
                worst = worst.max(rel);
            }
        }
    }
    worst
}

/// Random small model with random biases, a noisy input and a one-hot target.
pub fn random_model_case(seed: u64) -> (AutoencoderModel, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let schema = loop {
        let n = rng.gen_range(2..=4);
        let features: Vec<Feature> = (0..n)
            .map(|f| Feature {
                name: format!("f{f}"),
                categories: (0..rng.gen_range(1..=3)).map(|c| format!("c{c}")).collect(),
            })
            .collect();
        let s = FeatureSchema::new(features).unwrap();
        if s.total_dim() >= 4 {
            break s;
        }
    };
    let hidden = rng.gen_range(1..=3);
    let model = AutoencoderModel::new(schema.clone(), hidden, &mut rng).unwrap();
    let mut layers = model.layers().to_vec();
    for layer in &mut layers {
        layer.bias.iter_mut().for_each(|b| *b = rng.gen_range(-0.5..0.5));
    }
    let model = AutoencoderModel::from_parts(schema.clone(), model.layer_dims().to_vec(), layers).unwrap();
    let v: Vec<f64> = (0..schema.total_dim()).map(|_| rng.gen_range(0.0..1.0)).collect();
    let row: Vec<usize> = schema
        .features()
        .iter()
        .map(|f| rng.gen_range(0..f.categories.len()))
        .collect();
    let target = encode_row(&schema, &row).unwrap();
    (model, v, target)
}
