mod common;

use aerial_core::data::{FeatureSchema, Feature};
use aerial_core::nn::{bce_loss, block_softmax};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn analytic_gradients_match_finite_differences(seed in any::<u64>()) {
        let (model, v, target) = common::random_model_case(seed);
        let err = common::max_gradient_error(&model, &v, &target, 1e-5);
        prop_assert!(err < 1e-4, "relative error {err} for dims {:?}", model.layer_dims());
    }

    #[test]
    fn softmax_blocks_sum_to_one(
        cats in prop::collection::vec(1usize..6, 1..6),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let schema = FeatureSchema::new(
            cats.iter()
                .enumerate()
                .map(|(f, &c)| Feature {
                    name: format!("f{f}"),
                    categories: (0..c).map(|i| format!("c{i}")).collect(),
                })
                .collect(),
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut z: Vec<f64> = (0..schema.total_dim()).map(|_| rng.gen_range(-50.0..50.0)).collect();
        block_softmax(&schema, &mut z);
        for block in schema.blocks() {
            let sum: f64 = z[block.clone()].iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(z[block].iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }
}

#[test]
fn loss_of_perfect_prediction_is_near_zero() {
    let schema = FeatureSchema::from_pairs(&[("a", &["x", "y"][..]), ("b", &["u", "v", "w"][..])]).unwrap();
    let t = [0.0, 1.0, 1.0, 0.0, 0.0];
    let loss = bce_loss(&schema, &t, &t).unwrap();
    // clamped at 1e-7 on every entry
    assert!(loss < 1e-6, "{loss}");
}
