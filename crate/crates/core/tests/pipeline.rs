mod common;

use aerial_core::extract::extract_rules;
use aerial_core::metrics::{annotate_rules, summarize};
use aerial_core::nn::{train, train_with_report};
use aerial_core::output::{read_rules, write_rules, Format};
use aerial_core::{AutoencoderModel, ExtractConfig, TrainConfig};

#[test]
fn breast_cancer_shape() {
    let ds = common::breast_cancer();
    assert_eq!(ds.len(), 286);
    // class column plus nine attributes
    assert_eq!(ds.schema().num_features(), 10);
    assert!(ds.schema().features().iter().any(|f| f.name == "deg-malig"));
}

#[test]
fn training_loss_falls_on_planted_data() {
    let ds = common::planted(3);
    let (_, report) = train_with_report(&ds, &TrainConfig::default()).unwrap();
    assert_eq!(report.epoch_losses.len(), 2);
    assert!(report.epoch_losses[1] < report.epoch_losses[0], "{:?}", report.epoch_losses);
}

#[test]
fn saved_model_extracts_identical_rules() {
    let ds = common::breast_cancer();
    let model = train(&ds, &TrainConfig { seed: 5, ..Default::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    let loaded = AutoencoderModel::load(&path).unwrap();
    let cfg = ExtractConfig::default();
    assert_eq!(extract_rules(&model, &cfg).unwrap(), extract_rules(&loaded, &cfg).unwrap());
}

#[test]
fn rule_files_round_trip_on_binned_labels() {
    let ds = common::breast_cancer();
    let model = train(&ds, &TrainConfig::default()).unwrap();
    let mut rules = extract_rules(&model, &ExtractConfig { tau_c: 0.6, ..Default::default() }).unwrap();
    annotate_rules(&ds, &mut rules);
    assert!(!rules.is_empty());
    for format in [Format::Json, Format::Csv] {
        let mut buf = Vec::new();
        write_rules(&mut buf, format, ds.schema(), &rules).unwrap();
        assert_eq!(read_rules(&buf[..], format, ds.schema()).unwrap(), rules);
    }
}

#[test]
fn same_seed_same_summary() {
    let ds = common::planted(1);
    let run = || {
        let model = train(&ds, &TrainConfig { seed: 9, ..Default::default() }).unwrap();
        let rules = extract_rules(&model, &ExtractConfig::default()).unwrap();
        summarize(&ds, &rules, std::time::Duration::ZERO)
    };
    assert_eq!(run(), run());
}
