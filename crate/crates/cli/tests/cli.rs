use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn aerial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aerial"))
        .args(args)
        .output()
        .expect("failed to run aerial")
}

fn ok(args: &[&str]) -> String {
    let out = aerial(args);
    assert!(
        out.status.success(),
        "aerial {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn mine_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let bc = data("breast_cancer.csv");
    ok(&["mine", s(&bc), "--seed", "7", "--out", s(&a)]);
    ok(&["mine", s(&bc), "--seed", "7", "--out", s(&b)]);
    let rules = fs::read(a.join("rules.jsonl")).unwrap();
    assert!(!rules.is_empty());
    assert_eq!(rules, fs::read(b.join("rules.jsonl")).unwrap());
    assert_eq!(
        fs::read(a.join("model.json")).unwrap(),
        fs::read(b.join("model.json")).unwrap()
    );

    let manifest = json(&a.join("manifest.json"));
    let model = json(&a.join("model.json"));
    assert_eq!(manifest["schema_hash"], model["schema_hash"]);
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["train"]["seed"], 7);
    assert!(manifest["train"]["batch_size"].is_u64());
    for f in ["rules.jsonl", "schema.json", "model.json", "summary.json", "summary.txt"] {
        assert!(a.join(f).exists(), "{f}");
        assert!(manifest["outputs"].as_array().unwrap().iter().any(|o| o == f));
    }
}

#[test]
fn baseline_on_four_transactions() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    fs::write(&csv, "f,g\na,x\na,x\na,y\nb,x\n").unwrap();
    let out = dir.path().join("out");
    ok(&[
        "baseline",
        s(&csv),
        "--min-support",
        "0.5",
        "--min-confidence",
        "0.6",
        "--out",
        s(&out),
    ]);
    let text = fs::read_to_string(out.join("rules.jsonl")).unwrap();
    let rules: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let pairs: Vec<(String, String)> = rules
        .iter()
        .map(|r| (r["antecedent"][0].as_str().unwrap().into(), r["consequent"].as_str().unwrap().into()))
        .collect();
    assert_eq!(
        pairs,
        vec![("f=a".into(), "g=x".into()), ("g=x".into(), "f=a".into())]
    );
    assert!(rules.iter().all(|r| r["support"] == 0.5));
}

#[test]
fn benchmark_probe_counts_grow_with_antecedents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let stdout = ok(&[
        "benchmark",
        s(&data("breast_cancer.csv")),
        "--antecedents",
        "1..3",
        "--out",
        s(&out),
    ]);
    assert!(stdout.contains("#Probes"));
    let rows = json(&out.join("benchmark.json"));
    let probes: Vec<u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["probes"].as_u64().unwrap())
        .collect();
    assert_eq!(probes.len(), 3);
    assert!(probes.windows(2).all(|w| w[0] < w[1]), "{probes:?}");
}

#[test]
fn threshold_sweep_counts_are_nested() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&[
        "benchmark",
        s(&data("breast_cancer.csv")),
        "--sweep-tau-c",
        "0.5,0.7,0.9",
        "--out",
        s(&out),
    ]);
    let rows = json(&out.join("benchmark.json"));
    let counts: Vec<u64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["rules"].as_u64().unwrap())
        .collect();
    assert_eq!(counts.len(), 3);
    assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
}

#[test]
fn constrain_over_every_item_matches_mine() {
    let dir = tempfile::tempdir().unwrap();
    let bc = data("breast_cancer.csv");
    let (m, c) = (dir.path().join("m"), dir.path().join("c"));
    ok(&["mine", s(&bc), "--out", s(&m)]);
    ok(&[
        "constrain",
        s(&bc),
        "--antecedent-items",
        "*",
        "--consequent-items",
        "*",
        "--out",
        s(&c),
    ]);
    assert_eq!(
        fs::read(m.join("rules.jsonl")).unwrap(),
        fs::read(c.join("rules.jsonl")).unwrap()
    );
}

#[test]
fn constrain_restricts_consequents() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&[
        "constrain",
        s(&data("breast_cancer.csv")),
        "--antecedent-items",
        "*",
        "--consequent-items",
        "node-caps=no",
        "irradiat=no",
        "--format",
        "csv",
        "--out",
        s(&out),
    ]);
    let mut rdr = csv_lines(&out.join("rules.csv"));
    assert!(rdr.next().unwrap().starts_with("antecedent,consequent"));
    for line in rdr {
        assert!(line.contains(",node-caps=no,") || line.contains(",irradiat=no,"), "{line}");
    }
}

fn csv_lines(path: &Path) -> impl Iterator<Item = String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect::<Vec<_>>()
        .into_iter()
}

#[test]
fn evaluate_recomputes_mined_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let bc = data("breast_cancer.csv");
    let (m, e) = (dir.path().join("m"), dir.path().join("e"));
    ok(&["mine", s(&bc), "--format", "csv", "--out", s(&m)]);
    ok(&["evaluate", s(&m.join("rules.csv")), s(&bc), "--out", s(&e)]);
    let mined = &json(&m.join("summary.json"))[0];
    let evaluated = &json(&e.join("summary.json"))[0];
    for key in ["rules", "coverage", "mean_support", "mean_confidence"] {
        assert_eq!(mined[key], evaluated[key], "{key}");
    }
    assert!(e.join("evaluated.jsonl").exists());
}

#[test]
fn itemsets_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    ok(&["itemsets", s(&data("breast_cancer.csv")), "--out", s(&out)]);
    let text = fs::read_to_string(out.join("itemsets.jsonl")).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(first["prob"].as_f64().unwrap() >= 0.5);
    assert!(first["support"].is_f64());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bc = data("breast_cancer.csv");
    let code = |args: &[&str]| aerial(args).status.code().unwrap();

    assert_eq!(code(&["mine", "no-such-file.csv", "--out", s(&out)]), 3);
    assert_eq!(code(&["mine", s(&bc), "--tau-a", "1.5", "--out", s(&out)]), 2);
    assert_eq!(code(&["mine", s(&bc), "--antecedents", "1..3", "--out", s(&out)]), 2);
    assert_eq!(code(&["mine", s(&bc), "--bogus"]), 2);
    assert_eq!(code(&["baseline", s(&bc), "--min-support", "0", "--out", s(&out)]), 2);
    assert_eq!(
        code(&["constrain", s(&bc), "--antecedent-items", "age=old", "--consequent-items", "*", "--out", s(&out)]),
        2
    );

    let ragged = dir.path().join("ragged.csv");
    fs::write(&ragged, "a,b\n1,2\n3\n").unwrap();
    assert_eq!(code(&["mine", s(&ragged), "--out", s(&out)]), 3);
    assert_eq!(code(&["--help"]), 0);
}
