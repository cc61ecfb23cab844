use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use aerial_core::baseline::{mine_exhaustive, MineParams};
use aerial_core::data::{load_dataset, BinningSpec, CsvOptions, LoadOptions};
use aerial_core::extract::{
    extract_constrained, extract_itemsets_with_stats, extract_rules_with_stats, ItemConstraints,
};
use aerial_core::metrics::{annotate_itemsets, annotate_rules, summarize, Summary, SummaryTable};
use aerial_core::nn::{train_with_report, TrainConfig};
use aerial_core::output::{read_rules, write_itemsets, write_rules, Format};
use aerial_core::{AutoencoderModel, Dataset, ExtractConfig, Item, Rule};
use anyhow::{Context, Result};
use log::info;
use serde::Serialize;

use crate::args::{Antecedents, Cli, Command, Opts};
use crate::UsageError;

const AERIAL: &str = "Aerial+";
const FP_GROWTH: &str = "FP-Growth";

pub fn run(cli: &Cli, argv: &[String]) -> Result<()> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Mine { data } => mine(opts, argv, data),
        Command::Itemsets { data } => itemsets(opts, argv, data),
        Command::Constrain {
            data,
            antecedent_items,
            consequent_items,
        } => constrain(opts, argv, data, antecedent_items, consequent_items),
        Command::Baseline { data } => baseline(opts, argv, data),
        Command::Evaluate { rules, data } => evaluate(opts, argv, rules, data),
        Command::Benchmark {
            data,
            sweep_tau_a,
            sweep_tau_c,
            baseline,
        } => benchmark(opts, argv, data, sweep_tau_a, sweep_tau_c, *baseline),
    }
}

/// Everything needed to rerun a command with identical output.
#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    command: &'a str,
    argv: &'a [String],
    input: String,
    rows: usize,
    categories: usize,
    schema_hash: String,
    seed: u64,
    delimiter: char,
    header: bool,
    binning: &'a BinningSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    train: Option<&'a TrainConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extract: Option<&'a ExtractConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<&'a MineParams>,
    outputs: Vec<String>,
}

struct Loaded {
    path: PathBuf,
    dataset: Dataset,
    binning: BinningSpec,
}

fn load(opts: &Opts, path: &Path) -> Result<Loaded> {
    let delimiter = u8::try_from(opts.delimiter)
        .map_err(|_| UsageError(format!("delimiter must be ASCII, got {:?}", opts.delimiter)))?;
    let (dataset, binning) = load_dataset(
        path,
        LoadOptions {
            csv: CsvOptions {
                header: !opts.no_header,
                delimiter,
            },
            bins: Some(opts.bins),
        },
    )
    .with_context(|| format!("loading {}", path.display()))?;
    info!(
        "loaded {}: {} rows, {} features, {} categories",
        path.display(),
        dataset.len(),
        dataset.schema().num_features(),
        dataset.schema().total_dim()
    );
    Ok(Loaded {
        path: path.to_path_buf(),
        dataset,
        binning,
    })
}

fn max_antecedents(opts: &Opts) -> Result<usize> {
    match opts.antecedents {
        None => Ok(aerial_core::extract::DEFAULT_MAX_ANTECEDENTS),
        Some(a) => a.single().ok_or_else(|| {
            UsageError(format!("--antecedents {a}: ranges are only accepted by `benchmark`")).into()
        }),
    }
}

/// Training config with batch size and depth resolved for `dataset`, so the
/// manifest records the values actually used.
fn train_config(opts: &Opts, dataset: &Dataset) -> TrainConfig {
    let mut cfg = TrainConfig {
        epochs: opts.epochs,
        batch_size: opts.batch_size,
        hidden_layers: opts.hidden_layers,
        seed: opts.seed,
        ..TrainConfig::default()
    };
    if cfg.batch_size != Some(0) {
        cfg.batch_size = Some(cfg.resolved_batch_size(dataset.len()));
    }
    if cfg.hidden_layers.is_none() {
        cfg.hidden_layers = Some(cfg.resolved_hidden_layers(dataset.schema().total_dim()));
    }
    cfg
}

fn extract_config(opts: &Opts, max_antecedents: usize) -> ExtractConfig {
    ExtractConfig {
        max_antecedents,
        tau_a: opts.tau_a,
        tau_c: opts.tau_c,
        tau_i: opts.tau_i,
        constraints: None,
        top_k: opts.top_k,
        workers: opts.workers,
    }
}

fn mine_params(opts: &Opts, max_antecedents: usize, min_support: Option<f64>) -> MineParams {
    let defaults = MineParams::default();
    MineParams {
        min_support: opts.min_support.or(min_support).unwrap_or(defaults.min_support),
        min_confidence: opts.min_confidence,
        max_antecedents,
    }
}

fn train(data: &Loaded, cfg: &TrainConfig) -> Result<AutoencoderModel> {
    let (model, report) = train_with_report(&data.dataset, cfg).context("training")?;
    info!(
        "trained {:?} in {} steps, epoch losses {:?}",
        model.layer_dims(),
        report.steps,
        report.epoch_losses
    );
    Ok(model)
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(file);
        f(&mut w)?;
        w.flush().with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        self.write(name, |w| Ok(w.write_all(text.as_bytes())?))
    }

    fn schema(&mut self, data: &Loaded) -> Result<()> {
        self.text("schema.json", &(data.dataset.schema().to_json() + "\n"))
    }

    fn model(&mut self, model: &AutoencoderModel) -> Result<()> {
        self.text("model.json", &(model.to_json()? + "\n"))
    }

    fn rules(&mut self, stem: &str, format: Format, data: &Loaded, rules: &[Rule]) -> Result<()> {
        let name = format!("{stem}.{}", format.extension());
        self.write(&name, |w| Ok(write_rules(w, format, data.dataset.schema(), rules)?))
    }

    fn summary(&mut self, rows: &[(String, Summary)]) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            algorithm: &'a str,
            #[serde(flatten)]
            summary: &'a Summary,
        }
        let json: Vec<Row> = rows
            .iter()
            .map(|(a, s)| Row {
                algorithm: a,
                summary: s,
            })
            .collect();
        self.json("summary.json", &json)?;
        let table = SummaryTable(rows).to_string();
        self.text("summary.txt", &table)?;
        Ok(table)
    }

    fn manifest(mut self, manifest: Manifest) -> Result<()> {
        let outputs = std::mem::take(&mut self.written);
        self.json(
            "manifest.json",
            &Manifest {
                outputs,
                ..manifest
            },
        )
    }
}

fn manifest<'a>(
    opts: &Opts,
    command: &'a str,
    argv: &'a [String],
    data: &'a Loaded,
) -> Manifest<'a> {
    Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        core_version: aerial_core::VERSION,
        command,
        argv,
        input: data.path.display().to_string(),
        rows: data.dataset.len(),
        categories: data.dataset.schema().total_dim(),
        schema_hash: data.dataset.schema().hash(),
        seed: opts.seed,
        delimiter: opts.delimiter,
        header: !opts.no_header,
        binning: &data.binning,
        train: None,
        extract: None,
        baseline: None,
        outputs: Vec::new(),
    }
}

fn mine(opts: &Opts, argv: &[String], path: &Path) -> Result<()> {
    let cfg = extract_config(opts, max_antecedents(opts)?);
    cfg.validate()?;
    let data = load(opts, path)?;
    let tcfg = train_config(opts, &data.dataset);

    let start = Instant::now();
    let model = train(&data, &tcfg)?;
    let (mut rules, stats) = extract_rules_with_stats(&model, &cfg).context("extracting rules")?;
    let elapsed = start.elapsed();
    info!("{} probes, {} items pruned", stats.probes(), stats.pruned.len());

    annotate_rules(&data.dataset, &mut rules);
    let rows = vec![(AERIAL.to_string(), summarize(&data.dataset, &rules, elapsed))];
    let mut out = Outputs::new(&opts.out)?;
    out.rules("rules", opts.format.into(), &data, &rules)?;
    out.schema(&data)?;
    out.model(&model)?;
    print!("{}", out.summary(&rows)?);
    out.manifest(Manifest {
        train: Some(&tcfg),
        extract: Some(&cfg),
        ..manifest(opts, "mine", argv, &data)
    })
}

fn itemsets(opts: &Opts, argv: &[String], path: &Path) -> Result<()> {
    let cfg = extract_config(opts, max_antecedents(opts)?);
    cfg.validate()?;
    let data = load(opts, path)?;
    let tcfg = train_config(opts, &data.dataset);

    let start = Instant::now();
    let model = train(&data, &tcfg)?;
    let (mut sets, stats) = extract_itemsets_with_stats(&model, &cfg).context("extracting itemsets")?;
    let elapsed = start.elapsed();
    annotate_itemsets(&data.dataset, &mut sets);

    let format: Format = opts.format.into();
    let mut out = Outputs::new(&opts.out)?;
    out.write(&format!("itemsets.{}", format.extension()), |w| {
        Ok(write_itemsets(w, format, data.dataset.schema(), &sets)?)
    })?;
    out.schema(&data)?;
    out.model(&model)?;
    let mean_support = {
        let s: Vec<f64> = sets.iter().filter_map(|s| s.support).collect();
        (!s.is_empty()).then(|| s.iter().sum::<f64>() / s.len() as f64)
    };
    println!(
        "{} itemsets, {} probes, {:.3} s, mean support {}",
        sets.len(),
        stats.probes(),
        elapsed.as_secs_f64(),
        mean_support.map_or_else(|| "-".into(), |s| format!("{s:.3}"))
    );
    out.manifest(Manifest {
        train: Some(&tcfg),
        extract: Some(&cfg),
        ..manifest(opts, "itemsets", argv, &data)
    })
}

fn parse_items(data: &Loaded, labels: &[String], flag: &str) -> Result<Vec<Item>> {
    let schema = data.dataset.schema();
    if labels.iter().any(|l| l == "*") {
        return Ok(schema.items().collect());
    }
    let mut items = labels
        .iter()
        .map(|l| {
            schema
                .parse_item(l)
                .map_err(|e| UsageError(format!("--{flag}: {e}")).into())
        })
        .collect::<Result<Vec<Item>>>()?;
    items.sort();
    items.dedup();
    Ok(items)
}

fn constrain(
    opts: &Opts,
    argv: &[String],
    path: &Path,
    antecedent: &[String],
    consequent: &[String],
) -> Result<()> {
    let mut cfg = extract_config(opts, max_antecedents(opts)?);
    cfg.validate()?;
    let data = load(opts, path)?;
    cfg.constraints = Some(ItemConstraints {
        antecedent: parse_items(&data, antecedent, "antecedent-items")?,
        consequent: parse_items(&data, consequent, "consequent-items")?,
    });
    let tcfg = train_config(opts, &data.dataset);

    let start = Instant::now();
    let model = train(&data, &tcfg)?;
    let mut rules = extract_constrained(&model, &cfg).context("extracting rules")?;
    let elapsed = start.elapsed();

    annotate_rules(&data.dataset, &mut rules);
    let rows = vec![(AERIAL.to_string(), summarize(&data.dataset, &rules, elapsed))];
    let mut out = Outputs::new(&opts.out)?;
    out.rules("rules", opts.format.into(), &data, &rules)?;
    out.schema(&data)?;
    out.model(&model)?;
    print!("{}", out.summary(&rows)?);
    out.manifest(Manifest {
        train: Some(&tcfg),
        extract: Some(&cfg),
        ..manifest(opts, "constrain", argv, &data)
    })
}

fn baseline(opts: &Opts, argv: &[String], path: &Path) -> Result<()> {
    let params = mine_params(opts, max_antecedents(opts)?, None);
    params.validate()?;
    let data = load(opts, path)?;

    let start = Instant::now();
    let rules = mine_exhaustive(&data.dataset, &params)?;
    let elapsed = start.elapsed();

    let rows = vec![(FP_GROWTH.to_string(), summarize(&data.dataset, &rules, elapsed))];
    let mut out = Outputs::new(&opts.out)?;
    out.rules("rules", opts.format.into(), &data, &rules)?;
    out.schema(&data)?;
    print!("{}", out.summary(&rows)?);
    out.manifest(Manifest {
        baseline: Some(&params),
        ..manifest(opts, "baseline", argv, &data)
    })
}

fn rule_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Json,
    }
}

fn evaluate(opts: &Opts, argv: &[String], rules_path: &Path, path: &Path) -> Result<()> {
    let data = load(opts, path)?;
    let file = File::open(rules_path).with_context(|| format!("opening {}", rules_path.display()))?;
    let mut rules = read_rules(
        BufReader::new(file),
        rule_format(rules_path),
        data.dataset.schema(),
    )
    .with_context(|| format!("reading {}", rules_path.display()))?;

    let start = Instant::now();
    annotate_rules(&data.dataset, &mut rules);
    let summary = summarize(&data.dataset, &rules, start.elapsed());

    let label = rules_path
        .file_name()
        .map_or_else(|| "rules".into(), |n| n.to_string_lossy().into_owned());
    let mut out = Outputs::new(&opts.out)?;
    out.rules("evaluated", opts.format.into(), &data, &rules)?;
    print!("{}", out.summary(&[(label, summary)])?);
    out.manifest(manifest(opts, "evaluate", argv, &data))
}

/// One row of a benchmark table.
#[derive(Serialize)]
struct BenchRow {
    algorithm: &'static str,
    antecedents: usize,
    tau_a: Option<f64>,
    tau_c: Option<f64>,
    probes: Option<usize>,
    train_seconds: Option<f64>,
    extract_seconds: f64,
    #[serde(flatten)]
    summary: Summary,
}

fn render_bench(rows: &[BenchRow]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
    let mut s = format!(
        "{:<9}  {:>2}  {:>5}  {:>5}  {:>8}  {:>8}  {:>9}  {:>9}  {:>6}  {:>8}  {:>6}\n",
        "Algorithm", "a", "tau_a", "tau_c", "#Probes", "#Rules", "Train (s)", "Total (s)", "Cov.", "Support", "Conf."
    );
    for r in rows {
        s += &format!(
            "{:<9}  {:>2}  {:>5}  {:>5}  {:>8}  {:>8}  {:>9}  {:>9.3}  {:>6.3}  {:>8}  {:>6}\n",
            r.algorithm,
            r.antecedents,
            r.tau_a.map_or_else(|| "-".into(), |t| format!("{t:.2}")),
            r.tau_c.map_or_else(|| "-".into(), |t| format!("{t:.2}")),
            r.probes.map_or_else(|| "-".into(), |p| p.to_string()),
            r.summary.rules,
            opt(r.train_seconds),
            r.summary.seconds,
            r.summary.coverage,
            opt(r.summary.mean_support),
            opt(r.summary.mean_confidence),
        );
    }
    s
}

fn benchmark(
    opts: &Opts,
    argv: &[String],
    path: &Path,
    sweep_tau_a: &Option<Vec<f64>>,
    sweep_tau_c: &Option<Vec<f64>>,
    with_baseline: bool,
) -> Result<()> {
    let threshold_sweep = sweep_tau_a.is_some() || sweep_tau_c.is_some();
    let range = match (opts.antecedents, threshold_sweep) {
        (Some(a), _) => a,
        (None, true) => Antecedents { lo: 2, hi: 2 },
        (None, false) => Antecedents { lo: 1, hi: 4 },
    };
    if threshold_sweep && range.single().is_none() {
        return Err(UsageError("threshold sweeps take a single --antecedents value".into()).into());
    }
    // configs for every sweep point, validated before any training
    let mut configs = Vec::new();
    for a in range.lo..=range.hi {
        let base = extract_config(opts, a);
        match (sweep_tau_a, sweep_tau_c) {
            (Some(ts), _) => configs.extend(ts.iter().map(|&t| ExtractConfig { tau_a: t, ..base.clone() })),
            (_, Some(ts)) => configs.extend(ts.iter().map(|&t| ExtractConfig { tau_c: t, ..base.clone() })),
            _ => configs.push(base),
        }
    }
    for c in &configs {
        c.validate()?;
    }

    let data = load(opts, path)?;
    let tcfg = train_config(opts, &data.dataset);
    let start = Instant::now();
    let model = train(&data, &tcfg)?;
    let train_time = start.elapsed();

    let mut rows = Vec::new();
    for cfg in &configs {
        let start = Instant::now();
        let (rules, stats) = extract_rules_with_stats(&model, cfg)?;
        let extract_time = start.elapsed();
        rows.push(BenchRow {
            algorithm: AERIAL,
            antecedents: cfg.max_antecedents,
            tau_a: Some(cfg.tau_a),
            tau_c: Some(cfg.tau_c),
            probes: Some(stats.probes()),
            train_seconds: Some(train_time.as_secs_f64()),
            extract_seconds: extract_time.as_secs_f64(),
            summary: summarize(&data.dataset, &rules, train_time + extract_time),
        });
    }
    let mut params = Vec::new();
    if with_baseline {
        for a in range.lo..=range.hi {
            let half_mean = rows
                .iter()
                .find(|r| r.antecedents == a)
                .and_then(|r| r.summary.mean_support)
                .map(|s| s / 2.0);
            let p = mine_params(opts, a, half_mean);
            p.validate()?;
            let start = Instant::now();
            let rules = mine_exhaustive(&data.dataset, &p)?;
            let elapsed = start.elapsed();
            rows.push(BenchRow {
                algorithm: FP_GROWTH,
                antecedents: a,
                tau_a: None,
                tau_c: None,
                probes: None,
                train_seconds: None,
                extract_seconds: elapsed.as_secs_f64(),
                summary: summarize(&data.dataset, &rules, elapsed),
            });
            params.push(p);
        }
    }

    let table = render_bench(&rows);
    print!("{table}");
    let mut out = Outputs::new(&opts.out)?;
    out.json("benchmark.json", &rows)?;
    out.text("benchmark.txt", &table)?;
    out.schema(&data)?;
    out.model(&model)?;
    #[derive(Serialize)]
    struct Sweep<'a> {
        extract: &'a [ExtractConfig],
        baseline: &'a [MineParams],
    }
    out.json(
        "sweep.json",
        &Sweep {
            extract: &configs,
            baseline: &params,
        },
    )?;
    out.manifest(Manifest {
        train: Some(&tcfg),
        ..manifest(opts, "benchmark", argv, &data)
    })
}
