use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use aerial_core::data::DEFAULT_BINS;
use aerial_core::extract::{DEFAULT_TAU_A, DEFAULT_TAU_C, DEFAULT_TAU_I};
use aerial_core::nn::DEFAULT_EPOCHS;
use aerial_core::output::Format;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "aerial", version, about = "Association rule mining with a denoising autoencoder")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Train on a CSV file and extract association rules.
    Mine { data: PathBuf },
    /// Train on a CSV file and extract frequent itemsets.
    Itemsets { data: PathBuf },
    /// Extract rules restricted to given antecedent and consequent items.
    Constrain {
        data: PathBuf,
        /// Items allowed in antecedents, as `feature=category`; `*` means all.
        #[arg(long, num_args = 1.., required = true)]
        antecedent_items: Vec<String>,
        /// Items allowed as consequents, as `feature=category`; `*` means all.
        #[arg(long, num_args = 1.., required = true)]
        consequent_items: Vec<String>,
    },
    /// Exhaustive FP-growth rule mining.
    Baseline { data: PathBuf },
    /// Recompute support, confidence and coverage of a rule file.
    Evaluate { rules: PathBuf, data: PathBuf },
    /// Sweep antecedent counts or thresholds and tabulate probes, rules and timings.
    Benchmark {
        data: PathBuf,
        /// Comma-separated antecedent thresholds to sweep.
        #[arg(long, value_delimiter = ',', conflicts_with = "sweep_tau_c")]
        sweep_tau_a: Option<Vec<f64>>,
        /// Comma-separated consequent thresholds to sweep.
        #[arg(long, value_delimiter = ',')]
        sweep_tau_c: Option<Vec<f64>>,
        /// Also run FP-growth at every antecedent count.
        #[arg(long)]
        baseline: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Equal-frequency bins for numeric columns.
    #[arg(long, global = true, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_EPOCHS)]
    pub epochs: usize,
    /// Defaults to a size picked from the row count.
    #[arg(long, global = true)]
    pub batch_size: Option<usize>,
    /// Encoder depth, 1 to 3; defaults from the one-hot width.
    #[arg(long, global = true)]
    pub hidden_layers: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_TAU_A)]
    pub tau_a: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_TAU_C)]
    pub tau_c: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_TAU_I)]
    pub tau_i: f64,
    /// Maximum antecedent length (default 2); `benchmark` also takes a range like `1..4`.
    #[arg(long, global = true)]
    pub antecedents: Option<Antecedents>,
    /// FP-growth minimum support (default 0.1; benchmark uses half the mean Aerial+ support).
    #[arg(long, global = true)]
    pub min_support: Option<f64>,
    #[arg(long, global = true, default_value_t = 0.8)]
    pub min_confidence: f64,
    /// Keep the k rules per consequent with the highest antecedent probability.
    #[arg(long, global = true)]
    pub top_k: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "aerial-out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Extraction threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, default_value_t = ',')]
    pub delimiter: char,
    /// The input has no header row; columns are named c0, c1, ...
    #[arg(long, global = true)]
    pub no_header: bool,
    /// Log more (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

/// Inclusive antecedent-count range; a single number is a one-point range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Antecedents {
    pub lo: usize,
    pub hi: usize,
}

impl Antecedents {
    pub fn single(self) -> Option<usize> {
        (self.lo == self.hi).then_some(self.lo)
    }
}

impl FromStr for Antecedents {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid antecedent count {t:?}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let n = parse(s)?;
                (n, n)
            }
        };
        if lo == 0 || hi < lo {
            return Err(format!("antecedent range must be 1 <= lo <= hi, got {s:?}"));
        }
        Ok(Antecedents { lo, hi })
    }
}

impl fmt::Display for Antecedents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.single() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{}..{}", self.lo, self.hi),
        }
    }
}
