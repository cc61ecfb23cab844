//! Neurosymbolic association rule mining.
//!
//! Tabular data is one-hot encoded and used to train an under-complete
//! denoising autoencoder ([`nn`]). Rules, frequent itemsets and constrained
//! rules are then read off the trained model by probing it with marked test
//! vectors ([`extract`]). An exhaustive FP-growth miner ([`baseline`]) and
//! data-measured quality metrics ([`metrics`]) are included for comparison.

pub mod baseline;
pub mod data;
pub mod error;
pub mod extract;
pub mod metrics;
pub mod nn;
pub mod output;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use data::{Dataset, FeatureSchema, Item};
pub use error::{Error, Result};
pub use extract::{ExtractConfig, Itemset, Rule};
pub use nn::{AutoencoderModel, TrainConfig};
