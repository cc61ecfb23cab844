//! Rule, itemset and constrained-rule extraction by probing a trained model.
//!
//! Every candidate antecedent `S` (a set of items on distinct features)
//! becomes one test vector: uniform probabilities per feature with the items
//! of `S` marked. One forward pass gives the reconstruction `p`. If any
//! marked item reconstructs below the antecedent threshold, `S` is treated
//! as low-support; otherwise each unmarked item on a feature outside `S`
//! with `p > tau_c` becomes a consequent. Items whose singleton probe is
//! low-support are dropped from the candidate pool for deeper levels.

mod engine;
mod probe;
mod topk;

use serde::{Deserialize, Serialize};

pub use engine::{
    extract_constrained, extract_itemsets, extract_rules, extract_rules_with_stats,
    extract_itemsets_with_stats, ExtractionStats,
};
pub use probe::{mark, test_vector, uniform_vector, Probe};
pub use topk::top_k_filter;

use crate::data::{FeatureSchema, Item};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ANTECEDENTS: usize = 2;
pub const DEFAULT_TAU_A: f64 = 0.5;
pub const DEFAULT_TAU_C: f64 = 0.8;
pub const DEFAULT_TAU_I: f64 = 0.5;

/// An association rule `antecedent -> consequent`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    /// Sorted, on pairwise distinct features.
    pub antecedent: Vec<Item>,
    pub consequent: Item,
    /// Lowest reconstruction among the marked antecedent items, for rules
    /// extracted from a model.
    pub antecedent_prob: Option<f64>,
    pub consequent_prob: Option<f64>,
    pub support: Option<f64>,
    pub confidence: Option<f64>,
}

impl Rule {
    pub fn new(antecedent: Vec<Item>, consequent: Item) -> Self {
        let mut antecedent = antecedent;
        antecedent.sort();
        Rule {
            antecedent,
            consequent,
            antecedent_prob: None,
            consequent_prob: None,
            support: None,
            confidence: None,
        }
    }

    /// Ordering key: antecedent items, then consequent.
    pub fn key(&self) -> (&[Item], Item) {
        (&self.antecedent, self.consequent)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Itemset {
    pub items: Vec<Item>,
    /// Lowest reconstruction among the marked items.
    pub prob: f64,
    pub support: Option<f64>,
}

/// Items of interest for constrained mining.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemConstraints {
    pub antecedent: Vec<Item>,
    pub consequent: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub max_antecedents: usize,
    pub tau_a: f64,
    pub tau_c: f64,
    pub tau_i: f64,
    pub constraints: Option<ItemConstraints>,
    pub top_k: Option<usize>,
    /// Worker threads for probing; 0 uses every available core.
    pub workers: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            max_antecedents: DEFAULT_MAX_ANTECEDENTS,
            tau_a: DEFAULT_TAU_A,
            tau_c: DEFAULT_TAU_C,
            tau_i: DEFAULT_TAU_I,
            constraints: None,
            top_k: None,
            workers: 0,
        }
    }
}

impl ExtractConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_antecedents == 0 {
            return Err(Error::Config("max_antecedents must be >= 1".into()));
        }
        for (name, t) in [("tau_a", self.tau_a), ("tau_c", self.tau_c), ("tau_i", self.tau_i)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::Config(format!("{name} must be in (0, 1), got {t}")));
            }
        }
        Ok(())
    }

    fn check_constraints(&self, schema: &FeatureSchema) -> Result<&ItemConstraints> {
        let c = self
            .constraints
            .as_ref()
            .ok_or_else(|| Error::Config("constrained extraction needs item constraints".into()))?;
        if c.antecedent.is_empty() || c.consequent.is_empty() {
            return Err(Error::Config("constraint item sets must be non-empty".into()));
        }
        for &item in c.antecedent.iter().chain(&c.consequent) {
            if !schema.contains(item) {
                return Err(Error::UnknownItem(format!(
                    "constraint item {}:{} not in schema",
                    item.feature, item.category
                )));
            }
        }
        Ok(c)
    }
}
