//! Exhaustive association rule mining and a brute-force reference miner.

mod fpgrowth;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use fpgrowth::frequent_itemsets;

use crate::data::{Dataset, Item};
use crate::error::{Error, Result};
use crate::extract::Rule;

/// Largest category count the brute-force oracle accepts.
pub const ORACLE_MAX_CATEGORIES: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MineParams {
    pub min_support: f64,
    pub min_confidence: f64,
    pub max_antecedents: usize,
}

impl Default for MineParams {
    fn default() -> Self {
        MineParams {
            min_support: 0.1,
            min_confidence: 0.8,
            max_antecedents: 2,
        }
    }
}

impl MineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return Err(Error::Config(format!(
                "min_support must be in (0, 1], got {}",
                self.min_support
            )));
        }
        if !(self.min_confidence > 0.0 && self.min_confidence <= 1.0) {
            return Err(Error::Config(format!(
                "min_confidence must be in (0, 1], got {}",
                self.min_confidence
            )));
        }
        if self.max_antecedents == 0 {
            return Err(Error::Config("max_antecedents must be >= 1".into()));
        }
        Ok(())
    }
}

/// `part / whole >= threshold`, tolerant to the rounding of `threshold`.
pub(crate) fn reaches(part: usize, whole: usize, threshold: f64) -> bool {
    part as f64 >= threshold * whole as f64 - 1e-9 * whole.max(1) as f64
}

fn check_input(dataset: &Dataset, params: &MineParams) -> Result<()> {
    params.validate()?;
    if dataset.is_empty() {
        return Err(Error::Empty("dataset has no rows".into()));
    }
    Ok(())
}

/// Every rule `X -> y` with `|X| <= max_antecedents`, support of `X ∪ {y}`
/// at least `min_support` and confidence at least `min_confidence`.
/// Rules are returned in canonical order with support and confidence set.
pub fn mine_exhaustive(dataset: &Dataset, params: &MineParams) -> Result<Vec<Rule>> {
    check_input(dataset, params)?;
    let schema = dataset.schema();
    let n = dataset.len();
    let transactions: Vec<Vec<usize>> = dataset
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(f, &c)| schema.index_of(Item::new(f, c)))
                .collect()
        })
        .collect();
    let min_count = (1..=n).find(|&c| reaches(c, n, params.min_support)).unwrap_or(n);

    let frequent = frequent_itemsets(&transactions, min_count, params.max_antecedents + 1);
    let counts: HashMap<Vec<usize>, usize> = frequent.iter().cloned().collect();

    let mut rules = Vec::new();
    for (set, count) in &frequent {
        if set.len() < 2 {
            continue;
        }
        for (pos, &y) in set.iter().enumerate() {
            let mut ante = set.clone();
            ante.remove(pos);
            // subsets of frequent itemsets are frequent
            let ante_count = counts[&ante];
            if reaches(*count, ante_count, params.min_confidence) {
                let mut rule = Rule::new(
                    ante.iter().map(|&i| schema.item_at(i)).collect(),
                    schema.item_at(y),
                );
                rule.support = Some(*count as f64 / n as f64);
                rule.confidence = Some(*count as f64 / ante_count as f64);
                rules.push(rule);
            }
        }
    }
    rules.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(rules)
}

/// Reference miner: tries every antecedent/consequent pair against every
/// transaction. Only for schemas with at most [`ORACLE_MAX_CATEGORIES`]
/// categories.
pub fn brute_force_oracle(dataset: &Dataset, params: &MineParams) -> Result<Vec<Rule>> {
    check_input(dataset, params)?;
    let schema = dataset.schema();
    if schema.total_dim() > ORACLE_MAX_CATEGORIES {
        return Err(Error::OracleGuard {
            limit: ORACLE_MAX_CATEGORIES,
            found: schema.total_dim(),
        });
    }
    let items: Vec<Item> = schema.items().collect();
    let n = dataset.len();
    let holds = |row: &Vec<usize>, set: &[Item]| set.iter().all(|i| row[i.feature] == i.category);

    let mut rules = Vec::new();
    for mask in 1u32..(1u32 << items.len()) {
        if mask.count_ones() as usize > params.max_antecedents {
            continue;
        }
        let ante: Vec<Item> = (0..items.len())
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| items[b])
            .collect();
        if ante.windows(2).any(|w| w[0].feature == w[1].feature) {
            continue;
        }
        for &y in &items {
            if ante.iter().any(|a| a.feature == y.feature) {
                continue;
            }
            let ante_count = dataset.rows().iter().filter(|r| holds(r, &ante)).count();
            let both = dataset
                .rows()
                .iter()
                .filter(|r| holds(r, &ante) && r[y.feature] == y.category)
                .count();
            if ante_count > 0
                && reaches(both, n, params.min_support)
                && reaches(both, ante_count, params.min_confidence)
            {
                let mut rule = Rule::new(ante.clone(), y);
                rule.support = Some(both as f64 / n as f64);
                rule.confidence = Some(both as f64 / ante_count as f64);
                rules.push(rule);
            }
        }
    }
    rules.sort_by(|a, b| a.key().cmp(&b.key()));
    Ok(rules)
}
