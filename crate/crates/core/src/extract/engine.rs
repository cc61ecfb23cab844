use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probe::{test_vector, Probe};
use super::topk::top_k_filter;
use super::{ExtractConfig, Itemset, Rule};
use crate::data::Item;
use crate::error::{Error, Result};

/// Work done by one extraction run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtractionStats {
    /// Forward passes per antecedent size, level 1 first.
    pub probes_per_level: Vec<usize>,
    /// Items removed from the candidate pool after level 1.
    pub pruned: Vec<Item>,
}

impl ExtractionStats {
    pub fn probes(&self) -> usize {
        self.probes_per_level.iter().sum()
    }
}

struct Outcome {
    combo: Vec<Item>,
    min_marked: f64,
    probs: Vec<f64>,
}

/// All `size`-combinations of `pool` whose items are on distinct features.
/// `pool` must be sorted; output is in lexicographic order.
fn combinations(pool: &[Item], size: usize) -> Vec<Vec<Item>> {
    fn rec(pool: &[Item], start: usize, size: usize, cur: &mut Vec<Item>, out: &mut Vec<Vec<Item>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..pool.len() {
            if pool.len() - i < size - cur.len() {
                break;
            }
            if cur.iter().any(|c| c.feature == pool[i].feature) {
                continue;
            }
            cur.push(pool[i]);
            rec(pool, i + 1, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(pool, 0, size, &mut Vec::with_capacity(size), &mut out);
    out
}

fn probe_all<P: Probe + ?Sized>(
    probe: &P,
    combos: Vec<Vec<Item>>,
    workers: usize,
) -> Result<Vec<Outcome>> {
    let schema = probe.schema();
    let run = |combo: Vec<Item>| -> Result<Outcome> {
        let v = test_vector(schema, &combo)?;
        let probs = probe.reconstruct(&v)?;
        if probs.len() != schema.total_dim() {
            return Err(Error::Dimension {
                expected: schema.total_dim(),
                found: probs.len(),
            });
        }
        let min_marked = combo
            .iter()
            .map(|&i| probs[schema.index_of(i)])
            .fold(f64::INFINITY, f64::min);
        Ok(Outcome {
            combo,
            min_marked,
            probs,
        })
    };
    if workers == 1 {
        return combos.into_iter().map(run).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    // par_iter preserves input order on collect
    pool.install(|| combos.into_par_iter().map(run).collect())
}

/// Level-wise probing shared by every variant. `visit` sees each outcome
/// that clears `threshold`; singletons that fail it leave the pool.
fn level_wise<P, F>(
    probe: &P,
    mut pool: Vec<Item>,
    max_size: usize,
    threshold: f64,
    workers: usize,
    mut visit: F,
) -> Result<ExtractionStats>
where
    P: Probe + ?Sized,
    F: FnMut(&Outcome),
{
    pool.sort();
    pool.dedup();
    let mut stats = ExtractionStats::default();
    for size in 1..=max_size {
        let combos = combinations(&pool, size);
        stats.probes_per_level.push(combos.len());
        if combos.is_empty() {
            continue;
        }
        let mut low: BTreeSet<Item> = BTreeSet::new();
        for outcome in probe_all(probe, combos, workers)? {
            if outcome.min_marked < threshold {
                if size == 1 {
                    low.insert(outcome.combo[0]);
                }
                continue;
            }
            visit(&outcome);
        }
        if !low.is_empty() {
            pool.retain(|i| !low.contains(i));
            stats.pruned.extend(low);
        }
    }
    Ok(stats)
}

fn rules_from<P: Probe + ?Sized>(
    probe: &P,
    config: &ExtractConfig,
    antecedent_pool: Vec<Item>,
    consequent_pool: &[Item],
) -> Result<(Vec<Rule>, ExtractionStats)> {
    config.validate()?;
    let schema = probe.schema();
    let mut rules = Vec::new();
    let stats = level_wise(
        probe,
        antecedent_pool,
        config.max_antecedents,
        config.tau_a,
        config.workers,
        |o| {
            for &c in consequent_pool {
                if o.combo.iter().any(|a| a.feature == c.feature) {
                    continue;
                }
                let p = o.probs[schema.index_of(c)];
                if p > config.tau_c {
                    rules.push(Rule {
                        antecedent: o.combo.clone(),
                        consequent: c,
                        antecedent_prob: Some(o.min_marked),
                        consequent_prob: Some(p),
                        support: None,
                        confidence: None,
                    });
                }
            }
        },
    )?;
    rules.sort_by(|a, b| a.key().cmp(&b.key()));
    if let Some(k) = config.top_k {
        rules = top_k_filter(rules, k);
    }
    Ok((rules, stats))
}

/// Association rules with up to `max_antecedents` antecedent items.
pub fn extract_rules<P: Probe + ?Sized>(probe: &P, config: &ExtractConfig) -> Result<Vec<Rule>> {
    extract_rules_with_stats(probe, config).map(|(r, _)| r)
}

pub fn extract_rules_with_stats<P: Probe + ?Sized>(
    probe: &P,
    config: &ExtractConfig,
) -> Result<(Vec<Rule>, ExtractionStats)> {
    let all: Vec<Item> = probe.schema().items().collect();
    rules_from(probe, config, all.clone(), &all)
}

/// Rules whose antecedents come from `constraints.antecedent` and whose
/// consequents come from `constraints.consequent`.
pub fn extract_constrained<P: Probe + ?Sized>(
    probe: &P,
    config: &ExtractConfig,
) -> Result<Vec<Rule>> {
    let constraints = config.check_constraints(probe.schema())?;
    let mut consequents = constraints.consequent.clone();
    consequents.sort();
    consequents.dedup();
    rules_from(probe, config, constraints.antecedent.clone(), &consequents).map(|(r, _)| r)
}

/// Item combinations whose marked items all reconstruct at or above `tau_i`.
pub fn extract_itemsets<P: Probe + ?Sized>(
    probe: &P,
    config: &ExtractConfig,
) -> Result<Vec<Itemset>> {
    extract_itemsets_with_stats(probe, config).map(|(i, _)| i)
}

pub fn extract_itemsets_with_stats<P: Probe + ?Sized>(
    probe: &P,
    config: &ExtractConfig,
) -> Result<(Vec<Itemset>, ExtractionStats)> {
    config.validate()?;
    let mut itemsets = Vec::new();
    let stats = level_wise(
        probe,
        probe.schema().items().collect(),
        config.max_antecedents,
        config.tau_i,
        config.workers,
        |o| {
            itemsets.push(Itemset {
                items: o.combo.clone(),
                prob: o.min_marked,
                support: None,
            })
        },
    )?;
    itemsets.sort_by(|a, b| a.items.cmp(&b.items));
    Ok((itemsets, stats))
}
