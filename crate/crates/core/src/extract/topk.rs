use std::collections::BTreeMap;

use super::Rule;
use crate::data::Item;

/// Keeps, per consequent, the `k` rules with the highest antecedent
/// probability (rules without one rank last). Ties go to the lexicographically smaller antecedent. The
/// result is in canonical `(antecedent, consequent)` order.
pub fn top_k_filter(rules: Vec<Rule>, k: usize) -> Vec<Rule> {
    let mut groups: BTreeMap<Item, Vec<Rule>> = BTreeMap::new();
    for r in rules {
        groups.entry(r.consequent).or_default().push(r);
    }
    let mut kept: Vec<Rule> = groups
        .into_values()
        .flat_map(|mut g| {
            g.sort_by(|a, b| {
                let score = |r: &Rule| r.antecedent_prob.unwrap_or(f64::NEG_INFINITY);
                score(b)
                    .total_cmp(&score(a))
                    .then_with(|| a.antecedent.cmp(&b.antecedent))
            });
            g.truncate(k);
            g
        })
        .collect();
    kept.sort_by(|a, b| a.key().cmp(&b.key()));
    kept
}
