//! Rule quality measured on data: support, confidence, coverage.

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Item};
use crate::extract::{Itemset, Rule};

fn count_containing(dataset: &Dataset, items: &[Item]) -> usize {
    dataset
        .rows()
        .iter()
        .filter(|row| items.iter().all(|i| row[i.feature] == i.category))
        .count()
}

/// Fraction of transactions containing every item. The empty itemset has
/// support 1.
pub fn support(dataset: &Dataset, items: &[Item]) -> f64 {
    if dataset.is_empty() {
        return 0.0;
    }
    count_containing(dataset, items) as f64 / dataset.len() as f64
}

/// `support(X ∪ {y})`.
pub fn rule_support(dataset: &Dataset, rule: &Rule) -> f64 {
    let mut all = rule.antecedent.clone();
    all.push(rule.consequent);
    support(dataset, &all)
}

/// `support(X ∪ {y}) / support(X)`; `None` when the antecedent never occurs.
pub fn confidence(dataset: &Dataset, rule: &Rule) -> Option<f64> {
    let ante = count_containing(dataset, &rule.antecedent);
    if ante == 0 {
        return None;
    }
    let mut all = rule.antecedent.clone();
    all.push(rule.consequent);
    Some(count_containing(dataset, &all) as f64 / ante as f64)
}

/// Fraction of transactions matched by at least one rule antecedent.
pub fn coverage(dataset: &Dataset, rules: &[Rule]) -> f64 {
    if dataset.is_empty() {
        return 0.0;
    }
    let covered = dataset
        .rows()
        .iter()
        .filter(|row| {
            rules
                .iter()
                .any(|r| r.antecedent.iter().all(|i| row[i.feature] == i.category))
        })
        .count();
    covered as f64 / dataset.len() as f64
}

/// Fills in `support` and `confidence` for every rule.
pub fn annotate_rules(dataset: &Dataset, rules: &mut [Rule]) {
    for r in rules {
        r.support = Some(rule_support(dataset, r));
        r.confidence = confidence(dataset, r);
    }
}

pub fn annotate_itemsets(dataset: &Dataset, itemsets: &mut [Itemset]) {
    for s in itemsets {
        s.support = Some(support(dataset, &s.items));
    }
}

/// Aggregate rule quality, one row of a comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rules: usize,
    pub seconds: f64,
    pub coverage: f64,
    pub mean_support: Option<f64>,
    /// Over rules with a defined confidence only.
    pub mean_confidence: Option<f64>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Rule count, data-measured mean support and confidence, coverage and
/// wall time.
pub fn summarize(dataset: &Dataset, rules: &[Rule], wall_time: Duration) -> Summary {
    Summary {
        rules: rules.len(),
        seconds: wall_time.as_secs_f64(),
        coverage: coverage(dataset, rules),
        mean_support: mean(rules.iter().map(|r| rule_support(dataset, r))),
        mean_confidence: mean(rules.iter().filter_map(|r| confidence(dataset, r))),
    }
}

/// Aligned text table of labelled summaries.
pub struct SummaryTable<'a>(pub &'a [(String, Summary)]);

impl fmt::Display for SummaryTable<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .0
            .iter()
            .map(|(l, _)| l.len())
            .chain(std::iter::once("Algorithm".len()))
            .max()
            .unwrap_or(0);
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
        writeln!(
            f,
            "{:<width$}  {:>8}  {:>9}  {:>6}  {:>8}  {:>6}",
            "Algorithm", "#Rules", "Time (s)", "Cov.", "Support", "Conf."
        )?;
        for (label, s) in self.0 {
            writeln!(
                f,
                "{:<width$}  {:>8}  {:>9.3}  {:>6.3}  {:>8}  {:>6}",
                label,
                s.rules,
                s.seconds,
                s.coverage,
                opt(s.mean_support),
                opt(s.mean_confidence)
            )?;
        }
        Ok(())
    }
}
