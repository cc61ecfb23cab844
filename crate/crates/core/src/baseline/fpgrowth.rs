//! Frequent itemsets by FP-growth over a frequency-ordered prefix tree.

use std::collections::HashMap;

/// Item ids are dense `0..n_items`.
struct Node {
    item: usize,
    count: usize,
    parent: Option<usize>,
    children: HashMap<usize, usize>,
}

struct FpTree {
    nodes: Vec<Node>,
    /// Nodes carrying each item, indexed by item id.
    header: HashMap<usize, Vec<usize>>,
    /// Frequent items, most frequent first.
    order: Vec<usize>,
    totals: HashMap<usize, usize>,
}

impl FpTree {
    /// Builds a tree from weighted transactions, keeping items with total
    /// count at least `min_count`.
    fn build(transactions: &[(Vec<usize>, usize)], min_count: usize) -> Self {
        let mut totals: HashMap<usize, usize> = HashMap::new();
        for (items, w) in transactions {
            for &i in items {
                *totals.entry(i).or_default() += w;
            }
        }
        totals.retain(|_, c| *c >= min_count);
        let mut order: Vec<usize> = totals.keys().copied().collect();
        order.sort_by(|a, b| totals[b].cmp(&totals[a]).then(a.cmp(b)));
        let rank: HashMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();

        let mut tree = FpTree {
            nodes: vec![Node {
                item: usize::MAX,
                count: 0,
                parent: None,
                children: HashMap::new(),
            }],
            header: HashMap::new(),
            order,
            totals,
        };
        let mut path = Vec::new();
        for (items, w) in transactions {
            path.clear();
            path.extend(items.iter().copied().filter(|i| rank.contains_key(i)));
            path.sort_by_key(|i| rank[i]);
            tree.insert(&path, *w);
        }
        tree
    }

    fn insert(&mut self, path: &[usize], weight: usize) {
        let mut cur = 0;
        for &item in path {
            cur = match self.nodes[cur].children.get(&item) {
                Some(&child) => child,
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(Node {
                        item,
                        count: 0,
                        parent: Some(cur),
                        children: HashMap::new(),
                    });
                    self.nodes[cur].children.insert(item, idx);
                    self.header.entry(item).or_default().push(idx);
                    idx
                }
            };
            self.nodes[cur].count += weight;
        }
    }

    /// Prefix paths leading to `item`, each weighted by the item's count.
    fn conditional_base(&self, item: usize) -> Vec<(Vec<usize>, usize)> {
        self.header[&item]
            .iter()
            .map(|&n| {
                let mut path = Vec::new();
                let mut cur = self.nodes[n].parent;
                while let Some(p) = cur {
                    if p == 0 {
                        break;
                    }
                    path.push(self.nodes[p].item);
                    cur = self.nodes[p].parent;
                }
                (path, self.nodes[n].count)
            })
            .collect()
    }
}

/// Every itemset with count at least `min_count` and at most `max_len`
/// items, as sorted item ids with their counts.
pub fn frequent_itemsets(
    transactions: &[Vec<usize>],
    min_count: usize,
    max_len: usize,
) -> Vec<(Vec<usize>, usize)> {
    let weighted: Vec<(Vec<usize>, usize)> =
        transactions.iter().map(|t| (t.clone(), 1)).collect();
    let mut out = Vec::new();
    let mut suffix = Vec::new();
    mine(&FpTree::build(&weighted, min_count.max(1)), min_count.max(1), max_len, &mut suffix, &mut out);
    for (set, _) in &mut out {
        set.sort_unstable();
    }
    out
}

fn mine(
    tree: &FpTree,
    min_count: usize,
    max_len: usize,
    suffix: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, usize)>,
) {
    // least frequent first
    for &item in tree.order.iter().rev() {
        suffix.push(item);
        out.push((suffix.clone(), tree.totals[&item]));
        if suffix.len() < max_len {
            let base = tree.conditional_base(item);
            let sub = FpTree::build(&base, min_count);
            if !sub.order.is_empty() {
                mine(&sub, min_count, max_len, suffix, out);
            }
        }
        suffix.pop();
    }
}
