//! Level-wise Apriori search for frequent itemsets.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{AssocError, Transaction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Itemset {
    /// Items in ascending order.
    pub items: Vec<String>,
    /// Number of transactions containing every item.
    pub count: usize,
    pub support: f64,
}

/// All itemsets with support ≥ `min_support`, ordered by size then items.
pub fn mine_itemsets(transactions: &[Transaction], min_support: f64) -> Result<Vec<Itemset>, AssocError> {
    mine_itemsets_bounded(transactions, min_support, None)
}

/// As [`mine_itemsets`], stopping after itemsets of `max_len` items when given.
pub fn mine_itemsets_bounded(
    transactions: &[Transaction],
    min_support: f64,
    max_len: Option<usize>,
) -> Result<Vec<Itemset>, AssocError> {
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(AssocError::InvalidSupport(min_support));
    }
    let n = transactions.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let frequent = |count: usize| count as f64 / n as f64 >= min_support;

    // Item ids follow lexicographic order, so sorted id vectors are sorted item vectors.
    let universe: Vec<&String> = {
        let mut all: Vec<&String> = transactions.iter().flatten().collect();
        all.sort();
        all.dedup();
        all
    };
    let id_of: BTreeMap<&String, u32> = universe.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
    let encoded: Vec<Vec<u32>> = transactions
        .iter()
        .map(|t| t.iter().map(|s| id_of[s]).collect())
        .collect();

    let mut singles = vec![0usize; universe.len()];
    for t in &encoded {
        for &i in t {
            singles[i as usize] += 1;
        }
    }
    let mut level: Vec<(Vec<u32>, usize)> = singles
        .iter()
        .enumerate()
        .filter(|(_, &c)| frequent(c))
        .map(|(i, &c)| (vec![i as u32], c))
        .collect();

    let mut out = Vec::new();
    let mut size = 1;
    while !level.is_empty() {
        out.extend(level.iter().map(|(ids, count)| Itemset {
            items: ids.iter().map(|&i| universe[i as usize].clone()).collect(),
            count: *count,
            support: *count as f64 / n as f64,
        }));
        if max_len.is_some_and(|m| size >= m) {
            break;
        }
        let candidates = generate_candidates(&level);
        level = candidates
            .into_iter()
            .filter_map(|c| {
                let count = encoded.iter().filter(|t| is_subset(&c, t)).count();
                frequent(count).then_some((c, count))
            })
            .collect();
        size += 1;
    }
    Ok(out)
}

/// Joins itemsets sharing all but their last item, then drops candidates
/// with an infrequent subset.
fn generate_candidates(level: &[(Vec<u32>, usize)]) -> Vec<Vec<u32>> {
    let known: HashSet<&[u32]> = level.iter().map(|(ids, _)| ids.as_slice()).collect();
    let mut out = Vec::new();
    for (i, (a, _)) in level.iter().enumerate() {
        for (b, _) in &level[i + 1..] {
            let k = a.len();
            if a[..k - 1] != b[..k - 1] {
                // Level is sorted, so no later itemset shares this prefix.
                break;
            }
            let mut cand = a.clone();
            cand.push(b[k - 1]);
            let all_subsets_frequent = (0..cand.len()).all(|skip| {
                let sub: Vec<u32> = cand
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &x)| x)
                    .collect();
                known.contains(sub.as_slice())
            });
            if all_subsets_frequent {
                out.push(cand);
            }
        }
    }
    out
}

/// Both slices sorted ascending.
fn is_subset(small: &[u32], large: &[u32]) -> bool {
    let mut it = large.iter();
    small.iter().all(|x| it.any(|y| y == x))
}
