//! Rules A → B from frequent itemsets, with support, confidence and lift.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{AssocError, Itemset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationRule {
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

/// Every split of every frequent itemset with two or more items whose
/// confidence reaches `min_confidence`. Order follows `itemsets`, then the
/// antecedent bitmask.
pub fn derive_rules(itemsets: &[Itemset], min_confidence: f64) -> Result<Vec<AssociationRule>, AssocError> {
    if !(min_confidence > 0.0 && min_confidence <= 1.0) {
        return Err(AssocError::InvalidConfidence(min_confidence));
    }
    let support: HashMap<&[String], f64> = itemsets
        .iter()
        .map(|s| (s.items.as_slice(), s.support))
        .collect();
    let mut rules = Vec::new();
    for set in itemsets.iter().filter(|s| s.items.len() >= 2) {
        let n = set.items.len();
        for mask in 1..(1u64 << n) - 1 {
            let (antecedent, consequent): (Vec<String>, Vec<String>) = {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (i, item) in set.items.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        a.push(item.clone());
                    } else {
                        b.push(item.clone());
                    }
                }
                (a, b)
            };
            let (Some(&sa), Some(&sb)) = (support.get(antecedent.as_slice()), support.get(consequent.as_slice()))
            else {
                // Only reachable with a hand-built list that is not downward closed.
                continue;
            };
            let confidence = set.support / sa;
            if confidence >= min_confidence {
                rules.push(AssociationRule {
                    antecedent,
                    consequent,
                    support: set.support,
                    confidence,
                    lift: confidence / sb,
                });
            }
        }
    }
    Ok(rules)
}

/// CSV with header `antecedent,consequent,support,confidence,lift`. Item
/// lists are joined with "; ".
pub fn rules_to_csv(rules: &[AssociationRule]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["antecedent", "consequent", "support", "confidence", "lift"])
        .expect("write to Vec");
    for r in rules {
        w.write_record([
            r.antecedent.join("; "),
            r.consequent.join("; "),
            r.support.to_string(),
            r.confidence.to_string(),
            r.lift.to_string(),
        ])
        .expect("write to Vec");
    }
    String::from_utf8(w.into_inner().expect("flush Vec")).expect("utf-8")
}
