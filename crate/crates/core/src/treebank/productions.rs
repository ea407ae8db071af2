use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::TreeNode;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductionRule {
    pub parent: String,
    pub children: Vec<String>,
}

impl fmt::Display for ProductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ->", self.parent)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductionMode {
    /// Phrasal expansions only; PoS -> word rules are skipped.
    #[default]
    InternalOnly,
    IncludeLexical,
}

/// One rule per labeled internal node, in preorder. The unlabeled outer
/// bracket contributes nothing.
pub fn extract_productions(tree: &TreeNode, mode: ProductionMode) -> Vec<ProductionRule> {
    let mut out = Vec::new();
    collect(tree, mode, &mut out);
    out
}

fn collect(node: &TreeNode, mode: ProductionMode, out: &mut Vec<ProductionRule>) {
    match node {
        TreeNode::Leaf { label, token } => {
            if mode == ProductionMode::IncludeLexical {
                out.push(ProductionRule {
                    parent: label.clone(),
                    children: vec![token.clone()],
                });
            }
        }
        TreeNode::Internal { label, children } => {
            if !label.is_empty() {
                out.push(ProductionRule {
                    parent: label.clone(),
                    children: children.iter().map(|c| c.label().to_string()).collect(),
                });
            }
            for c in children {
                collect(c, mode, out);
            }
        }
    }
}

pub fn rule_counts<'a, I>(trees: I, mode: ProductionMode) -> HashMap<String, usize>
where
    I: IntoIterator<Item = &'a TreeNode>,
{
    let mut counts = HashMap::new();
    for t in trees {
        for r in extract_productions(t, mode) {
            *counts.entry(r.to_string()).or_insert(0) += 1;
        }
    }
    counts
}

/// Rule string to feature index, built from the most frequent training rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDictionary {
    pub mode: ProductionMode,
    /// Rule strings in index order.
    pub rules: Vec<String>,
}

impl FeatureDictionary {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn index_of(&self, rule: &str) -> Option<usize> {
        self.rules.iter().position(|r| r == rule)
    }

    /// `{rule: index}` JSON object.
    pub fn to_json(&self) -> Result<String> {
        let map: BTreeMap<&str, usize> = self
            .rules
            .iter()
            .enumerate()
            .map(|(i, r)| (r.as_str(), i))
            .collect();
        Ok(serde_json::to_string_pretty(&map)?)
    }

    pub fn from_json(text: &str, mode: ProductionMode) -> Result<Self> {
        let map: BTreeMap<String, usize> = serde_json::from_str(text)?;
        let mut pairs: Vec<(usize, String)> = map.into_iter().map(|(r, i)| (i, r)).collect();
        pairs.sort();
        for (expected, (i, r)) in pairs.iter().enumerate() {
            if *i != expected {
                return Err(crate::error::Error::validation(
                    "feature dictionary index",
                    format!("{r} -> {i}"),
                ));
            }
        }
        Ok(FeatureDictionary {
            mode,
            rules: pairs.into_iter().map(|(_, r)| r).collect(),
        })
    }
}

/// The `n` most frequent rules; equal counts ordered by rule string.
pub fn top_rules<'a, I>(trees: I, n: usize, mode: ProductionMode) -> FeatureDictionary
where
    I: IntoIterator<Item = &'a TreeNode>,
{
    let mut ranked: Vec<(String, usize)> = rule_counts(trees, mode).into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if ranked.len() < n {
        log::warn!(
            "only {} distinct production rules, fewer than the requested {n}",
            ranked.len()
        );
    }
    ranked.truncate(n);
    FeatureDictionary {
        mode,
        rules: ranked.into_iter().map(|(r, _)| r).collect(),
    }
}

/// Binary presence vector of dictionary rules over a relation's trees.
pub fn featurize<'a, I>(trees: I, dict: &FeatureDictionary) -> Vec<bool>
where
    I: IntoIterator<Item = &'a TreeNode>,
{
    let present: HashSet<String> = trees
        .into_iter()
        .flat_map(|t| extract_productions(t, dict.mode))
        .map(|r| r.to_string())
        .collect();
    dict.rules.iter().map(|r| present.contains(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_sexpr;

    const OIL_TOOL_TREE: &str = "( ( S ( NP-SBJ ( NN  Oil-tool ) ( NNS  prices ) ) ( VP ( VBP  are ) ( ADVP ( RB  even ) ) ( VP ( VBG  edging ) ( ADVP-DIR ( RP  up ) ) ) ) (  . . ) ) )";

    #[test]
    fn ex8_has_clause_rule() {
        let t = parse_sexpr(OIL_TOOL_TREE).unwrap();
        let rules: Vec<String> = extract_productions(&t, ProductionMode::InternalOnly)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert!(rules.contains(&"S -> NP-SBJ VP .".to_string()));
        assert_eq!(rules[0], "S -> NP-SBJ VP .");
    }

    #[test]
    fn lexical_mode() {
        let t = parse_sexpr("( ( S ( NP ( NN x ) ) ) )").unwrap();
        let internal: Vec<String> = extract_productions(&t, ProductionMode::InternalOnly)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(internal, vec!["S -> NP", "NP -> NN"]);
        let lexical: Vec<String> = extract_productions(&t, ProductionMode::IncludeLexical)
            .iter()
            .map(ToString::to_string)
            .collect();
        assert!(lexical.contains(&"NN -> x".to_string()));
    }

    #[test]
    fn tie_broken_lexicographically() {
        let a = parse_sexpr("( (S (NP (NN a)) (VP (VB b))) )").unwrap();
        let d = top_rules([&a], 2, ProductionMode::InternalOnly);
        // all three rules occur once
        assert_eq!(d.rules, vec!["NP -> NN", "S -> NP VP"]);
    }

    #[test]
    fn fewer_rules_than_requested() {
        let a = parse_sexpr("( (S (NN a)) )").unwrap();
        let d = top_rules([&a], 100, ProductionMode::InternalOnly);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn featurize_marks_present_rules() {
        let t = parse_sexpr(OIL_TOOL_TREE).unwrap();
        let d = FeatureDictionary {
            mode: ProductionMode::InternalOnly,
            rules: vec!["X -> Y".into(), "S -> NP-SBJ VP .".into()],
        };
        assert_eq!(featurize([&t], &d), vec![false, true]);
        let other = parse_sexpr("( (FRAG (NN a)) )").unwrap();
        assert_eq!(featurize([&other], &d), vec![false, false]);
    }

    #[test]
    fn dictionary_json_round_trip() {
        let d = FeatureDictionary {
            mode: ProductionMode::InternalOnly,
            rules: vec!["S -> NP VP".into(), "NP -> DT NN".into()],
        };
        let back = FeatureDictionary::from_json(&d.to_json().unwrap(), d.mode).unwrap();
        assert_eq!(back, d);
    }
}
