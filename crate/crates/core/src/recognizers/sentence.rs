use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{is_linked, locate, random_split, Corpus, Document, RelType, Split};
use crate::error::{Error, Result};
use crate::treebank::linearize;

/// One sentence as a linearized tree with its binary label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceInstance {
    pub tokens: Vec<String>,
    pub label: bool,
    pub doc_id: String,
    pub sentence: usize,
}

/// Per-sentence labels: true iff the sentence holds an intra-sentential
/// Implicit or AltLex relation that is not linked to another relation.
pub fn sentence_labels(doc: &Document) -> Result<Vec<bool>> {
    let spans = doc.sentence_spans();
    let mut labels = vec![false; spans.len()];
    for rel in &doc.relations {
        if !matches!(rel.rel_type, RelType::Implicit | RelType::AltLex) {
            continue;
        }
        let loc = locate(rel, &spans).map_err(|e| e.in_file(&doc.doc_id))?;
        if !loc.is_intra() || is_linked(rel, &doc.relations) {
            continue;
        }
        let (s, e) = rel.hull();
        if let Some(i) = doc.sentence_containing(s, e) {
            labels[i] = true;
        }
    }
    Ok(labels)
}

/// Every sentence of every document, split 60/20/20 at random.
pub fn build_sentence_dataset(corpus: &Corpus, seed: u64) -> Result<Split<SentenceInstance>> {
    let mut all = Vec::new();
    for doc in &corpus.docs {
        if doc.sentences.is_empty() {
            if !doc.relations.is_empty() {
                return Err(Error::invalid(format!("{}: relations without parse trees", doc.doc_id)));
            }
            continue;
        }
        let labels = sentence_labels(doc)?;
        for (i, (s, label)) in doc.sentences.iter().zip(labels).enumerate() {
            all.push(SentenceInstance {
                tokens: linearize(&s.tree),
                label,
                doc_id: doc.doc_id.clone(),
                sentence: i,
            });
        }
    }
    Ok(random_split(all, seed, 0.6, 0.2))
}

/// Up to `cap` most frequent tokens, frequency ties in lexicographic order.
pub fn build_vocab<'a>(sentences: impl IntoIterator<Item = &'a SentenceInstance>, cap: usize) -> Vec<String> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for s in sentences {
        for t in &s.tokens {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(cap);
    ranked.into_iter().map(|(t, _)| t.to_string()).collect()
}

/// Majority label of the training data; ties go to 0.
pub fn majority_baseline(labels: &[bool]) -> Result<bool> {
    if labels.is_empty() {
        return Err(Error::invalid("majority baseline over no labels"));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    Ok(pos * 2 > labels.len())
}

/// Accuracy and positive-class precision, recall and F1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryReport {
    pub n: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn binary_report(golds: &[bool], preds: &[bool]) -> Result<BinaryReport> {
    if golds.len() != preds.len() {
        return Err(Error::shape(format!("{} golds vs {} predictions", golds.len(), preds.len())));
    }
    let (mut tp, mut fp, mut fneg, mut ok) = (0usize, 0usize, 0usize, 0usize);
    for (&g, &p) in golds.iter().zip(preds) {
        match (g, p) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fneg += 1,
            _ => {}
        }
        ok += usize::from(g == p);
    }
    let div = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = div(tp, tp + fp);
    let recall = div(tp, tp + fneg);
    Ok(BinaryReport {
        n: golds.len(),
        accuracy: div(ok, golds.len()),
        precision,
        recall,
        f1: crate::eval::harmonic(precision, recall),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_ties_to_zero() {
        assert!(!majority_baseline(&[true, false]).unwrap());
        assert!(majority_baseline(&[true, true, false]).unwrap());
        assert!(majority_baseline(&[]).is_err());
    }

    #[test]
    fn all_negative_predictions() {
        let r = binary_report(&[false, false, true], &[false; 3]).unwrap();
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
        assert!((r.accuracy - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn vocab_tie_order() {
        let s = SentenceInstance {
            tokens: ["b", "a", "c", "c"].iter().map(|s| s.to_string()).collect(),
            label: false,
            doc_id: "wsj_0001".into(),
            sentence: 0,
        };
        assert_eq!(build_vocab([&s], 2), vec!["c", "a"]);
    }
}
