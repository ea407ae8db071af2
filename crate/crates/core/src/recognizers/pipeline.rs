use serde::{Deserialize, Serialize};

use super::linked::LinkedInstance;
use super::sentence::{binary_report, BinaryReport};
use crate::classifiers::SenseClassifier;
use crate::corpus::{instances::arg_tokens, linked_partners, locate, Corpus, Location, RelType};
use crate::error::{Error, Result};
use crate::eval::{evaluate, MetricsReport, Scored};

/// Sense assigned to the implicit relation behind one flagged explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelinePrediction {
    pub doc_id: String,
    pub link: Option<String>,
    pub location: Location,
    pub predicted: String,
    /// Gold senses of the linked implicit, empty for a false alarm.
    pub gold: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    /// Explicit relations flagged as linked.
    pub recognized: usize,
    /// Flagged relations that have a gold linked implicit.
    pub matched: usize,
    pub all_intra: bool,
    pub detection: BinaryReport,
    /// Sense scores over matched relations; `None` when nothing matched.
    pub sense: Option<MetricsReport>,
    /// Correctly sensed linked implicits over flagged and over gold counts.
    pub end_to_end_precision: f64,
    pub end_to_end_recall: f64,
    pub end_to_end_f1: f64,
}

/// Sense-label the implicit partners of explicit relations flagged as
/// linked. The explicit relation's arguments stand in for the implicit's;
/// gold is the Implicit relation sharing its document and link index.
pub fn pipeline_classify(
    corpus: &Corpus,
    instances: &[LinkedInstance],
    flagged: &[bool],
    classifier: &SenseClassifier,
) -> Result<(Vec<PipelinePrediction>, PipelineReport)> {
    if instances.len() != flagged.len() {
        return Err(Error::shape(format!("{} instances vs {} flags", instances.len(), flagged.len())));
    }
    let inv = classifier.inventory();
    let golds: Vec<bool> = instances.iter().map(|i| i.label).collect();
    let mut preds = Vec::new();
    let mut scored = Vec::new();
    for (inst, _) in instances.iter().zip(flagged).filter(|(_, &f)| f) {
        let doc = corpus
            .doc(&inst.rel_id.doc_id)
            .ok_or_else(|| Error::invalid(format!("unknown document {}", inst.rel_id.doc_id)))?;
        let rel = doc
            .relations
            .get(inst.rel_id.index)
            .ok_or_else(|| Error::invalid(format!("{}: no relation {}", doc.doc_id, inst.rel_id.index)))?;
        let location = locate(rel, &doc.sentence_spans()).map_err(|e| e.in_file(&doc.doc_id))?;
        let a1 = arg_tokens(doc, rel.arg1.spans());
        let a2 = arg_tokens(doc, rel.arg2.spans());
        let pred = classifier.predict(&a1, &a2, location)?;
        let gold_senses: Vec<_> = linked_partners(rel, &doc.relations)
            .filter(|p| p.rel_type == RelType::Implicit)
            .flat_map(|p| p.senses.iter())
            .collect();
        let mut gold: Vec<usize> = gold_senses.iter().filter_map(|s| inv.index_of(s)).collect();
        gold.dedup();
        if !gold.is_empty() {
            scored.push(Scored { gold: gold.clone(), pred, location });
        }
        preds.push(PipelinePrediction {
            doc_id: doc.doc_id.clone(),
            link: rel.link.clone(),
            location,
            predicted: inv.label(pred).to_string(),
            gold: gold.iter().map(|&g| inv.label(g).to_string()).collect(),
        });
    }
    let correct = scored.iter().filter(|s| s.correct()).count();
    let positives = golds.iter().filter(|&&g| g).count();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let p = ratio(correct, preds.len());
    let r = ratio(correct, positives);
    let report = PipelineReport {
        recognized: preds.len(),
        matched: scored.len(),
        all_intra: preds.iter().all(|p| p.location.is_intra()),
        detection: binary_report(&golds, flagged)?,
        sense: if scored.is_empty() {
            None
        } else {
            Some(evaluate(&scored, inv.labels())?)
        },
        end_to_end_precision: p,
        end_to_end_recall: r,
        end_to_end_f1: crate::eval::harmonic(p, r),
    };
    Ok((preds, report))
}
