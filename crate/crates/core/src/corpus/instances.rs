use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::split::Sectioned;
use super::{is_linked, locate, Corpus, Document, Location, RelType, RelationRecord};
use crate::sense::SenseLabel;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelId {
    pub doc_id: String,
    /// Position of the relation in its document's relation list.
    pub index: usize,
}

/// One argument pair with one target sense.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub arg1_tokens: Vec<String>,
    pub arg2_tokens: Vec<String>,
    pub sense: SenseLabel,
    /// Every gold sense of the source relation; a prediction matching any of
    /// them is correct.
    pub gold: Vec<SenseLabel>,
    pub location: Location,
    pub linked: bool,
    pub rel_id: RelId,
    pub section: u8,
    pub rel_type: RelType,
}

impl Sectioned for Instance {
    fn section(&self) -> u8 {
        self.section
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensePolicy {
    /// One training instance per gold sense.
    #[default]
    AllSenses,
    FirstSense,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceOptions {
    pub policy: SensePolicy,
    pub include_altlex: bool,
}

/// Training instances for sense classification. Relations whose arguments
/// cannot be located or tokenized are skipped with a warning.
pub fn make_instances(corpus: &Corpus, opts: InstanceOptions) -> Vec<Instance> {
    let mut out = Vec::new();
    for doc in &corpus.docs {
        out.extend(doc_instances(doc, opts));
    }
    out
}

fn doc_instances(doc: &Document, opts: InstanceOptions) -> Vec<Instance> {
    let mut out = Vec::new();
    if doc.sentences.is_empty() {
        if doc.relations.iter().any(|r| wanted(r, opts)) {
            log::warn!("{}: no trees, relations skipped", doc.doc_id);
        }
        return out;
    }
    let spans = doc.sentence_spans();
    for (index, rel) in doc.relations.iter().enumerate() {
        if !wanted(rel, opts) {
            continue;
        }
        let location = match locate(rel, &spans) {
            Ok(l) => l,
            Err(e) => {
                log::warn!("{}#{index}: {e}", doc.doc_id);
                continue;
            }
        };
        let arg1 = arg_tokens(doc, rel.arg1.spans());
        let arg2 = arg_tokens(doc, rel.arg2.spans());
        if arg1.is_empty() || arg2.is_empty() {
            log::warn!("{}#{index}: argument without tokens", doc.doc_id);
            continue;
        }
        let linked = is_linked(rel, &doc.relations);
        let senses: &[SenseLabel] = match opts.policy {
            SensePolicy::AllSenses => &rel.senses,
            SensePolicy::FirstSense => &rel.senses[..1],
        };
        for sense in senses {
            out.push(Instance {
                arg1_tokens: arg1.clone(),
                arg2_tokens: arg2.clone(),
                sense: sense.clone(),
                gold: rel.senses.clone(),
                location,
                linked,
                rel_id: RelId {
                    doc_id: doc.doc_id.clone(),
                    index,
                },
                section: doc.section,
                rel_type: rel.rel_type,
            });
        }
    }
    out
}

fn wanted(rel: &RelationRecord, opts: InstanceOptions) -> bool {
    !rel.senses.is_empty()
        && (rel.rel_type == RelType::Implicit || (opts.include_altlex && rel.rel_type == RelType::AltLex))
}

/// Treebank leaves intersecting the spans; whitespace tokens of the raw text
/// for a span no leaf covers.
pub(crate) fn arg_tokens(doc: &Document, spans: &[(usize, usize)]) -> Vec<String> {
    let mut out = Vec::new();
    for &(s, e) in spans {
        let before = out.len();
        for sent in doc.sentences.iter().filter(|p| p.overlaps(s, e)) {
            out.extend(sent.tokens_in(s, e).map(|l| l.token.clone()));
        }
        if out.len() == before {
            if let Some(text) = doc.text.as_deref().and_then(|t| t.get(s..e)) {
                out.extend(text.split_whitespace().map(str::to_string));
            }
        }
    }
    out
}

/// One instance per source relation, first occurrence kept.
pub fn eval_view(instances: &[Instance]) -> Vec<&Instance> {
    let mut seen = HashSet::new();
    instances.iter().filter(|i| seen.insert(&i.rel_id)).collect()
}
