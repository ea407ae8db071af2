use serde::{Deserialize, Serialize};

use crate::corpus::{linked_partners, Corpus, RelId, RelType, RelationRecord, Sectioned, Split, SplitSpec};
use crate::error::{Error, Result};
use crate::treebank::{featurize, top_rules, FeatureDictionary, ProductionMode, TreeNode};

/// One Explicit relation as production-rule presence features.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkedInstance {
    pub features: Vec<bool>,
    /// True iff the relation is linked with an Implicit relation.
    pub label: bool,
    pub rel_id: RelId,
    pub link: Option<String>,
    pub section: u8,
}

impl Sectioned for LinkedInstance {
    fn section(&self) -> u8 {
        self.section
    }
}

pub fn linked_with_implicit(rel: &RelationRecord, doc_relations: &[RelationRecord]) -> bool {
    linked_partners(rel, doc_relations).any(|p| p.rel_type == RelType::Implicit)
}

#[derive(Debug, Clone)]
pub struct LinkedDataset {
    pub dictionary: FeatureDictionary,
    pub split: Split<LinkedInstance>,
}

fn explicit_relations(corpus: &Corpus) -> impl Iterator<Item = (&crate::corpus::Document, usize, &RelationRecord)> {
    corpus.docs.iter().flat_map(|d| {
        d.relations
            .iter()
            .enumerate()
            .filter(|(_, r)| r.rel_type == RelType::Explicit)
            .map(move |(i, r)| (d, i, r))
    })
}

fn relation_trees<'a>(doc: &'a crate::corpus::Document, rel: &RelationRecord) -> Vec<&'a TreeNode> {
    doc.sentences_touching(rel).into_iter().map(|i| &doc.sentences[i].tree).collect()
}

/// Explicit relations under the standard split. The feature dictionary
/// holds the `n_features` most frequent rules of the training relations'
/// sentences.
pub fn build_linked_dataset(corpus: &Corpus, n_features: usize, mode: ProductionMode) -> Result<LinkedDataset> {
    let spec = SplitSpec::standard();
    let train_trees: Vec<&TreeNode> = explicit_relations(corpus)
        .filter(|(d, _, _)| spec.train.contains(&d.section))
        .flat_map(|(d, _, r)| relation_trees(d, r))
        .collect();
    if train_trees.is_empty() {
        return Err(Error::invalid("no parsed Explicit relations in the training sections"));
    }
    let dictionary = top_rules(train_trees, n_features, mode);
    let all: Vec<LinkedInstance> = explicit_relations(corpus)
        .map(|(d, i, r)| LinkedInstance {
            features: featurize(relation_trees(d, r), &dictionary),
            label: linked_with_implicit(r, &d.relations),
            rel_id: RelId {
                doc_id: d.doc_id.clone(),
                index: i,
            },
            link: r.link.clone(),
            section: d.section,
        })
        .collect();
    Ok(LinkedDataset {
        dictionary,
        split: spec.apply(&all),
    })
}

/// Bernoulli naive Bayes over binary features. Class 1 is "linked".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub alpha: f64,
    pub log_prior: [f64; 2],
    /// Per feature, per class: log P(x = 1 | c).
    pub log_present: Vec<[f64; 2]>,
    /// Per feature, per class: log P(x = 0 | c).
    pub log_absent: Vec<[f64; 2]>,
    /// Set when training saw one class only.
    pub constant: Option<bool>,
}

impl NaiveBayes {
    pub fn train<'a>(data: impl IntoIterator<Item = (&'a [bool], bool)>, alpha: f64) -> Result<NaiveBayes> {
        if !(alpha > 0.0) {
            return Err(Error::invalid(format!("smoothing constant must be positive, got {alpha}")));
        }
        let mut n = [0usize; 2];
        let mut on: Vec<[usize; 2]> = Vec::new();
        let mut width = None;
        for (x, y) in data {
            match width {
                None => {
                    width = Some(x.len());
                    on = vec![[0; 2]; x.len()];
                }
                Some(w) if w != x.len() => {
                    return Err(Error::shape(format!("feature vectors of length {w} and {}", x.len())));
                }
                _ => {}
            }
            let c = usize::from(y);
            n[c] += 1;
            for (k, &v) in x.iter().enumerate() {
                if v {
                    on[k][c] += 1;
                }
            }
        }
        let total = n[0] + n[1];
        if total == 0 {
            return Err(Error::invalid("naive Bayes needs at least one instance"));
        }
        let constant = match n {
            [0, _] => Some(true),
            [_, 0] => Some(false),
            _ => None,
        };
        if let Some(c) = constant {
            log::warn!("training data has one class only; predicting {} everywhere", if c { "linked" } else { "stand-alone" });
        }
        let prior = |c: usize| if n[c] == 0 { f64::NEG_INFINITY } else { (n[c] as f64 / total as f64).ln() };
        let lik = |k: usize, c: usize| (k as f64 + alpha) / (n[c] as f64 + 2.0 * alpha);
        Ok(NaiveBayes {
            alpha,
            log_prior: [prior(0), prior(1)],
            log_present: on.iter().map(|o| [lik(o[0], 0).ln(), lik(o[1], 1).ln()]).collect(),
            log_absent: on.iter().map(|o| [(1.0 - lik(o[0], 0)).ln(), (1.0 - lik(o[1], 1)).ln()]).collect(),
            constant,
        })
    }

    pub fn features(&self) -> usize {
        self.log_present.len()
    }

    /// Unnormalized class log scores `[stand-alone, linked]`.
    pub fn log_joint(&self, x: &[bool]) -> Result<[f64; 2]> {
        if x.len() != self.features() {
            return Err(Error::shape(format!("{} features for a model of {}", x.len(), self.features())));
        }
        let mut s = self.log_prior;
        for (k, &v) in x.iter().enumerate() {
            let t = if v { self.log_present[k] } else { self.log_absent[k] };
            s[0] += t[0];
            s[1] += t[1];
        }
        Ok(s)
    }

    /// P(linked | x).
    pub fn posterior(&self, x: &[bool]) -> Result<f64> {
        if let Some(c) = self.constant {
            self.log_joint(x)?;
            return Ok(if c { 1.0 } else { 0.0 });
        }
        let [a, b] = self.log_joint(x)?;
        Ok(1.0 / (1.0 + (a - b).exp()))
    }

    /// Linked iff its score is strictly higher; ties go to stand-alone.
    pub fn predict(&self, x: &[bool]) -> Result<bool> {
        if let Some(c) = self.constant {
            self.log_joint(x)?;
            return Ok(c);
        }
        let [a, b] = self.log_joint(x)?;
        Ok(b > a)
    }
}

/// A trained linked recognizer: the rule dictionary and the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkedRecognizer {
    pub dictionary: FeatureDictionary,
    pub model: NaiveBayes,
}

impl LinkedRecognizer {
    pub fn train(data: &LinkedDataset, alpha: f64) -> Result<LinkedRecognizer> {
        let model = NaiveBayes::train(data.split.train.iter().map(|i| (i.features.as_slice(), i.label)), alpha)?;
        Ok(LinkedRecognizer {
            dictionary: data.dictionary.clone(),
            model,
        })
    }

    pub fn predict_all(&self, data: &[LinkedInstance]) -> Result<Vec<bool>> {
        data.iter().map(|i| self.model.predict(&i.features)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<LinkedRecognizer> {
        Ok(serde_json::from_str(s)?)
    }
}
