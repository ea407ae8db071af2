//! Stand-off discourse relation annotation.
//!
//! Relations reference the raw document by byte offsets. Whether a relation is
//! inter- or intra-sentential is never stored; it is recovered from the
//! argument spans and the sentence projections of the aligned trees.

mod format;
pub(crate) mod instances;
mod split;
mod store;
pub mod synth;

pub use format::{parse_relations, section_of, serialize_relations, RelationFormat};
pub use instances::{eval_view, make_instances, Instance, InstanceOptions, RelId, SensePolicy};
pub use split::{cv_folds, fold_train_ratio, random_split, standard_split, FoldSpec, Sectioned, Split, SplitSpec};
pub use store::{Corpus, CorpusPaths, Document};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sense::SenseLabel;

/// Ordered, non-overlapping, possibly discontinuous byte intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(usize, usize)>", into = "Vec<(usize, usize)>")]
pub struct ByteSpanList(Vec<(usize, usize)>);

impl ByteSpanList {
    pub fn new(spans: Vec<(usize, usize)>) -> Result<Self> {
        for &(s, e) in &spans {
            if s >= e {
                return Err(Error::validation("span", format!("{s}..{e}")));
            }
        }
        for w in spans.windows(2) {
            if w[0].1 > w[1].0 {
                return Err(Error::validation(
                    "span list",
                    format!("{}..{} overlaps or precedes {}..{}", w[0].0, w[0].1, w[1].0, w[1].1),
                ));
            }
        }
        Ok(ByteSpanList(spans))
    }

    pub fn single(start: usize, end: usize) -> Result<Self> {
        Self::new(vec![(start, end)])
    }

    pub fn spans(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_discontinuous(&self) -> bool {
        self.0.len() > 1
    }

    /// Smallest interval containing every span.
    pub fn hull(&self) -> Option<(usize, usize)> {
        Some((self.0.first()?.0, self.0.last()?.1))
    }
}

impl TryFrom<Vec<(usize, usize)>> for ByteSpanList {
    type Error = Error;

    fn try_from(v: Vec<(usize, usize)>) -> Result<Self> {
        ByteSpanList::new(v)
    }
}

impl From<ByteSpanList> for Vec<(usize, usize)> {
    fn from(s: ByteSpanList) -> Self {
        s.0
    }
}

/// PDTB notation: `12..30;41..50`.
impl fmt::Display for ByteSpanList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (s, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{s}..{e}")?;
        }
        Ok(())
    }
}

impl FromStr for ByteSpanList {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut spans = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (a, b) = part
                .split_once("..")
                .ok_or_else(|| Error::validation("span", part))?;
            let a = a.trim().parse().map_err(|_| Error::validation("span", part))?;
            let b = b.trim().parse().map_err(|_| Error::validation("span", part))?;
            spans.push((a, b));
        }
        ByteSpanList::new(spans)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelType {
    Explicit,
    Implicit,
    AltLex,
    AltLexC,
    EntRel,
    Hypophora,
    NoRel,
}

impl RelType {
    pub const ALL: [RelType; 7] = [
        RelType::Explicit,
        RelType::Implicit,
        RelType::AltLex,
        RelType::AltLexC,
        RelType::EntRel,
        RelType::Hypophora,
        RelType::NoRel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelType::Explicit => "Explicit",
            RelType::Implicit => "Implicit",
            RelType::AltLex => "AltLex",
            RelType::AltLexC => "AltLexC",
            RelType::EntRel => "EntRel",
            RelType::Hypophora => "Hypophora",
            RelType::NoRel => "NoRel",
        }
    }
}

impl fmt::Display for RelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Explicit" => Ok(RelType::Explicit),
            "Implicit" => Ok(RelType::Implicit),
            "AltLex" => Ok(RelType::AltLex),
            "AltLexC" => Ok(RelType::AltLexC),
            "EntRel" | "Entity" => Ok(RelType::EntRel),
            "Hypophora" => Ok(RelType::Hypophora),
            "NoRel" => Ok(RelType::NoRel),
            other => Err(Error::validation("relation type", other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub doc_id: String,
    pub section: u8,
    pub rel_type: RelType,
    #[serde(default)]
    pub conn: Option<String>,
    #[serde(default)]
    pub senses: Vec<SenseLabel>,
    pub arg1: ByteSpanList,
    pub arg2: ByteSpanList,
    #[serde(default)]
    pub conn_span: Option<ByteSpanList>,
    #[serde(default)]
    pub link: Option<String>,
}

impl RelationRecord {
    /// Record-local invariants. Link sharing is a document-level property,
    /// see [`link_warnings`].
    pub fn validate(&self) -> Result<()> {
        if self.section > 24 {
            return Err(Error::validation("section", self.section.to_string()));
        }
        if self.arg1.is_empty() || self.arg2.is_empty() {
            return Err(Error::validation("arguments", "empty Arg1 or Arg2 span list"));
        }
        match self.rel_type {
            RelType::Implicit | RelType::AltLex if self.senses.is_empty() => Err(Error::validation(
                "senses",
                format!("{} relation without a sense", self.rel_type),
            )),
            RelType::EntRel | RelType::NoRel if !self.senses.is_empty() => Err(Error::validation(
                "senses",
                format!("{} relation with senses", self.rel_type),
            )),
            _ if self.senses.len() > 4 => Err(Error::validation(
                "senses",
                format!("{} senses on one relation", self.senses.len()),
            )),
            _ => Ok(()),
        }
    }

    /// Arg1, Arg2 and connective spans together.
    pub fn all_spans(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arg1
            .spans()
            .iter()
            .chain(self.arg2.spans())
            .chain(self.conn_span.iter().flat_map(|c| c.spans()))
            .copied()
    }

    /// Hull over every span of the relation.
    pub fn hull(&self) -> (usize, usize) {
        let mut it = self.all_spans();
        let first = it.next().expect("arguments are non-empty");
        it.fold(first, |(a, b), (s, e)| (a.min(s), b.max(e)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Location {
    InterSentential,
    IntraSentential,
}

impl Location {
    pub fn is_intra(self) -> bool {
        self == Location::IntraSentential
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Location::InterSentential => "inter",
            Location::IntraSentential => "intra",
        }
    }
}

/// Intra-sentential iff every span of the relation falls inside a single
/// sentence projection. `sentences` are sorted, non-overlapping byte spans.
pub fn locate(rel: &RelationRecord, sentences: &[(usize, usize)]) -> Result<Location> {
    let mut host: Option<usize> = None;
    let mut single = true;
    for (s, e) in rel.all_spans() {
        let overlapping: Vec<usize> = sentences
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a < e && s < b)
            .map(|(i, _)| i)
            .collect();
        if overlapping.is_empty() {
            return Err(Error::Alignment {
                sentence: sentences.partition_point(|&(a, _)| a < s),
                msg: format!("{} span {s}..{e} of {} is outside every sentence", rel.rel_type, rel.doc_id),
            });
        }
        let i = overlapping[0];
        let (a, b) = sentences[i];
        let contained = overlapping.len() == 1 && a <= s && e <= b;
        match host {
            _ if !contained => single = false,
            None => host = Some(i),
            Some(h) if h != i => single = false,
            Some(_) => {}
        }
    }
    Ok(if single {
        Location::IntraSentential
    } else {
        Location::InterSentential
    })
}

/// True iff `rel` carries a link index shared with another relation of the document.
pub fn is_linked(rel: &RelationRecord, doc_relations: &[RelationRecord]) -> bool {
    linked_partners(rel, doc_relations).next().is_some()
}

/// Other relations of the document sharing `rel`'s link index.
pub fn linked_partners<'a>(
    rel: &'a RelationRecord,
    doc_relations: &'a [RelationRecord],
) -> impl Iterator<Item = &'a RelationRecord> + 'a {
    let mut skipped_self = false;
    doc_relations.iter().filter(move |r| {
        if rel.link.is_none() || r.link != rel.link || r.doc_id != rel.doc_id {
            return false;
        }
        if !skipped_self && (std::ptr::eq(*r, rel) || *r == rel) {
            skipped_self = true;
            return false;
        }
        true
    })
}

/// Link values carried by exactly one relation of a document.
pub fn link_warnings(doc_relations: &[RelationRecord]) -> Vec<String> {
    let mut counts: std::collections::BTreeMap<(&str, &str), usize> = Default::default();
    for r in doc_relations {
        if let Some(l) = &r.link {
            *counts.entry((r.doc_id.as_str(), l.as_str())).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .filter(|&(_, n)| n == 1)
        .map(|((d, l), _)| format!("{d}: link {l} is not shared by any other relation"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(t: RelType, a1: &[(usize, usize)], a2: &[(usize, usize)], link: Option<&str>) -> RelationRecord {
        RelationRecord {
            doc_id: "wsj_0001".into(),
            section: 0,
            rel_type: t,
            conn: None,
            senses: if matches!(t, RelType::EntRel | RelType::NoRel) {
                vec![]
            } else {
                vec!["Expansion.Conjunction".parse().unwrap()]
            },
            arg1: ByteSpanList::new(a1.to_vec()).unwrap(),
            arg2: ByteSpanList::new(a2.to_vec()).unwrap(),
            conn_span: None,
            link: link.map(str::to_string),
        }
    }

    #[test]
    fn span_list_invariants() {
        assert!(ByteSpanList::new(vec![(5, 5)]).is_err());
        assert!(ByteSpanList::new(vec![(5, 10), (8, 12)]).is_err());
        assert!(ByteSpanList::new(vec![(10, 12), (1, 3)]).is_err());
        let s: ByteSpanList = "1..3;10..12".parse().unwrap();
        assert!(s.is_discontinuous());
        assert_eq!(s.to_string(), "1..3;10..12");
    }

    #[test]
    fn locate_examples() {
        let sents = [(0, 50), (51, 100)];
        let intra = rel(RelType::Implicit, &[(0, 20)], &[(22, 49)], None);
        assert_eq!(locate(&intra, &sents).unwrap(), Location::IntraSentential);
        let inter = rel(RelType::Implicit, &[(0, 49)], &[(51, 99)], None);
        assert_eq!(locate(&inter, &sents).unwrap(), Location::InterSentential);
        // discontinuous Arg2 with a piece across the break
        let crossing = rel(RelType::Implicit, &[(0, 10)], &[(20, 30), (45, 60)], None);
        assert_eq!(locate(&crossing, &sents).unwrap(), Location::InterSentential);
        let outside = rel(RelType::Implicit, &[(0, 10)], &[(200, 210)], None);
        assert!(matches!(locate(&outside, &sents), Err(Error::Alignment { .. })));
    }

    #[test]
    fn linkage() {
        let a = rel(RelType::Explicit, &[(0, 5)], &[(6, 9)], Some("1"));
        let b = rel(RelType::Implicit, &[(0, 5)], &[(6, 10)], Some("1"));
        let c = rel(RelType::Implicit, &[(20, 25)], &[(26, 30)], None);
        let d = rel(RelType::Implicit, &[(30, 35)], &[(36, 40)], Some("7"));
        let doc = vec![a.clone(), b.clone(), c.clone(), d.clone()];
        assert!(is_linked(&doc[0], &doc));
        assert!(is_linked(&doc[1], &doc));
        assert!(!is_linked(&doc[2], &doc));
        assert!(!is_linked(&doc[3], &doc));
        let w = link_warnings(&doc);
        assert_eq!(w.len(), 1);
        assert!(w[0].contains("link 7"));
    }

    #[test]
    fn record_validation() {
        let mut r = rel(RelType::Implicit, &[(0, 5)], &[(6, 9)], None);
        r.senses.clear();
        assert!(r.validate().is_err());
        let mut e = rel(RelType::EntRel, &[(0, 5)], &[(6, 9)], None);
        assert!(e.validate().is_ok());
        e.senses.push("Expansion.Conjunction".parse().unwrap());
        assert!(e.validate().is_err());
    }
}
