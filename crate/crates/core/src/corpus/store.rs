use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::format::{parse_relations, section_of, RelationFormat};
use super::split::Sectioned;
use super::RelationRecord;
use crate::error::{Error, Result};
use crate::treebank::{align, parse_trees, ParsedSentence, TreeNode};

/// One WSJ document: raw text, aligned sentence trees and its relations.
#[derive(Debug, Clone)]
pub struct Document {
    pub doc_id: String,
    pub section: u8,
    pub text: Option<String>,
    pub sentences: Vec<ParsedSentence>,
    pub relations: Vec<RelationRecord>,
}

impl Document {
    pub fn sentence_spans(&self) -> Vec<(usize, usize)> {
        self.sentences.iter().map(|s| s.span).collect()
    }

    /// Index of the sentence whose projection contains `[start, end)`.
    pub fn sentence_containing(&self, start: usize, end: usize) -> Option<usize> {
        self.sentences
            .iter()
            .position(|s| s.span.0 <= start && end <= s.span.1)
    }

    /// Indices of sentences overlapping any span of the relation.
    pub fn sentences_touching(&self, rel: &RelationRecord) -> Vec<usize> {
        let mut out: Vec<usize> = rel
            .all_spans()
            .flat_map(|(s, e)| {
                self.sentences
                    .iter()
                    .enumerate()
                    .filter(move |(_, p)| p.overlaps(s, e))
                    .map(|(i, _)| i)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Sectioned for Document {
    fn section(&self) -> u8 {
        self.section
    }
}

/// Where a corpus lives on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusPaths {
    /// A JSON-lines file (or directory of them), or a directory of
    /// pipe-delimited files named by document id.
    pub relations: PathBuf,
    pub format: RelationFormat,
    /// Directory of bracketed tree files named by document id.
    #[serde(default)]
    pub trees: Option<PathBuf>,
    /// Directory of raw document texts named by document id.
    #[serde(default)]
    pub raw: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    /// Sorted by document id.
    pub docs: Vec<Document>,
}

fn doc_id_of(path: &Path) -> Option<String> {
    let stem = path.file_stem()?.to_str()?.to_string();
    section_of(&stem).map(|_| stem)
}

fn files_by_doc(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Io(e.into()))?;
        if entry.file_type().is_file() {
            if let Some(id) = doc_id_of(entry.path()) {
                out.insert(id, entry.path().to_path_buf());
            }
        }
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(e).in_file(path))
}

impl Corpus {
    /// Assemble documents from in-memory parts. Trees are aligned against the
    /// matching text; documents with trees but no text are rejected.
    pub fn from_parts(
        texts: BTreeMap<String, String>,
        trees: BTreeMap<String, Vec<TreeNode>>,
        relations: Vec<RelationRecord>,
    ) -> Result<Corpus> {
        let mut by_doc: BTreeMap<String, Vec<RelationRecord>> = BTreeMap::new();
        for r in relations {
            by_doc.entry(r.doc_id.clone()).or_default().push(r);
        }
        let mut ids: Vec<String> = by_doc.keys().chain(texts.keys()).chain(trees.keys()).cloned().collect();
        ids.sort();
        ids.dedup();
        let mut docs = Vec::with_capacity(ids.len());
        for id in ids {
            let section = section_of(&id).ok_or_else(|| Error::validation("document id", id.clone()))?;
            let text = texts.get(&id).cloned();
            let sentences = match (trees.get(&id), &text) {
                (Some(t), Some(txt)) => align(t, txt).map_err(|e| e.in_file(&id))?,
                (Some(_), None) => {
                    return Err(Error::invalid(format!("{id}: trees supplied without document text")))
                }
                (None, _) => Vec::new(),
            };
            docs.push(Document {
                section,
                text,
                sentences,
                relations: by_doc.remove(&id).unwrap_or_default(),
                doc_id: id,
            });
        }
        Ok(Corpus { docs })
    }

    pub fn load(paths: &CorpusPaths) -> Result<Corpus> {
        let relations = load_relations(&paths.relations, paths.format)?;
        let mut texts = BTreeMap::new();
        if let Some(raw) = &paths.raw {
            for (id, p) in files_by_doc(raw)? {
                texts.insert(id, read(&p)?);
            }
        }
        let mut trees = BTreeMap::new();
        if let Some(dir) = &paths.trees {
            for (id, p) in files_by_doc(dir)? {
                let parsed = parse_trees(&read(&p)?).map_err(|e| e.in_file(&p))?;
                trees.insert(id, parsed);
            }
        }
        Corpus::from_parts(texts, trees, relations)
    }

    pub fn relations(&self) -> impl Iterator<Item = &RelationRecord> {
        self.docs.iter().flat_map(|d| d.relations.iter())
    }

    pub fn doc(&self, doc_id: &str) -> Option<&Document> {
        self.docs
            .binary_search_by(|d| d.doc_id.as_str().cmp(doc_id))
            .ok()
            .map(|i| &self.docs[i])
    }

    pub fn sections(&self) -> Vec<u8> {
        let mut s: Vec<u8> = self.docs.iter().map(|d| d.section).collect();
        s.dedup();
        s
    }

    /// Documents whose section is in `sections`.
    pub fn restrict(&self, sections: &[u8]) -> Corpus {
        Corpus {
            docs: self
                .docs
                .iter()
                .filter(|d| sections.contains(&d.section))
                .cloned()
                .collect(),
        }
    }
}

fn load_relations(path: &Path, format: RelationFormat) -> Result<Vec<RelationRecord>> {
    let mut out = Vec::new();
    match format {
        RelationFormat::JsonLines if path.is_file() => {
            out = parse_relations(&read(path)?, format, None).map_err(|e| e.in_file(path))?;
        }
        RelationFormat::JsonLines => {
            for entry in WalkDir::new(path).sort_by_file_name() {
                let entry = entry.map_err(|e| Error::Io(e.into()))?;
                let p = entry.path();
                if entry.file_type().is_file() && p.extension().is_some_and(|e| e == "jsonl") {
                    out.extend(parse_relations(&read(p)?, format, None).map_err(|e| e.in_file(p))?);
                }
            }
        }
        RelationFormat::PipeDelimited => {
            for (id, p) in files_by_doc(path)? {
                out.extend(parse_relations(&read(&p)?, format, Some(&id)).map_err(|e| e.in_file(&p))?);
            }
        }
    }
    Ok(out)
}
