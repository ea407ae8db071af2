//! Deterministic synthetic WSJ-like corpus.
//!
//! Documents are built from small clause templates. Every implicit relation
//! carries sense-specific cue words in both arguments, so sense classification
//! is learnable; a configurable fraction uses location-dependent cues whose
//! sense differs between inter- and intra-sentential use. Linked explicit
//! relations favour VP coordination, and sentences holding a stand-alone
//! intra-sentential implicit or AltLex relation are comma-conjoined, which
//! gives the two recognizers a syntactic signal.

use std::collections::BTreeMap;
use std::fs;
use std::ops::Range;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::format::{serialize_relations, RelationFormat};
use super::{ByteSpanList, Corpus, RelType, RelationRecord};
use crate::error::{Error, Result};
use crate::sense::{Level1, SenseLabel};
use crate::treebank::TreeNode;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    /// Number of documents, at most 2500.
    pub docs: usize,
    /// Fraction of implicit relations whose cue words are shared across
    /// senses and only disambiguated by location.
    pub ambiguity: f64,
}

impl SynthConfig {
    pub fn new(seed: u64, docs: usize) -> Self {
        SynthConfig {
            seed,
            docs,
            ambiguity: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub texts: BTreeMap<String, String>,
    pub trees: BTreeMap<String, Vec<TreeNode>>,
    pub relations: Vec<RelationRecord>,
}

/// Same seed and size give byte-identical output.
pub fn generate_synthetic_corpus(seed: u64, size: usize) -> Result<SyntheticCorpus> {
    generate(SynthConfig::new(seed, size))
}

const FILLER_NOUNS: &[&str] = &[
    "market", "price", "company", "bond", "share", "trader", "index", "rate", "plan", "bank", "fund",
    "report", "group", "deal", "investor", "profit", "stock", "yield", "dollar", "analyst",
];
const VERBS: &[&str] = &[
    "rises", "falls", "expects", "buys", "sells", "reports", "holds", "gains", "loses", "signs",
];
const ADVERBS: &[&str] = &["sharply", "slightly", "again", "today", "quickly"];
const DETS: &[&str] = &["the", "a", "this", "its"];
const AMBIGUOUS_CUES: &[&str] = &["amb0", "amb1", "amb2", "amb3"];

// (level2, level3 options, weight)
type Dist = &'static [(Level1, &'static str, &'static [&'static str], f64)];

const INTRA: Dist = &[
    (Level1::Contingency, "Purpose", &["Arg2-as-goal"], 0.20),
    (Level1::Contingency, "Cause", &["Reason", "Result"], 0.20),
    (Level1::Expansion, "Conjunction", &[], 0.12),
    (Level1::Temporal, "Asynchronous", &["Precedence", "Succession"], 0.12),
    (Level1::Contingency, "Condition", &["Arg2-as-cond"], 0.12),
    (Level1::Expansion, "Manner", &["Arg2-as-manner"], 0.12),
    (Level1::Expansion, "Level-of-detail", &["Arg2-as-detail"], 0.12),
];
const INTER: Dist = &[
    (Level1::Contingency, "Cause", &["Reason", "Result"], 0.22),
    (Level1::Expansion, "Conjunction", &[], 0.20),
    (Level1::Expansion, "Level-of-detail", &["Arg2-as-detail", "Arg1-as-detail"], 0.16),
    (Level1::Expansion, "Instantiation", &["Arg2-as-instance"], 0.12),
    (Level1::Comparison, "Concession", &["Arg2-as-denier"], 0.12),
    (Level1::Comparison, "Contrast", &[], 0.10),
    (Level1::Temporal, "Asynchronous", &["Precedence"], 0.08),
];
const LINKED: Dist = &[
    (Level1::Contingency, "Cause", &["Result"], 0.40),
    (Level1::Temporal, "Asynchronous", &["Precedence"], 0.30),
    (Level1::Contingency, "Condition", &["Arg2-as-cond"], 0.15),
    (Level1::Expansion, "Manner", &["Arg2-as-manner"], 0.15),
];

fn draw_sense(rng: &mut ChaCha8Rng, dist: Dist) -> SenseLabel {
    let total: f64 = dist.iter().map(|d| d.3).sum();
    let mut x = rng.gen::<f64>() * total;
    let mut pick = &dist[dist.len() - 1];
    for d in dist {
        if x < d.3 {
            pick = d;
            break;
        }
        x -= d.3;
    }
    let l3 = pick.2.choose(rng).copied();
    SenseLabel::new(pick.0, pick.1, l3).expect("synthetic inventory is valid")
}

/// Cue words of a level-2 type: `purpose0` .. `purpose3`.
pub fn cue_words(sense: &SenseLabel) -> Vec<String> {
    let stem: String = sense
        .level2
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect();
    (0..4).map(|i| format!("{stem}{i}")).collect()
}

struct SentBuf {
    leaves: Vec<(String, String)>,
}

impl SentBuf {
    fn leaf(&mut self, tag: &str, tok: &str) -> TreeNode {
        self.leaves.push((tag.to_string(), tok.to_string()));
        TreeNode::leaf(tag, tok)
    }
}

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn pick<'a>(&mut self, xs: &'a [&'a str]) -> &'a str {
        xs.choose(&mut self.rng).copied().unwrap()
    }

    fn noun(&mut self, cues: &[String], i: usize) -> String {
        match cues.get(i) {
            Some(c) => c.clone(),
            None => self.pick(FILLER_NOUNS).to_string(),
        }
    }

    fn subject(&mut self, b: &mut SentBuf, cues: &[String]) -> TreeNode {
        let det = self.pick(DETS);
        let n = self.noun(cues, 0);
        TreeNode::internal("NP-SBJ", vec![b.leaf("DT", det), b.leaf("NN", &n)])
    }

    fn predicate(&mut self, b: &mut SentBuf, cues: &[String], cue_at: usize) -> TreeNode {
        let v = self.pick(VERBS);
        let mut kids = vec![b.leaf("VBZ", v)];
        let n = self.noun(cues, cue_at);
        kids.push(TreeNode::internal("NP", vec![b.leaf("NN", &n)]));
        if self.rng.gen_bool(0.3) {
            let a = self.pick(ADVERBS);
            kids.push(TreeNode::internal("ADVP", vec![b.leaf("RB", a)]));
        }
        if self.rng.gen_bool(0.15) {
            kids.push(TreeNode::internal("ADVP", vec![b.leaf("-NONE-", "*T*-1")]));
        }
        TreeNode::internal("VP", kids)
    }

    fn clause(&mut self, b: &mut SentBuf, cues: &[String]) -> TreeNode {
        let np = self.subject(b, cues);
        let vp = self.predicate(b, cues, 1);
        TreeNode::internal("S", vec![np, vp])
    }

    /// Two cue words for an argument, drawn from `words`.
    fn cues(&mut self, words: &[String]) -> Vec<String> {
        let mut w = words.to_vec();
        w.shuffle(&mut self.rng);
        w.truncate(2);
        w
    }
}

fn root(children: Vec<TreeNode>) -> TreeNode {
    TreeNode::internal("", vec![TreeNode::internal("S", children)])
}

/// Spans expressed as leaf ranges of a document's sentences.
#[derive(Clone)]
struct LeafSpan(Vec<(usize, Range<usize>)>);

struct PendingRel {
    rel_type: RelType,
    conn: Option<String>,
    senses: Vec<SenseLabel>,
    arg1: LeafSpan,
    arg2: LeafSpan,
    conn_span: Option<LeafSpan>,
    link: Option<String>,
}

struct DocBuilder {
    sentences: Vec<(TreeNode, Vec<(String, String)>)>,
    paragraph_starts: Vec<usize>,
    rels: Vec<PendingRel>,
    next_link: usize,
}

impl DocBuilder {
    fn push(&mut self, tree: TreeNode, buf: SentBuf) -> usize {
        self.sentences.push((tree, buf.leaves));
        self.sentences.len() - 1
    }
}

fn one(sent: usize, r: Range<usize>) -> LeafSpan {
    LeafSpan(vec![(sent, r)])
}

pub fn generate(cfg: SynthConfig) -> Result<SyntheticCorpus> {
    if cfg.docs == 0 || cfg.docs > 2500 {
        return Err(Error::invalid(format!("document count must be in 1..=2500, got {}", cfg.docs)));
    }
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    let mut out = SyntheticCorpus {
        texts: BTreeMap::new(),
        trees: BTreeMap::new(),
        relations: Vec::new(),
    };
    for i in 0..cfg.docs {
        let section = (i % 25) as u8;
        let doc_id = format!("wsj_{:02}{:02}", section, i / 25);
        let mut d = DocBuilder {
            sentences: Vec::new(),
            paragraph_starts: Vec::new(),
            rels: Vec::new(),
            next_link: 1,
        };
        let paragraphs = g.rng.gen_range(1..=3);
        for _ in 0..paragraphs {
            d.paragraph_starts.push(d.sentences.len());
            let units = g.rng.gen_range(2..=4);
            for _ in 0..units {
                let r: f64 = g.rng.gen();
                if r < 0.30 {
                    inter_pair(&mut g, &mut d, cfg.ambiguity);
                } else if r < 0.58 {
                    comma_intra(&mut g, &mut d, cfg.ambiguity);
                } else if r < 0.80 {
                    explicit(&mut g, &mut d);
                } else if r < 0.88 {
                    altlex(&mut g, &mut d);
                } else {
                    filler_pair(&mut g, &mut d);
                }
            }
        }
        let (text, trees, rels) = layout(&doc_id, section, d)?;
        out.texts.insert(doc_id.clone(), text);
        out.trees.insert(doc_id, trees);
        out.relations.extend(rels);
    }
    Ok(out)
}

fn sense_and_cues(g: &mut Gen, dist: Dist, ambiguity: f64, ambiguous_sense: (Level1, &str)) -> (Vec<SenseLabel>, Vec<String>) {
    if g.rng.gen_bool(ambiguity) {
        let s = SenseLabel::new(ambiguous_sense.0, ambiguous_sense.1, None).unwrap();
        let words: Vec<String> = AMBIGUOUS_CUES.iter().map(|w| w.to_string()).collect();
        return (vec![s], words);
    }
    let first = draw_sense(&mut g.rng, dist);
    let mut words = cue_words(&first);
    let mut senses = vec![first];
    if g.rng.gen_bool(0.08) {
        let second = draw_sense(&mut g.rng, dist);
        if second.level2 != senses[0].level2 {
            words.push(cue_words(&second)[0].clone());
            senses.push(second);
        }
    }
    (senses, words)
}

fn inter_pair(g: &mut Gen, d: &mut DocBuilder, ambiguity: f64) {
    let (senses, words) = sense_and_cues(g, INTER, ambiguity, (Level1::Expansion, "Instantiation"));
    let c1 = g.cues(&words);
    let mut b = SentBuf { leaves: Vec::new() };
    let s = g.clause(&mut b, &c1);
    let n1 = b.leaves.len();
    let dot = b.leaf(".", ".");
    let (np, vp) = match s {
        TreeNode::Internal { children, .. } => (children[0].clone(), children[1].clone()),
        _ => unreachable!(),
    };
    let first = d.push(root(vec![np, vp, dot]), b);

    let c2 = g.cues(&words);
    let mut b = SentBuf { leaves: Vec::new() };
    // Attribution inside Arg2 makes it discontinuous.
    let arg2 = if g.rng.gen_bool(0.25) {
        let np = g.subject(&mut b, &c2);
        let a_end = b.leaves.len();
        let d1 = b.leaf(":", "--");
        let src = TreeNode::internal("NP-SBJ", vec![b.leaf("NNS", "officials")]);
        let said = TreeNode::internal("VP", vec![b.leaf("VBD", "said")]);
        let d2 = b.leaf(":", "--");
        let prn = TreeNode::internal("PRN", vec![d1, TreeNode::internal("S", vec![src, said]), d2]);
        let resume = b.leaves.len();
        let vp = g.predicate(&mut b, &c2, 1);
        let end = b.leaves.len();
        let dot = b.leaf(".", ".");
        let idx = d.push(root(vec![np, prn, vp, dot]), b);
        LeafSpan(vec![(idx, 0..a_end), (idx, resume..end)])
    } else {
        let c = g.clause(&mut b, &c2);
        let end = b.leaves.len();
        let dot = b.leaf(".", ".");
        let (np, vp) = match c {
            TreeNode::Internal { children, .. } => (children[0].clone(), children[1].clone()),
            _ => unreachable!(),
        };
        let idx = d.push(root(vec![np, vp, dot]), b);
        one(idx, 0..end)
    };
    let conn = implicit_conn(&senses[0]);
    d.rels.push(PendingRel {
        rel_type: RelType::Implicit,
        conn: Some(conn.into()),
        senses,
        arg1: one(first, 0..n1),
        arg2,
        conn_span: None,
        link: None,
    });
}

fn comma_intra(g: &mut Gen, d: &mut DocBuilder, ambiguity: f64) {
    let (senses, words) = sense_and_cues(g, INTRA, ambiguity, (Level1::Contingency, "Purpose"));
    let mut b = SentBuf { leaves: Vec::new() };
    let c1 = g.cues(&words);
    let s1 = g.clause(&mut b, &c1);
    let a1 = 0..b.leaves.len();
    let comma = b.leaf(",", ",");
    let c2 = g.cues(&words);
    let start2 = b.leaves.len();
    let s2 = g.clause(&mut b, &c2);
    let a2 = start2..b.leaves.len();
    let dot = b.leaf(".", ".");
    let idx = d.push(root(vec![s1, comma, s2, dot]), b);
    let conn = implicit_conn(&senses[0]);
    d.rels.push(PendingRel {
        rel_type: RelType::Implicit,
        conn: Some(conn.into()),
        senses,
        arg1: one(idx, a1),
        arg2: one(idx, a2),
        conn_span: None,
        link: None,
    });
}

fn explicit(g: &mut Gen, d: &mut DocBuilder) {
    let linked = g.rng.gen_bool(0.35);
    // Linked relations mostly coordinate VPs; a minority look like stand-alone ones.
    let vp_coord = if linked { g.rng.gen_bool(0.8) } else { g.rng.gen_bool(0.15) };
    let (implicit_sense, words) = if linked {
        let s = draw_sense(&mut g.rng, LINKED);
        let w = cue_words(&s);
        (Some(s), w)
    } else {
        (None, Vec::new())
    };
    let (conn, conn_sense) = if vp_coord {
        ("and", SenseLabel::new(Level1::Expansion, "Conjunction", None).unwrap())
    } else {
        match g.rng.gen_range(0..3) {
            0 => ("but", SenseLabel::new(Level1::Comparison, "Concession", Some("Arg2-as-denier")).unwrap()),
            1 => ("because", SenseLabel::new(Level1::Contingency, "Cause", Some("Reason")).unwrap()),
            _ => ("when", SenseLabel::new(Level1::Temporal, "Synchronous", None).unwrap()),
        }
    };
    let mut b = SentBuf { leaves: Vec::new() };
    let c1 = g.cues(&words);
    let c2 = g.cues(&words);
    let (tree_kids, a1, cr, a2);
    if vp_coord {
        let np = g.subject(&mut b, &c1);
        let vp1 = g.predicate(&mut b, &c1, 1);
        a1 = 0..b.leaves.len();
        let cc = b.leaf("CC", conn);
        cr = a1.end..b.leaves.len();
        let vp2 = g.predicate(&mut b, &c2, 0);
        a2 = cr.end..b.leaves.len();
        let dot = b.leaf(".", ".");
        tree_kids = vec![np, TreeNode::internal("VP", vec![vp1, cc, vp2]), dot];
    } else {
        let s1 = g.clause(&mut b, &c1);
        a1 = 0..b.leaves.len();
        let tag = if conn == "but" { "CC" } else { "IN" };
        let c = b.leaf(tag, conn);
        cr = a1.end..b.leaves.len();
        let s2 = g.clause(&mut b, &c2);
        a2 = cr.end..b.leaves.len();
        let dot = b.leaf(".", ".");
        tree_kids = if tag == "CC" {
            vec![s1, c, s2, dot]
        } else {
            vec![s1, TreeNode::internal("SBAR", vec![c, s2]), dot]
        };
    }
    let idx = d.push(root(tree_kids), b);
    let link = implicit_sense.as_ref().map(|_| {
        let l = d.next_link.to_string();
        d.next_link += 1;
        l
    });
    d.rels.push(PendingRel {
        rel_type: RelType::Explicit,
        conn: Some(conn.into()),
        senses: vec![conn_sense],
        arg1: one(idx, a1.clone()),
        arg2: one(idx, a2.clone()),
        conn_span: Some(one(idx, cr)),
        link: link.clone(),
    });
    if let Some(s) = implicit_sense {
        d.rels.push(PendingRel {
            rel_type: RelType::Implicit,
            conn: Some(implicit_conn(&s).into()),
            senses: vec![s],
            arg1: one(idx, a1),
            arg2: one(idx, a2),
            conn_span: None,
            link,
        });
    }
}

fn altlex(g: &mut Gen, d: &mut DocBuilder) {
    let sense = SenseLabel::new(Level1::Contingency, "Cause", Some("Result")).unwrap();
    let words = cue_words(&sense);
    let mut b = SentBuf { leaves: Vec::new() };
    let c1 = g.cues(&words);
    let s1 = g.clause(&mut b, &c1);
    let a1 = 0..b.leaves.len();
    let comma = b.leaf(",", ",");
    let cs = b.leaves.len();
    let vbg = b.leaf("VBG", "resulting");
    let inn = b.leaf("IN", "in");
    let ce = b.leaves.len();
    let c2 = g.cues(&words);
    let s2 = g.clause(&mut b, &c2);
    let a2 = ce..b.leaves.len();
    let dot = b.leaf(".", ".");
    let vp = TreeNode::internal("VP", vec![vbg, TreeNode::internal("PP", vec![inn, s2])]);
    let idx = d.push(root(vec![s1, comma, vp, dot]), b);
    d.rels.push(PendingRel {
        rel_type: RelType::AltLex,
        conn: Some("resulting in".into()),
        senses: vec![sense],
        arg1: one(idx, a1),
        arg2: one(idx, a2),
        conn_span: Some(one(idx, cs..ce)),
        link: None,
    });
}

fn filler_pair(g: &mut Gen, d: &mut DocBuilder) {
    let kind = [RelType::EntRel, RelType::NoRel, RelType::Hypophora, RelType::AltLexC]
        .choose(&mut g.rng)
        .copied()
        .unwrap();
    let mut b = SentBuf { leaves: Vec::new() };
    let s = g.clause(&mut b, &[]);
    let n1 = b.leaves.len();
    let dot = b.leaf(".", ".");
    let first = d.push(root(vec![s, dot]), b);
    let mut b = SentBuf { leaves: Vec::new() };
    let (arg2, conn_span, conn, senses);
    if kind == RelType::AltLexC {
        let that = TreeNode::internal("NP-SBJ", vec![b.leaf("DT", "That")]);
        let is = b.leaf("VBZ", "is");
        let why = b.leaf("WRB", "why");
        let ce = b.leaves.len();
        let s = g.clause(&mut b, &[]);
        let end = b.leaves.len();
        let dot = b.leaf(".", ".");
        let vp = TreeNode::internal("VP", vec![is, TreeNode::internal("SBAR", vec![why, s])]);
        let idx = d.push(root(vec![that, vp, dot]), b);
        arg2 = one(idx, ce..end);
        conn_span = Some(one(idx, 0..ce));
        conn = Some("that is why".to_string());
        senses = vec![SenseLabel::new(Level1::Contingency, "Cause", Some("Result")).unwrap()];
    } else {
        let s = g.clause(&mut b, &[]);
        let end = b.leaves.len();
        let dot = b.leaf(".", ".");
        let idx = d.push(root(vec![s, dot]), b);
        arg2 = one(idx, 0..end);
        conn_span = None;
        conn = None;
        senses = Vec::new();
    }
    d.rels.push(PendingRel {
        rel_type: kind,
        conn,
        senses,
        arg1: one(first, 0..n1),
        arg2,
        conn_span,
        link: None,
    });
}

fn implicit_conn(s: &SenseLabel) -> &'static str {
    match s.level2.as_str() {
        "Cause" => "because",
        "Purpose" => "in order to",
        "Conjunction" => "and",
        "Asynchronous" => "then",
        "Condition" => "if",
        "Manner" => "thereby",
        "Level-of-detail" => "specifically",
        "Substitution" => "instead",
        "Instantiation" => "for example",
        "Concession" => "however",
        "Contrast" => "by contrast",
        "Equivalence" => "in other words",
        _ => "and",
    }
}

fn layout(doc_id: &str, section: u8, d: DocBuilder) -> Result<(String, Vec<TreeNode>, Vec<RelationRecord>)> {
    let mut text = String::from(".START\n\n");
    let mut leaf_spans: Vec<Vec<(usize, usize)>> = Vec::new();
    for (si, (_, leaves)) in d.sentences.iter().enumerate() {
        if si > 0 {
            text.push_str(if d.paragraph_starts.contains(&si) { "\n\n" } else { " " });
        }
        let mut spans = Vec::with_capacity(leaves.len());
        let mut first = true;
        for (tag, tok) in leaves {
            if tag == "-NONE-" {
                spans.push((text.len(), text.len()));
                continue;
            }
            if !first && tok != "," && tok != "." {
                text.push(' ');
            }
            first = false;
            let s = text.len();
            text.push_str(tok);
            spans.push((s, text.len()));
        }
        leaf_spans.push(spans);
    }
    text.push('\n');
    let to_bytes = |ls: &LeafSpan| -> Result<ByteSpanList> {
        let v = ls
            .0
            .iter()
            .filter_map(|(si, r)| {
                let spans: Vec<(usize, usize)> = leaf_spans[*si][r.clone()]
                    .iter()
                    .copied()
                    .filter(|(a, b)| a < b)
                    .collect();
                Some((spans.first()?.0, spans.last()?.1))
            })
            .collect();
        ByteSpanList::new(v)
    };
    let mut rels = Vec::with_capacity(d.rels.len());
    for p in d.rels {
        let rec = RelationRecord {
            doc_id: doc_id.to_string(),
            section,
            rel_type: p.rel_type,
            conn: p.conn,
            senses: p.senses,
            arg1: to_bytes(&p.arg1)?,
            arg2: to_bytes(&p.arg2)?,
            conn_span: p.conn_span.as_ref().map(to_bytes).transpose()?,
            link: p.link,
        };
        rec.validate()?;
        rels.push(rec);
    }
    let trees = d.sentences.into_iter().map(|(t, _)| t).collect();
    Ok((text, trees, rels))
}

impl SyntheticCorpus {
    pub fn to_corpus(&self) -> Result<Corpus> {
        Corpus::from_parts(self.texts.clone(), self.trees.clone(), self.relations.clone())
    }

    /// Every surface token of every document, sorted and deduplicated.
    pub fn vocabulary(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .trees
            .values()
            .flatten()
            .flat_map(|t| t.tokens().into_iter().map(str::to_string).collect::<Vec<_>>())
            .collect();
        v.sort();
        v.dedup();
        v
    }

    /// Write `relations.jsonl`, `raw/<doc>`, `trees/<doc>.mrg` and a
    /// pipe-delimited copy under `pipe/<doc>`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir.join("raw"))?;
        fs::create_dir_all(dir.join("trees"))?;
        fs::create_dir_all(dir.join("pipe"))?;
        fs::write(
            dir.join("relations.jsonl"),
            serialize_relations(&self.relations, RelationFormat::JsonLines)?,
        )?;
        for (id, text) in &self.texts {
            fs::write(dir.join("raw").join(id), text)?;
        }
        for (id, trees) in &self.trees {
            let mut s = String::new();
            for t in trees {
                s.push_str(&t.to_bracketed());
                s.push('\n');
            }
            fs::write(dir.join("trees").join(format!("{id}.mrg")), s)?;
        }
        let mut by_doc: BTreeMap<&str, Vec<RelationRecord>> = BTreeMap::new();
        for r in &self.relations {
            by_doc.entry(&r.doc_id).or_default().push(r.clone());
        }
        for (id, rels) in by_doc {
            fs::write(
                dir.join("pipe").join(id),
                serialize_relations(&rels, RelationFormat::PipeDelimited)?,
            )?;
        }
        Ok(())
    }
}
