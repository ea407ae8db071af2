use serde::{Deserialize, Serialize};

use super::TreeNode;
use crate::error::{Error, Result};

/// How far past the cursor a leaf may be found. Covers document headers such
/// as `.START` and stray markup between sentences.
const SEARCH_WINDOW: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedLeaf {
    pub token: String,
    pub span: (usize, usize),
    pub is_trace: bool,
}

/// A tree aligned to the bytes of its source document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub tree: TreeNode,
    /// Projection of the top node: hull of the non-empty leaf spans.
    pub span: (usize, usize),
    pub leaves: Vec<AlignedLeaf>,
}

impl ParsedSentence {
    /// Surface leaves (no traces) whose span intersects `[start, end)`.
    pub fn tokens_in(&self, start: usize, end: usize) -> impl Iterator<Item = &AlignedLeaf> {
        self.leaves
            .iter()
            .filter(move |l| !l.is_trace && l.span.0 < end && start < l.span.1)
    }

    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        self.span.0 < end && start < self.span.1
    }

    /// Every internal node's hull contains the hulls of its descendants.
    pub fn spans_nested(&self) -> bool {
        let mut idx = 0;
        nested(&self.tree, &self.leaves, &mut idx).is_some()
    }
}

// Returns the hull of the subtree, or None on a nesting violation.
fn nested(node: &TreeNode, leaves: &[AlignedLeaf], idx: &mut usize) -> Option<Option<(usize, usize)>> {
    match node {
        TreeNode::Leaf { .. } => {
            let leaf = leaves.get(*idx)?;
            *idx += 1;
            Some(if leaf.is_trace { None } else { Some(leaf.span) })
        }
        TreeNode::Internal { children, .. } => {
            let mut hull: Option<(usize, usize)> = None;
            let mut spans = Vec::new();
            for c in children {
                if let Some(s) = nested(c, leaves, idx)? {
                    spans.push(s);
                    hull = Some(match hull {
                        None => s,
                        Some((a, b)) => (a.min(s.0), b.max(s.1)),
                    });
                }
            }
            if let Some((a, b)) = hull {
                if spans.iter().any(|&(s, e)| s < a || e > b) {
                    return None;
                }
            }
            Some(hull)
        }
    }
}

/// Surface strings a treebank token may correspond to in raw text.
pub fn unescape_candidates(token: &str) -> Vec<String> {
    let fixed: &[&str] = match token {
        "-LRB-" | "-LCB-" | "-LSB-" => match token {
            "-LRB-" => &["(", "{", "["],
            "-LCB-" => &["{"],
            _ => &["["],
        },
        "-RRB-" => &[")", "}", "]"],
        "-RCB-" => &["}"],
        "-RSB-" => &["]"],
        "``" => &["``", "\"", "\u{201c}", "'"],
        "''" => &["''", "\"", "\u{201d}", "'"],
        "`" => &["`", "'", "\u{2018}"],
        "--" => &["--", "-", "\u{2014}"],
        _ => &[],
    };
    let mut out: Vec<String> = fixed.iter().map(|s| s.to_string()).collect();
    let unslashed = token.replace("\\/", "/").replace("\\*", "*");
    let escaped = unslashed != token;
    if !out.contains(&unslashed) {
        out.push(unslashed);
    }
    if escaped && !out.iter().any(|c| c == token) {
        out.push(token.to_string());
    }
    out
}

/// Align sentence trees, in document order, to the document text.
pub fn align(trees: &[TreeNode], text: &str) -> Result<Vec<ParsedSentence>> {
    let mut cursor = 0usize;
    let mut out = Vec::with_capacity(trees.len());
    for (si, tree) in trees.iter().enumerate() {
        let mut leaves = Vec::new();
        let mut prev_token: Option<&str> = None;
        for leaf in tree.leaves() {
            let TreeNode::Leaf { label, token } = leaf else {
                unreachable!()
            };
            if leaf.is_trace() {
                leaves.push(AlignedLeaf {
                    token: token.clone(),
                    span: (cursor, cursor),
                    is_trace: true,
                });
                continue;
            }
            let start = skip_ws(text, cursor);
            let found = unescape_candidates(token)
                .into_iter()
                .find(|c| text[start..].starts_with(c.as_str()))
                .map(|c| (start, start + c.len()));
            let span = match found {
                Some(s) => s,
                // "U.S. ." - sentence-final period already consumed by the abbreviation
                None if label == "." && prev_token.is_some_and(|p| p.ends_with('.')) => (cursor, cursor),
                None => search_forward(text, start, token).ok_or_else(|| Error::Alignment {
                    sentence: si,
                    msg: format!("token {token:?} not found after byte {start}"),
                })?,
            };
            cursor = span.1;
            prev_token = Some(token);
            leaves.push(AlignedLeaf {
                token: token.clone(),
                span,
                is_trace: false,
            });
        }
        let hull = leaves
            .iter()
            .filter(|l| !l.is_trace && l.span.0 < l.span.1)
            .fold(None, |acc: Option<(usize, usize)>, l| match acc {
                None => Some(l.span),
                Some((a, b)) => Some((a.min(l.span.0), b.max(l.span.1))),
            })
            .ok_or_else(|| Error::Alignment {
                sentence: si,
                msg: "sentence has no surface tokens".into(),
            })?;
        for l in leaves.iter_mut().filter(|l| l.span.0 == l.span.1) {
            let p = l.span.0.clamp(hull.0, hull.1);
            l.span = (p, p);
        }
        out.push(ParsedSentence {
            tree: tree.clone(),
            span: hull,
            leaves,
        });
    }
    Ok(out)
}

fn skip_ws(text: &str, mut i: usize) -> usize {
    let b = text.as_bytes();
    while i < b.len() && b[i].is_ascii_whitespace() {
        i += 1;
    }
    i
}

fn search_forward(text: &str, start: usize, token: &str) -> Option<(usize, usize)> {
    let mut limit = (start + SEARCH_WINDOW).min(text.len());
    while !text.is_char_boundary(limit) {
        limit += 1;
    }
    unescape_candidates(token)
        .into_iter()
        .filter_map(|c| {
            let window_end = (limit + c.len()).min(text.len());
            let mut we = window_end;
            while !text.is_char_boundary(we) {
                we -= 1;
            }
            text[start..we].find(c.as_str()).map(|off| (start + off, start + off + c.len()))
        })
        .min_by_key(|s| s.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_sexpr;

    const HEADLINE_TREE: &str = "( ( S-HLN ( S ( NP-SBJ ( NN  MARKET ) ) ( VP ( VBZ MOVES ) ) ) ( , , ) ( S ( NP-SBJ ( DT  these ) ( NNS  managers ) ) ( VP ( VBP  do ) ( RB  n't ) ( VP ( -NONE-  *?* ) ) ) ) (  . . ) ) )";

    #[test]
    fn ex7_projection() {
        let text = ".START\n\nMARKET MOVES, these managers don't.\n";
        let t = parse_sexpr(HEADLINE_TREE).unwrap();
        let s = &align(&[t], text).unwrap()[0];
        assert_eq!(&text[s.span.0..s.span.1], "MARKET MOVES, these managers don't.");
        let trace = s.leaves.iter().find(|l| l.is_trace).unwrap();
        assert_eq!(trace.span.0, trace.span.1);
        assert!(s.spans_nested());
    }

    #[test]
    fn bracket_escape() {
        let t = parse_sexpr("( (S (-LRB- -LRB-) (NN x) (-RRB- -RRB-) (. .)) )").unwrap();
        let text = "(x).";
        let s = &align(&[t], text).unwrap()[0];
        assert_eq!(s.leaves[0].span, (0, 1));
        assert_eq!(s.leaves[2].span, (2, 3));
        assert_eq!(s.span, (0, 4));
    }

    #[test]
    fn abbreviation_final_period() {
        let t = parse_sexpr("( (S (NNP U.S.) (. .)) )").unwrap();
        let s = &align(&[t], "U.S.\nNext").unwrap()[0];
        assert_eq!(s.leaves[1].span, (4, 4));
        assert_eq!(s.span, (0, 4));
    }

    #[test]
    fn missing_token_names_sentence() {
        let a = parse_sexpr("( (S (NN a)) )").unwrap();
        let b = parse_sexpr("( (S (NN zzz)) )").unwrap();
        match align(&[a, b], "a b c") {
            Err(Error::Alignment { sentence, msg }) => {
                assert_eq!(sentence, 1);
                assert!(msg.contains("zzz"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn escape_table() {
        assert!(unescape_candidates("-LRB-").contains(&"(".to_string()));
        assert_eq!(unescape_candidates("1\\/2")[0], "1/2");
    }
}
