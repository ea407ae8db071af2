//! Penn-Treebank bracketed constituency trees.
//!
//! A [`TreeNode`] is either an internal constituent or a pre-terminal leaf
//! carrying its PoS tag and surface token. The unlabeled outer bracket used in
//! `.mrg` files (`( (S ...) )`) is kept as a root with an empty label; that is
//! the only place an empty label is accepted.

mod align;
mod productions;

pub use align::{align, unescape_candidates, AlignedLeaf, ParsedSentence};
pub use productions::{
    extract_productions, featurize, rule_counts, top_rules, FeatureDictionary, ProductionMode,
    ProductionRule,
};

use std::fmt;

use crate::error::{Error, Result};

/// PoS tag of empty elements (traces, null complementizers).
pub const TRACE_TAG: &str = "-NONE-";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TreeNode {
    Internal { label: String, children: Vec<TreeNode> },
    Leaf { label: String, token: String },
}

impl TreeNode {
    pub fn internal(label: impl Into<String>, children: Vec<TreeNode>) -> Self {
        TreeNode::Internal {
            label: label.into(),
            children,
        }
    }

    pub fn leaf(label: impl Into<String>, token: impl Into<String>) -> Self {
        TreeNode::Leaf {
            label: label.into(),
            token: token.into(),
        }
    }

    pub fn label(&self) -> &str {
        match self {
            TreeNode::Internal { label, .. } | TreeNode::Leaf { label, .. } => label,
        }
    }

    pub fn children(&self) -> &[TreeNode] {
        match self {
            TreeNode::Internal { children, .. } => children,
            TreeNode::Leaf { .. } => &[],
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    /// Empty element such as `(-NONE- *?*)`.
    pub fn is_trace(&self) -> bool {
        matches!(self, TreeNode::Leaf { label, .. } if label == TRACE_TAG)
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a TreeNode>) {
        match self {
            TreeNode::Leaf { .. } => out.push(self),
            TreeNode::Internal { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }

    /// Surface tokens of the leaves, traces included.
    pub fn tokens(&self) -> Vec<&str> {
        self.leaves()
            .into_iter()
            .map(|l| match l {
                TreeNode::Leaf { token, .. } => token.as_str(),
                TreeNode::Internal { .. } => unreachable!(),
            })
            .collect()
    }

    /// Number of nodes, including leaves.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(TreeNode::size).sum::<usize>()
    }

    /// Copy of the tree with empty elements removed. Constituents left without
    /// children are removed as well; `None` if nothing remains.
    pub fn strip_traces(&self) -> Option<TreeNode> {
        match self {
            TreeNode::Leaf { .. } if self.is_trace() => None,
            TreeNode::Leaf { .. } => Some(self.clone()),
            TreeNode::Internal { label, children } => {
                let kept: Vec<TreeNode> = children.iter().filter_map(TreeNode::strip_traces).collect();
                if kept.is_empty() {
                    None
                } else {
                    Some(TreeNode::internal(label.clone(), kept))
                }
            }
        }
    }

    /// Space-joined bracketed rendering; reparses to an equal tree.
    pub fn to_bracketed(&self) -> String {
        linearize(self).join(" ")
    }
}

impl fmt::Display for TreeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bracketed())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinearizeOptions {
    pub strip_traces: bool,
}

/// Bracket tokens, labels and surface tokens in reading order.
pub fn linearize(tree: &TreeNode) -> Vec<String> {
    let mut out = Vec::new();
    push_linear(tree, true, &mut out);
    out
}

pub fn linearize_with(tree: &TreeNode, opts: LinearizeOptions) -> Vec<String> {
    if opts.strip_traces {
        tree.strip_traces().map(|t| linearize(&t)).unwrap_or_default()
    } else {
        linearize(tree)
    }
}

fn push_linear(node: &TreeNode, root: bool, out: &mut Vec<String>) {
    out.push("(".to_string());
    match node {
        TreeNode::Leaf { label, token } => {
            out.push(label.clone());
            out.push(token.clone());
        }
        TreeNode::Internal { label, children } => {
            if !(root && label.is_empty()) {
                out.push(label.clone());
            }
            for c in children {
                push_linear(c, false, out);
            }
        }
    }
    out.push(")".to_string());
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(text: &str) -> Vec<(usize, Tok<'_>)> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            b if b.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !bytes[i].is_ascii_whitespace()
                    && bytes[i] != b'('
                    && bytes[i] != b')'
                {
                    i += 1;
                }
                out.push((start, Tok::Atom(&text[start..i])));
            }
        }
    }
    out
}

struct Parser<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<(usize, Tok<'a>)> {
        self.toks.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let pos = self.peek().map(|(p, _)| p).unwrap_or(self.end);
        Err(Error::TreeParse {
            pos,
            msg: msg.into(),
        })
    }

    fn node(&mut self, root: bool) -> Result<TreeNode> {
        match self.peek() {
            Some((_, Tok::Open)) => self.pos += 1,
            Some(_) => return self.err("expected '('"),
            None => return self.err("unexpected end of input"),
        }
        let label = match self.peek() {
            Some((_, Tok::Atom(a))) => {
                self.pos += 1;
                a.to_string()
            }
            Some((_, Tok::Open)) if root => String::new(),
            Some((_, Tok::Open)) => return self.err("constituent without label"),
            Some((_, Tok::Close)) => return self.err("empty constituent"),
            None => return self.err("unexpected end of input"),
        };
        match self.peek() {
            Some((_, Tok::Atom(token))) if !label.is_empty() => {
                self.pos += 1;
                self.close()?;
                Ok(TreeNode::leaf(label, token))
            }
            Some((_, Tok::Atom(_))) => self.err("token without PoS tag"),
            Some((_, Tok::Open)) => {
                let mut children = Vec::new();
                while let Some((_, Tok::Open)) = self.peek() {
                    children.push(self.node(false)?);
                }
                self.close()?;
                Ok(TreeNode::internal(label, children))
            }
            Some((_, Tok::Close)) => self.err("empty constituent"),
            None => self.err("unexpected end of input"),
        }
    }

    fn close(&mut self) -> Result<()> {
        match self.peek() {
            Some((_, Tok::Close)) => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => self.err("expected ')'"),
            None => self.err("unbalanced brackets: unexpected end of input"),
        }
    }
}

/// Parse exactly one bracketed tree.
pub fn parse_sexpr(text: &str) -> Result<TreeNode> {
    let mut trees = parse_trees(text)?;
    match trees.len() {
        1 => Ok(trees.pop().unwrap()),
        0 => Err(Error::TreeParse {
            pos: 0,
            msg: "no tree in input".into(),
        }),
        _ => Err(Error::TreeParse {
            pos: 0,
            msg: format!("expected one tree, found {}", trees.len()),
        }),
    }
}

/// Parse every tree of an `.mrg`-style file, in order.
pub fn parse_trees(text: &str) -> Result<Vec<TreeNode>> {
    let mut p = Parser {
        toks: lex(text),
        pos: 0,
        end: text.len(),
    };
    let mut trees = Vec::new();
    while p.peek().is_some() {
        trees.push(p.node(true)?);
    }
    Ok(trees)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const HEADLINE_TREE: &str = "( ( S-HLN ( S ( NP-SBJ ( NN  MARKET ) ) ( VP ( VBZ MOVES ) ) ) ( , , ) ( S ( NP-SBJ ( DT  these ) ( NNS  managers ) ) ( VP ( VBP  do ) ( RB  n't ) ( VP ( -NONE-  *?* ) ) ) ) (  . . ) ) )";

    #[test]
    fn ex7_structure() {
        let t = parse_sexpr(HEADLINE_TREE).unwrap();
        assert_eq!(t.label(), "");
        assert_eq!(t.children().len(), 1);
        assert_eq!(t.children()[0].label(), "S-HLN");
        assert_eq!(
            t.tokens(),
            vec!["MARKET", "MOVES", ",", "these", "managers", "do", "n't", "*?*", "."]
        );
        let traces: Vec<_> = t.leaves().into_iter().filter(|l| l.is_trace()).collect();
        assert_eq!(traces.len(), 1);
    }

    #[test]
    fn minimal_round_trip() {
        let t = parse_sexpr("( ( S ( NP ( NN x ) ) ) )").unwrap();
        assert_eq!(t.tokens(), vec!["x"]);
        assert_eq!(t.to_bracketed(), "( ( S ( NP ( NN x ) ) ) )");
        assert_eq!(parse_sexpr(&t.to_bracketed()).unwrap(), t);
    }

    #[test]
    fn truncated_input_reports_end_offset() {
        let text = "( ( S ( NP";
        match parse_sexpr(text) {
            Err(Error::TreeParse { pos, .. }) => assert_eq!(pos, text.len()),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_constituent_is_error() {
        match parse_sexpr("( (S ( ) ) )") {
            Err(Error::TreeParse { pos, msg }) => {
                assert_eq!(pos, 7);
                assert!(msg.contains("empty"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_sexpr("( (S (NP x y) ) )").is_err());
        assert!(parse_sexpr("(S (NP (NN x))) )").is_err());
    }

    #[test]
    fn unlabeled_inner_node_rejected() {
        assert!(parse_sexpr("(S ((NN x)))").is_err());
    }

    #[test]
    fn compact_bracketing() {
        let t = parse_sexpr("((S (NP (NNP Mr.) (NNP Aikman)) (. .)))").unwrap();
        assert_eq!(t.tokens(), vec!["Mr.", "Aikman", "."]);
    }

    #[test]
    fn linearize_preterminal() {
        let t = parse_sexpr("(NN x)").unwrap();
        assert_eq!(linearize(&t), vec!["(", "NN", "x", ")"]);
        let wrapped = parse_sexpr("( (NN x) )").unwrap();
        assert_eq!(linearize(&wrapped), vec!["(", "(", "NN", "x", ")", ")"]);
    }

    #[test]
    fn strip_traces_drops_empty_constituents() {
        let t = parse_sexpr(HEADLINE_TREE).unwrap();
        let s = t.strip_traces().unwrap();
        assert!(!s.tokens().contains(&"*?*"));
        let lin = linearize_with(&t, LinearizeOptions { strip_traces: true });
        assert!(!lin.iter().any(|x| x == "-NONE-"));
        // (VP (-NONE- *?*)) disappears entirely
        assert_eq!(s.size() + 2, t.size());
    }

    #[test]
    fn multiple_trees() {
        let trees = parse_trees("( (S (NN a)) )\n( (S (NN b)) )\n").unwrap();
        assert_eq!(trees.len(), 2);
    }
}
