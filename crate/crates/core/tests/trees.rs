mod common;

use pdtb_lab::treebank::{extract_productions, linearize, parse_sexpr, ProductionMode};

#[test]
fn printed_trees_round_trip_and_align() {
    let r = common::treebank_round_trip();
    assert!(r.is_ok(), "{r:?}");
}

#[test]
fn headline_keeps_its_trace() {
    let t = parse_sexpr(common::HEADLINE_TREE).unwrap();
    assert_eq!(t.tokens(), ["MARKET", "MOVES", ",", "these", "managers", "do", "n't", "*?*", "."]);
    let lin = linearize(&t);
    assert!(lin.contains(&"-NONE-".to_string()) && lin.contains(&"*?*".to_string()));
    assert_eq!(lin.iter().filter(|s| *s == "(").count(), lin.iter().filter(|s| *s == ")").count());
}

#[test]
fn oil_tool_productions() {
    let t = parse_sexpr(common::OIL_TOOL_TREE).unwrap();
    let rules: Vec<String> = extract_productions(&t, ProductionMode::InternalOnly).iter().map(|r| r.to_string()).collect();
    assert_eq!(
        rules,
        ["S -> NP-SBJ VP .", "NP-SBJ -> NN NNS", "VP -> VBP ADVP VP", "ADVP -> RB", "VP -> VBG ADVP-DIR", "ADVP-DIR -> RP"]
    );
}

#[test]
fn aikman_tree_shape() {
    let t = parse_sexpr(common::AIKMAN_TREE).unwrap();
    assert_eq!(t.tokens().len(), 32);
    assert_eq!(t.tokens().last(), Some(&"."));
    assert!(extract_productions(&t, ProductionMode::InternalOnly)
        .iter()
        .any(|r| r.to_string() == "VP -> VP CC VP ADVP"));
}

#[test]
fn unbalanced_brackets_rejected() {
    assert!(parse_sexpr("( ( S ( NN a ) )").is_err());
    assert!(parse_sexpr("( ( S ( NN a ) ) ) )").is_err());
}
