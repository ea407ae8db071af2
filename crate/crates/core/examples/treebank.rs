//! Parse a bracketed tree, linearize it, extract production rules and align
//! its leaves to raw text.

use pdtb_lab::treebank::{align, extract_productions, linearize, parse_sexpr, ProductionMode};

const TREE: &str = "( ( S ( NP-SBJ ( NN  Oil-tool ) ( NNS  prices ) ) ( VP ( VBP  are ) ( ADVP ( RB  even ) ) ( VP ( VBG  edging ) ( ADVP-DIR ( RP  up ) ) ) ) (  . . ) ) )";
const TEXT: &str = "\n\nOil-tool prices are even edging up.\n";

fn main() -> pdtb_lab::Result<()> {
    let tree = parse_sexpr(TREE)?;
    println!("tokens     {:?}", tree.tokens());
    println!("linearized {}", linearize(&tree).join(" "));
    for rule in extract_productions(&tree, ProductionMode::InternalOnly) {
        println!("  {rule}");
    }
    let aligned = align(&[tree], TEXT)?;
    let (s, e) = aligned[0].span;
    println!("sentence bytes {s}..{e}: {:?}", &TEXT[s..e]);
    Ok(())
}
