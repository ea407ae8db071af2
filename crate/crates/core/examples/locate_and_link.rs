//! Location and linkage derived from stand-off spans.

use pdtb_lab::corpus::{is_linked, locate, parse_relations, RelationFormat};

const RELATIONS: &str = r#"{"doc_id":"wsj_0101","section":1,"rel_type":"Explicit","conn":"but","senses":["Comparison.Concession.Arg2-as-denier"],"arg1":[[0,20]],"arg2":[[25,48]],"conn_span":[[21,24]],"link":"1"}
{"doc_id":"wsj_0101","section":1,"rel_type":"Implicit","conn":"then","senses":["Temporal.Asynchronous.Precedence"],"arg1":[[0,20]],"arg2":[[25,48]],"link":"1"}
{"doc_id":"wsj_0101","section":1,"rel_type":"Implicit","conn":"because","senses":["Contingency.Cause.Reason"],"arg1":[[25,48]],"arg2":[[50,80]]}
"#;

fn main() -> pdtb_lab::Result<()> {
    let rels = parse_relations(RELATIONS, RelationFormat::JsonLines, None)?;
    // two sentences: bytes 0..49 and 50..80
    let sentences = [(0, 49), (50, 80)];
    for r in &rels {
        println!(
            "{:<9} arg1 {:<8} arg2 {:<8} {:<16} {}",
            r.rel_type.as_str(),
            r.arg1.to_string(),
            r.arg2.to_string(),
            locate(r, &sentences)?.as_str(),
            if is_linked(r, &rels) { "linked" } else { "stand-alone" }
        );
    }
    Ok(())
}
