//! Relation file formats.
//!
//! * Pipe-delimited: one relation per line in the PDTB-3 field order. These
//!   files carry no document id; it comes from the file name (`wsj_0351`).
//! * JSON lines: one [`RelationRecord`] object per line, self-describing.

use serde::{Deserialize, Serialize};

use super::{ByteSpanList, RelType, RelationRecord};
use crate::error::{Error, Result};
use crate::sense::SenseLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationFormat {
    PipeDelimited,
    JsonLines,
}

// PDTB-3 field positions.
const F_TYPE: usize = 0;
const F_CONN_SPAN: usize = 1;
const F_CONN1: usize = 7;
const F_SCLASS1A: usize = 8;
const F_SCLASS1B: usize = 9;
const F_CONN2: usize = 10;
const F_SCLASS2A: usize = 11;
const F_SCLASS2B: usize = 12;
const F_ARG1_SPAN: usize = 14;
const F_ARG2_SPAN: usize = 20;
const F_LINK: usize = 33;
const N_FIELDS: usize = 34;

/// Section number from a WSJ document id such as `wsj_2315`.
pub fn section_of(doc_id: &str) -> Option<u8> {
    let digits: String = doc_id
        .rsplit('_')
        .next()?
        .chars()
        .take_while(|c| c.is_ascii_digit())
        .collect();
    if digits.len() != 4 {
        return None;
    }
    digits[..2].parse().ok().filter(|s: &u8| *s <= 24)
}

/// Parse a relation file. `doc_id` is required for the pipe-delimited format.
pub fn parse_relations(text: &str, format: RelationFormat, doc_id: Option<&str>) -> Result<Vec<RelationRecord>> {
    let section = match (format, doc_id) {
        (RelationFormat::PipeDelimited, Some(d)) => {
            Some(section_of(d).ok_or_else(|| Error::validation("document id", d))?)
        }
        (RelationFormat::PipeDelimited, None) => {
            return Err(Error::invalid("pipe-delimited relations need a document id"))
        }
        _ => None,
    };
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec = match format {
            RelationFormat::PipeDelimited => parse_pipe_line(line, lineno, doc_id.unwrap(), section.unwrap()),
            RelationFormat::JsonLines => parse_json_line(line, lineno),
        }
        .map_err(|e| e.at_line(lineno))?;
        rec.validate().map_err(|e| e.at_line(lineno))?;
        out.push(rec);
    }
    Ok(out)
}

fn parse_json_line(line: &str, lineno: usize) -> Result<RelationRecord> {
    // Surface closed-inventory violations as validation errors, not JSON errors.
    let raw: serde_json::Value = serde_json::from_str(line).map_err(|e| Error::Malformed {
        line: lineno,
        msg: e.to_string(),
    })?;
    if let Some(t) = raw.get("rel_type").and_then(|v| v.as_str()) {
        t.parse::<RelType>()?;
    }
    if let Some(senses) = raw.get("senses").and_then(|v| v.as_array()) {
        for s in senses.iter().filter_map(|s| s.as_str()) {
            s.parse::<SenseLabel>()?;
        }
    }
    serde_json::from_value(raw).map_err(|e| Error::Malformed {
        line: lineno,
        msg: e.to_string(),
    })
}

fn parse_pipe_line(line: &str, lineno: usize, doc_id: &str, section: u8) -> Result<RelationRecord> {
    let fields: Vec<&str> = line.split('|').collect();
    if fields.len() <= F_ARG2_SPAN {
        return Err(Error::Malformed {
            line: lineno,
            msg: format!("expected at least {} fields, found {}", F_ARG2_SPAN + 1, fields.len()),
        });
    }
    let field = |i: usize| fields.get(i).map(|f| f.trim()).unwrap_or("");
    let spans = |i: usize| -> Result<Option<ByteSpanList>> {
        let f = field(i);
        if f.is_empty() {
            Ok(None)
        } else {
            f.parse().map(Some).map_err(|_| Error::Malformed {
                line: lineno,
                msg: format!("bad span list {f:?} in field {i}"),
            })
        }
    };
    let rel_type: RelType = field(F_TYPE).parse()?;
    let mut senses: Vec<SenseLabel> = Vec::new();
    for i in [F_SCLASS1A, F_SCLASS1B, F_SCLASS2A, F_SCLASS2B] {
        let f = field(i);
        if !f.is_empty() {
            let s: SenseLabel = f.parse()?;
            if !senses.contains(&s) {
                senses.push(s);
            }
        }
    }
    let conn = [field(F_CONN1), field(F_CONN2)]
        .into_iter()
        .filter(|c| !c.is_empty())
        .collect::<Vec<_>>();
    let link = field(F_LINK);
    Ok(RelationRecord {
        doc_id: doc_id.to_string(),
        section,
        rel_type,
        conn: if conn.is_empty() { None } else { Some(conn.join(";")) },
        senses,
        arg1: spans(F_ARG1_SPAN)?.ok_or_else(|| Error::validation("arguments", "empty Arg1 span list"))?,
        arg2: spans(F_ARG2_SPAN)?.ok_or_else(|| Error::validation("arguments", "empty Arg2 span list"))?,
        conn_span: spans(F_CONN_SPAN)?,
        link: if link.is_empty() { None } else { Some(link.to_string()) },
    })
}

/// Render records in the given format. Pipe-delimited output drops `doc_id`
/// and `section`, which the file name carries.
pub fn serialize_relations(records: &[RelationRecord], format: RelationFormat) -> Result<String> {
    let mut out = String::new();
    for r in records {
        match format {
            RelationFormat::JsonLines => out.push_str(&serde_json::to_string(r)?),
            RelationFormat::PipeDelimited => out.push_str(&pipe_line(r)),
        }
        out.push('\n');
    }
    Ok(out)
}

fn pipe_line(r: &RelationRecord) -> String {
    let mut f = vec![String::new(); N_FIELDS];
    f[F_TYPE] = r.rel_type.to_string();
    if let Some(c) = &r.conn_span {
        f[F_CONN_SPAN] = c.to_string();
    }
    if let Some(c) = &r.conn {
        let mut parts = c.splitn(2, ';');
        f[F_CONN1] = parts.next().unwrap_or_default().to_string();
        f[F_CONN2] = parts.next().unwrap_or_default().to_string();
    }
    let slots = [F_SCLASS1A, F_SCLASS1B, F_SCLASS2A, F_SCLASS2B];
    for (slot, s) in slots.iter().zip(&r.senses) {
        f[*slot] = s.to_string();
    }
    f[F_ARG1_SPAN] = r.arg1.to_string();
    f[F_ARG2_SPAN] = r.arg2.to_string();
    if let Some(l) = &r.link {
        f[F_LINK] = l.clone();
    }
    f.join("|")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pipe(rel_type: &str, conn: &str, sense: &str, a1: &str, a2: &str, link: &str) -> String {
        let mut f = vec![""; N_FIELDS];
        f[F_TYPE] = rel_type;
        f[F_CONN1] = conn;
        f[F_SCLASS1A] = sense;
        f[F_ARG1_SPAN] = a1;
        f[F_ARG2_SPAN] = a2;
        f[F_LINK] = link;
        f.join("|")
    }

    #[test]
    fn section_from_doc_id() {
        assert_eq!(section_of("wsj_0351"), Some(3));
        assert_eq!(section_of("wsj_2315"), Some(23));
        assert_eq!(section_of("wsj_9999"), None);
        assert_eq!(section_of("foo"), None);
    }

    #[test]
    fn implicit_pipe_line() {
        let line = pipe(
            "Implicit",
            "specifically",
            "Expansion.Level-of-detail.Arg2-as-detail",
            "9..52",
            "54..112",
            "",
        );
        let recs = parse_relations(&line, RelationFormat::PipeDelimited, Some("wsj_0351")).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.section, 3);
        assert_eq!(r.senses[0].level2, "Level-of-detail");
        assert_eq!(r.conn.as_deref(), Some("specifically"));
        assert_eq!(r.link, None);
    }

    #[test]
    fn empty_stream() {
        assert!(parse_relations("", RelationFormat::JsonLines, None).unwrap().is_empty());
        assert!(parse_relations("\n\n", RelationFormat::PipeDelimited, Some("wsj_0001"))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn bogus_sense_is_validation_error() {
        let line = pipe("Implicit", "so", "Bogus.Label", "1..5", "6..9", "");
        let err = parse_relations(&line, RelationFormat::PipeDelimited, Some("wsj_0001")).unwrap_err();
        match err.root() {
            Error::Validation { value, .. } => assert!(value.contains("Bogus.Label")),
            other => panic!("{other:?}"),
        }
        let json = r#"{"doc_id":"wsj_0001","section":0,"rel_type":"Implicit","senses":["Bogus.Label"],"arg1":[[1,5]],"arg2":[[6,9]]}"#;
        let err = parse_relations(json, RelationFormat::JsonLines, None).unwrap_err();
        assert!(matches!(err.root(), Error::Validation { value, .. } if value.contains("Bogus.Label")));
    }

    #[test]
    fn unknown_type_and_malformed_lines() {
        let good = pipe("Implicit", "so", "Contingency.Cause.Result", "1..5", "6..9", "");
        let bad = pipe("Implicitish", "so", "Contingency.Cause.Result", "1..5", "6..9", "");
        let text = format!("{good}\n{bad}\n");
        match parse_relations(&text, RelationFormat::PipeDelimited, Some("wsj_0001")).unwrap_err() {
            Error::Line { line, source } => {
                assert_eq!(line, 2);
                assert!(matches!(*source, Error::Validation { ref value, .. } if value == "Implicitish"));
            }
            other => panic!("{other:?}"),
        }
        let text = format!("{good}\nImplicit|oops\n");
        match parse_relations(&text, RelationFormat::PipeDelimited, Some("wsj_0001")).unwrap_err() {
            Error::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_relations("{not json", RelationFormat::JsonLines, None).unwrap_err() {
            Error::Malformed { line, .. } => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn implicit_needs_sense() {
        let line = pipe("Implicit", "so", "", "1..5", "6..9", "");
        assert!(parse_relations(&line, RelationFormat::PipeDelimited, Some("wsj_0001")).is_err());
    }

    #[test]
    fn two_senses_and_link() {
        let mut f = vec![""; N_FIELDS];
        f[F_TYPE] = "Implicit";
        f[F_CONN1] = "instead";
        f[F_SCLASS1A] = "Expansion.Conjunction";
        f[F_SCLASS1B] = "Expansion.Substitution.Arg2-as-subst";
        f[F_ARG1_SPAN] = "10..40";
        f[F_ARG2_SPAN] = "45..80";
        f[F_LINK] = "3";
        let recs = parse_relations(&f.join("|"), RelationFormat::PipeDelimited, Some("wsj_0956")).unwrap();
        assert_eq!(recs[0].senses.len(), 2);
        assert_eq!(recs[0].link.as_deref(), Some("3"));
        let text = serialize_relations(&recs, RelationFormat::PipeDelimited).unwrap();
        let back = parse_relations(&text, RelationFormat::PipeDelimited, Some("wsj_0956")).unwrap();
        assert_eq!(back, recs);
    }
}
