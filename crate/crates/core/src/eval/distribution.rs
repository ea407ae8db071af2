use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{is_linked, locate, Corpus, RelType};
use crate::sense::level2_types;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// inter-sentential, intra-sentential
    Location,
    /// stand-alone, linked
    Linkage,
}

impl Axis {
    pub fn groups(self) -> [&'static str; 2] {
        match self {
            Axis::Location => ["inter-sentential", "intra-sentential"],
            Axis::Linkage => ["stand-alone", "linked"],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistRow {
    pub class: String,
    pub label: String,
    pub counts: [u64; 2],
    /// In-group percentages, two decimals.
    pub percents: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub axis: Axis,
    pub groups: [String; 2],
    pub rows: Vec<DistRow>,
    pub totals: [u64; 2],
    /// Implicit relations whose group could not be derived.
    pub skipped: u64,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Level-2 distribution of implicit relations by location or linkage. Each
/// relation counts once, under its first sense.
pub fn distribution(corpus: &Corpus, axis: Axis) -> DistributionReport {
    let types: Vec<_> = level2_types().collect();
    let mut counts = vec![[0u64; 2]; types.len()];
    let mut skipped = 0;
    for doc in &corpus.docs {
        let spans = doc.sentence_spans();
        for rel in doc.relations.iter().filter(|r| r.rel_type == RelType::Implicit) {
            let group = match axis {
                Axis::Location => match locate(rel, &spans) {
                    Ok(l) => usize::from(l.is_intra()),
                    Err(_) => {
                        skipped += 1;
                        continue;
                    }
                },
                Axis::Linkage => usize::from(is_linked(rel, &doc.relations)),
            };
            let Some(sense) = rel.senses.first() else {
                skipped += 1;
                continue;
            };
            counts[sense.level2_index()][group] += 1;
        }
    }
    if skipped > 0 {
        log::warn!("{skipped} implicit relations left out of the {axis:?} distribution");
    }
    let totals = counts.iter().fold([0, 0], |t, c| [t[0] + c[0], t[1] + c[1]]);
    let pct = |c: u64, t: u64| if t == 0 { 0.0 } else { round2(100.0 * c as f64 / t as f64) };
    let rows = types
        .iter()
        .zip(&counts)
        .map(|((class, name), c)| DistRow {
            class: class.as_str().to_string(),
            label: name.to_string(),
            counts: *c,
            percents: [pct(c[0], totals[0]), pct(c[1], totals[1])],
        })
        .collect();
    DistributionReport {
        axis,
        groups: axis.groups().map(str::to_string),
        rows,
        totals,
        skipped,
    }
}

impl DistributionReport {
    pub fn to_tsv(&self) -> String {
        let [a, b] = &self.groups;
        let mut s = format!("class\tlabel\t{a}\t{a}_pct\t{b}\t{b}_pct\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{:.2}\t{}\t{:.2}",
                r.class, r.label, r.counts[0], r.percents[0], r.counts[1], r.percents[1]
            );
        }
        let _ = writeln!(s, "total\t\t{}\t100.00\t{}\t100.00", self.totals[0], self.totals[1]);
        s
    }

    /// Fixed-width table in the layout `count (pct%)`.
    pub fn render(&self) -> String {
        let mut s = format!("{:<12} {:<20} {:>16} {:>16}\n", "", "", self.groups[0], self.groups[1]);
        let mut last = "";
        for r in &self.rows {
            let class = if r.class != last { r.class.as_str() } else { "" };
            last = &r.class;
            let cell = |i: usize| format!("{} ({:.2}%)", r.counts[i], r.percents[i]);
            let _ = writeln!(s, "{:<12} {:<20} {:>16} {:>16}", class, r.label, cell(0), cell(1));
        }
        let _ = writeln!(s, "{:<12} {:<20} {:>16} {:>16}", "total", "", self.totals[0], self.totals[1]);
        s
    }
}
