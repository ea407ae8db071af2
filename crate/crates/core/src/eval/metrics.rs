use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::Location;
use crate::error::{Error, Result};

/// Gold rows, predicted columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            counts: vec![vec![0; n]; n],
        }
    }

    pub fn from_indices(labels: Vec<String>, golds: &[usize], preds: &[usize]) -> Result<Self> {
        if golds.len() != preds.len() {
            return Err(Error::shape(format!("{} golds vs {} predictions", golds.len(), preds.len())));
        }
        let mut m = ConfusionMatrix::new(labels);
        let n = m.labels.len();
        for (&g, &p) in golds.iter().zip(preds) {
            if g >= n || p >= n {
                return Err(Error::validation("label index", format!("{} outside {n} labels", g.max(p))));
            }
            m.counts[g][p] += 1;
        }
        Ok(m)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|r| r[j]).sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("gold\\pred");
        for l in &self.labels {
            let _ = write!(s, "\t{l}");
        }
        s.push('\n');
        for (l, row) in self.labels.iter().zip(&self.counts) {
            s.push_str(l);
            for c in row {
                let _ = write!(s, "\t{c}");
            }
            s.push('\n');
        }
        s
    }
}

/// Count (gold, predicted) label pairs over an ordered inventory.
pub fn confusion(golds: &[&str], preds: &[&str], inventory: &[String]) -> Result<ConfusionMatrix> {
    let idx = |l: &str| {
        inventory
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| Error::validation("sense label", l.to_string()))
    };
    let g = golds.iter().map(|l| idx(l)).collect::<Result<Vec<_>>>()?;
    let p = preds.iter().map(|l| idx(l)).collect::<Result<Vec<_>>>()?;
    ConfusionMatrix::from_indices(inventory.to_vec(), &g, &p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Precision, recall and F1 of one label; zero for empty denominators.
pub fn prf(m: &ConfusionMatrix, label: usize) -> Prf {
    let tp = m.counts[label][label];
    let p = ratio(tp, m.col_sum(label));
    let r = ratio(tp, m.row_sum(label));
    Prf {
        precision: p,
        recall: r,
        f1: harmonic(p, r),
    }
}

/// Micro-averaged F1. With one label per instance this is accuracy.
pub fn micro_f1(m: &ConfusionMatrix) -> f64 {
    ratio(m.correct(), m.total())
}

/// Mean F1 over labels with gold support.
pub fn macro_f1(m: &ConfusionMatrix) -> f64 {
    let supported: Vec<usize> = (0..m.labels.len()).filter(|&i| m.row_sum(i) > 0).collect();
    if supported.is_empty() {
        return 0.0;
    }
    supported.iter().map(|&i| prf(m, i).f1).sum::<f64>() / supported.len() as f64
}

/// `p_inter·f1_inter + p_intra·f1_intra`.
pub fn weighted_overall(f1_inter: f64, f1_intra: f64, p_inter: f64, p_intra: f64) -> Result<f64> {
    if (p_inter + p_intra - 1.0).abs() > 1e-9 || p_inter < 0.0 || p_intra < 0.0 {
        return Err(Error::invalid(format!("weights {p_inter} and {p_intra} do not form a distribution")));
    }
    Ok(p_inter * f1_inter + p_intra * f1_intra)
}

/// The inter weight `w` with `w·inter + (1-w)·intra = overall`.
pub fn solve_inter_weight(f1_inter: f64, f1_intra: f64, overall: f64) -> Result<f64> {
    if f1_inter == f1_intra {
        return Err(Error::invalid("equal group scores do not determine a weight"));
    }
    Ok((overall - f1_intra) / (f1_inter - f1_intra))
}

/// One prediction with every acceptable gold index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub gold: Vec<usize>,
    pub pred: usize,
    pub location: Location,
}

impl Scored {
    /// Gold index the prediction is scored against: the prediction itself
    /// when it matches any gold sense, else the first gold sense.
    pub fn matched_gold(&self) -> usize {
        if self.gold.contains(&self.pred) {
            self.pred
        } else {
            self.gold[0]
        }
    }

    pub fn correct(&self) -> bool {
        self.gold.contains(&self.pred)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupScores {
    pub n: usize,
    pub micro_f1: f64,
    pub macro_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub labels: Vec<LabelRow>,
    pub n: usize,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub inter: GroupScores,
    pub intra: GroupScores,
    pub p_inter: f64,
    pub p_intra: f64,
    /// Weighted overall from micro group scores.
    pub overall_micro: f64,
    pub overall_macro: f64,
    pub confusion: ConfusionMatrix,
}

fn group(items: &[&Scored], labels: &[String]) -> Result<(GroupScores, ConfusionMatrix)> {
    let g: Vec<usize> = items.iter().map(|s| s.matched_gold()).collect();
    let p: Vec<usize> = items.iter().map(|s| s.pred).collect();
    let m = ConfusionMatrix::from_indices(labels.to_vec(), &g, &p)?;
    Ok((
        GroupScores {
            n: items.len(),
            micro_f1: micro_f1(&m),
            macro_f1: macro_f1(&m),
        },
        m,
    ))
}

/// Per-label, micro, macro, per-location and weighted overall scores.
pub fn evaluate(items: &[Scored], labels: &[String]) -> Result<MetricsReport> {
    if items.iter().any(|s| s.gold.is_empty()) {
        return Err(Error::invalid("scored item without a gold label"));
    }
    let all: Vec<&Scored> = items.iter().collect();
    let (_, m) = group(&all, labels)?;
    let inter_items: Vec<&Scored> = items.iter().filter(|s| !s.location.is_intra()).collect();
    let intra_items: Vec<&Scored> = items.iter().filter(|s| s.location.is_intra()).collect();
    let (inter, _) = group(&inter_items, labels)?;
    let (intra, _) = group(&intra_items, labels)?;
    let n = items.len();
    let (p_inter, p_intra) = if n == 0 {
        (1.0, 0.0)
    } else {
        (inter.n as f64 / n as f64, intra.n as f64 / n as f64)
    };
    let rows = (0..labels.len())
        .map(|i| {
            let s = prf(&m, i);
            LabelRow {
                label: labels[i].clone(),
                precision: s.precision,
                recall: s.recall,
                f1: s.f1,
                support: m.row_sum(i),
                proportion: ratio(m.row_sum(i), m.total()),
            }
        })
        .collect();
    Ok(MetricsReport {
        labels: rows,
        n,
        micro_f1: micro_f1(&m),
        macro_f1: macro_f1(&m),
        overall_micro: weighted_overall(inter.micro_f1, intra.micro_f1, p_inter, p_intra)?,
        overall_macro: weighted_overall(inter.macro_f1, intra.macro_f1, p_inter, p_intra)?,
        inter,
        intra,
        p_inter,
        p_intra,
        confusion: m,
    })
}

impl MetricsReport {
    /// Scores as percentages with three decimals, per-label rows with
    /// supported labels only.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("label\tprecision\trecall\tf1\tsupport\tproportion\n");
        for r in self.labels.iter().filter(|r| r.support > 0) {
            let _ = writeln!(
                s,
                "{}\t{:.3}\t{:.3}\t{:.3}\t{}\t{:.2}%",
                r.label,
                r.precision,
                r.recall,
                r.f1,
                r.support,
                100.0 * r.proportion
            );
        }
        let _ = writeln!(s, "inter\t\t\t{:.3}\t{}\t{:.2}%", 100.0 * self.inter.micro_f1, self.inter.n, 100.0 * self.p_inter);
        let _ = writeln!(s, "intra\t\t\t{:.3}\t{}\t{:.2}%", 100.0 * self.intra.micro_f1, self.intra.n, 100.0 * self.p_intra);
        let _ = writeln!(s, "overall (weighted, micro)\t\t\t{:.3}\t{}\t", 100.0 * self.overall_micro, self.n);
        let _ = writeln!(s, "overall (weighted, macro)\t\t\t{:.3}\t{}\t", 100.0 * self.overall_macro, self.n);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("L{i}")).collect()
    }

    #[test]
    fn hand_three_by_three() {
        // gold rows, pred cols
        let g = [0, 0, 0, 1, 1, 2];
        let p = [0, 0, 1, 1, 2, 2];
        let m = ConfusionMatrix::from_indices(labels(3), &g, &p).unwrap();
        let a = prf(&m, 0);
        assert_eq!((a.precision, a.recall), (1.0, 2.0 / 3.0));
        assert!((a.f1 - 0.8).abs() < 1e-12);
        let b = prf(&m, 1);
        assert_eq!((b.precision, b.recall, b.f1), (0.5, 0.5, 0.5));
        assert!((micro_f1(&m) - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn unpredicted_label_is_zero() {
        let m = ConfusionMatrix::from_indices(labels(2), &[1, 1], &[0, 0]).unwrap();
        let s = prf(&m, 1);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn unknown_label_rejected() {
        assert!(confusion(&["x"], &["L0"], &labels(1)).is_err());
        assert!(ConfusionMatrix::from_indices(labels(1), &[0], &[]).is_err());
    }

    #[test]
    fn weighted_overall_extremes() {
        assert_eq!(weighted_overall(0.3, 0.9, 1.0, 0.0).unwrap(), 0.3);
        assert!((weighted_overall(0.5, 0.5, 0.25, 0.75).unwrap() - 0.5).abs() < 1e-15);
        assert!(weighted_overall(0.5, 0.5, 0.3, 0.3).is_err());
    }

    #[test]
    fn multi_gold_matching() {
        let s = Scored {
            gold: vec![2, 1],
            pred: 1,
            location: Location::IntraSentential,
        };
        assert_eq!(s.matched_gold(), 1);
        let r = evaluate(&[s], &labels(3)).unwrap();
        assert_eq!(r.micro_f1, 1.0);
        assert_eq!(r.p_intra, 1.0);
        assert_eq!(r.overall_micro, 1.0);
    }
}
