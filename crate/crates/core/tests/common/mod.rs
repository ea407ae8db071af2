//! Checks shared by the integration tests and the acceptance runner. Each
//! returns a short summary on success and a description of the first
//! mismatch on failure.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::Path;

use pdtb_lab::classifiers::{composed_grad_check, train, LocationFeature, ModelKind, TrainConfig};
use pdtb_lab::corpus::synth::{generate, SynthConfig};
use pdtb_lab::corpus::{make_instances, random_split, Corpus, CorpusPaths, InstanceOptions, RelationFormat};
use pdtb_lab::eval::{chi_square, confusion, evaluate, micro_f1, prf, solve_inter_weight, weighted_overall, Scored};
use pdtb_lab::nn::{layer_suite, synthetic_embeddings};
use pdtb_lab::recognizers::{binary_report, build_sentence_dataset, majority_baseline, NaiveBayes};
use pdtb_lab::treebank::{align, extract_productions, linearize, parse_sexpr, parse_trees, ProductionMode};
use pdtb_lab::corpus::Location;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub type Check = Result<String, String>;

pub const HEADLINE_TREE: &str = "( ( S-HLN ( S ( NP-SBJ ( NN  MARKET ) ) ( VP ( VBZ MOVES ) ) ) ( , , ) ( S ( NP-SBJ ( DT  these ) ( NNS  managers ) ) ( VP ( VBP  do ) ( RB  n't ) ( VP ( -NONE-  *?* ) ) ) ) (  . . ) ) )";
pub const HEADLINE_TEXT: &str = "MARKET MOVES, these managers don't.";

pub const OIL_TOOL_TREE: &str = "( ( S ( NP-SBJ ( NN  Oil-tool ) ( NNS  prices ) ) ( VP ( VBP  are ) ( ADVP ( RB  even ) ) ( VP ( VBG  edging ) ( ADVP-DIR ( RP  up ) ) ) ) (  . . ) ) )";
pub const OIL_TOOL_TEXT: &str = "Oil-tool prices are even edging up.";

pub const AIKMAN_TREE: &str = "((S
    (SBAR (IN With)
      (S
        (NP (CD three) (NNS minutes))
        (VP (VBD left)
          (PP (IN on)
            (NP (DT the) (NN clock))))))
    (, ,)
    (NP (NNP Mr.) (NNP Aikman))
    (VP
      (VP (VBZ takes)
        (NP
          (NP (DT the) (NN snap))
          (, ,)
          (NP (NNS steps)))
        (ADVP (RB back)))
      (CC and)
      (VP (VBZ fires)
        (NP (DT a) (JJ 21-yard) (NN pass))
        (: --)
        (PP (RB straight) (IN into)
          (NP
            (NP (DT the) (NNS hands))
            (PP (IN of)
              (NP (DT an) (NNP Atlanta) (NN defensive))))))
      (ADVP (RB back)))
    (. .)))";
pub const AIKMAN_TEXT: &str = "With three minutes left on the clock, Mr. Aikman takes the snap, steps back and fires a 21-yard pass -- straight into the hands of an Atlanta defensive back.";

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------- gradients

pub fn gradient_check() -> Check {
    let mut all = layer_suite(0, 1e-5).map_err(|e| e.to_string())?;
    all.push(("basic_model".into(), composed_grad_check(0, 1e-5).map_err(|e| e.to_string())?));
    let (name, worst) = all
        .iter()
        .map(|(n, c)| (n.as_str(), c.max_rel_error))
        .fold(("", 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if worst < 1e-4 {
        Ok(format!("{} checks, max relative error {worst:.2e} ({name})", all.len()))
    } else {
        Err(format!("{name}: relative error {worst:.2e}"))
    }
}

// ---------------------------------------------------------------- metrics

struct Case {
    labels: Vec<String>,
    gold: Vec<usize>,
    pred: Vec<usize>,
}

fn random_case(rng: &mut ChaCha8Rng) -> Case {
    let k = rng.gen_range(2..=6);
    let n = rng.gen_range(1..=40);
    Case {
        labels: (0..k).map(|i| format!("L{i}")).collect(),
        gold: (0..n).map(|_| rng.gen_range(0..k)).collect(),
        pred: (0..n).map(|_| rng.gen_range(0..k)).collect(),
    }
}

// counts straight from the pairs, no matrix
fn brute_prf(c: &Case, label: usize) -> (f64, f64, f64) {
    let pairs = c.gold.iter().zip(&c.pred);
    let tp = pairs.clone().filter(|&(&g, &p)| g == label && p == label).count() as f64;
    let fp = pairs.clone().filter(|&(&g, &p)| g != label && p == label).count() as f64;
    let fn_ = pairs.filter(|&(&g, &p)| g == label && p != label).count() as f64;
    let p = if tp + fp == 0.0 { 0.0 } else { tp / (tp + fp) };
    let r = if tp + fn_ == 0.0 { 0.0 } else { tp / (tp + fn_) };
    let f = if tp == 0.0 { 0.0 } else { 2.0 * tp / (2.0 * tp + fp + fn_) };
    (p, r, f)
}

fn brute_chi_square(t: &[Vec<f64>], yates: bool) -> (f64, f64) {
    let rows: Vec<f64> = t.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..t[0].len()).map(|j| t.iter().map(|r| r[j]).sum()).collect();
    let n: f64 = rows.iter().sum();
    let mut x2 = 0.0;
    for (i, r) in t.iter().enumerate() {
        for (j, &o) in r.iter().enumerate() {
            let e = rows[i] * cols[j] / n;
            let d = if yates { ((o - e).abs() - 0.5).max(0.0) } else { (o - e).abs() };
            x2 += d * d / e;
        }
    }
    let dof = ((t.len() - 1) * (t[0].len() - 1)) as f64;
    let p = ChiSquared::new(dof).unwrap().sf(x2);
    (x2, p)
}

pub fn metric_oracles(cases: usize, seed: u64) -> Check {
    let tol = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0usize;
    for case_no in 0..cases {
        let c = random_case(&mut rng);
        let g: Vec<&str> = c.gold.iter().map(|&i| c.labels[i].as_str()).collect();
        let p: Vec<&str> = c.pred.iter().map(|&i| c.labels[i].as_str()).collect();
        let m = confusion(&g, &p, &c.labels).map_err(|e| e.to_string())?;
        for (i, j) in (0..c.labels.len()).flat_map(|i| (0..c.labels.len()).map(move |j| (i, j))) {
            let want = c.gold.iter().zip(&c.pred).filter(|&(&a, &b)| a == i && b == j).count() as u64;
            if m.counts[i][j] != want {
                return Err(format!("case {case_no}: confusion[{i}][{j}] {} vs {want}", m.counts[i][j]));
            }
        }
        for l in 0..c.labels.len() {
            let s = prf(&m, l);
            let (bp, br, bf) = brute_prf(&c, l);
            if !(close(s.precision, bp, tol) && close(s.recall, br, tol) && close(s.f1, bf, tol)) {
                return Err(format!("case {case_no}, label {l}: {s:?} vs ({bp}, {br}, {bf})"));
            }
            compared += 3;
        }
        let acc = c.gold.iter().zip(&c.pred).filter(|(a, b)| a == b).count() as f64 / c.gold.len() as f64;
        if !close(micro_f1(&m), acc, tol) {
            return Err(format!("case {case_no}: micro F1 {} vs accuracy {acc}", micro_f1(&m)));
        }

        let (a, b) = (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0));
        let w: f64 = rng.gen_range(0.0..1.0);
        let o = weighted_overall(a, b, w, 1.0 - w).map_err(|e| e.to_string())?;
        if !close(o, w * a + (1.0 - w) * b, tol) {
            return Err(format!("case {case_no}: weighted overall {o}"));
        }
        // group scores through the report path
        let scored: Vec<Scored> = c
            .gold
            .iter()
            .zip(&c.pred)
            .enumerate()
            .map(|(i, (&g, &p))| Scored {
                gold: vec![g],
                pred: p,
                location: if i % 3 == 0 { Location::IntraSentential } else { Location::InterSentential },
            })
            .collect();
        let r = evaluate(&scored, &c.labels).map_err(|e| e.to_string())?;
        let group_acc = |intra: bool| {
            let v: Vec<&Scored> = scored.iter().filter(|s| s.location.is_intra() == intra).collect();
            if v.is_empty() {
                0.0
            } else {
                v.iter().filter(|s| s.gold[0] == s.pred).count() as f64 / v.len() as f64
            }
        };
        let n = scored.len() as f64;
        let n_intra = scored.iter().filter(|s| s.location.is_intra()).count() as f64;
        let want = (n - n_intra) / n * group_acc(false) + n_intra / n * group_acc(true);
        if !close(r.overall_micro, want, tol) {
            return Err(format!("case {case_no}: report overall {} vs {want}", r.overall_micro));
        }

        let rows = rng.gen_range(2..=5);
        let cols = rng.gen_range(2..=3);
        let t: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(1..60) as f64).collect())
            .collect();
        for yates in [false, true] {
            if yates && (rows, cols) != (2, 2) {
                continue;
            }
            let got = chi_square(&t, yates).map_err(|e| e.to_string())?;
            let (x2, pv) = brute_chi_square(&t, yates);
            if !close(got.statistic, x2, tol * x2.max(1.0)) || !close(got.p_value, pv, tol) {
                return Err(format!(
                    "case {case_no}: chi-squared ({}, {}) vs ({x2}, {pv})",
                    got.statistic, got.p_value
                ));
            }
            compared += 2;
        }
        compared += 2;
    }
    Ok(format!("{cases} randomized cases, {compared} values within {tol:e}"))
}

// ---------------------------------------------------------------- trees

pub fn tree_round_trip(tree: &str, text: &str) -> Check {
    let t = parse_sexpr(tree).map_err(|e| e.to_string())?;
    let again = parse_sexpr(&linearize(&t).join(" ")).map_err(|e| e.to_string())?;
    if again != t {
        return Err("linearized tree reparses to a different structure".into());
    }
    if parse_sexpr(&t.to_bracketed()).map_err(|e| e.to_string())? != t {
        return Err("bracketed output reparses to a different structure".into());
    }
    let padded = format!("\n\n{text}\n");
    let aligned = align(&[t], &padded).map_err(|e| e.to_string())?;
    let want = (2, 2 + text.len());
    if aligned[0].span != want {
        return Err(format!("aligned span {:?}, expected {want:?}", aligned[0].span));
    }
    Ok(format!("{} leaves, span {}..{}", aligned[0].leaves.len(), want.0, want.1))
}

pub fn treebank_round_trip() -> Check {
    let mut notes = Vec::new();
    for (name, tree, text) in [
        ("headline", HEADLINE_TREE, HEADLINE_TEXT),
        ("oil-tool", OIL_TOOL_TREE, OIL_TOOL_TEXT),
        ("aikman", AIKMAN_TREE, AIKMAN_TEXT),
    ] {
        notes.push(format!("{name}: {}", tree_round_trip(tree, text).map_err(|e| format!("{name}: {e}"))?));
    }
    let oil = parse_sexpr(OIL_TOOL_TREE).map_err(|e| e.to_string())?;
    let rules: Vec<String> = extract_productions(&oil, ProductionMode::InternalOnly)
        .iter()
        .map(|r| r.to_string())
        .collect();
    if !rules.iter().any(|r| r == "S -> NP-SBJ VP .") {
        return Err(format!("S -> NP-SBJ VP . missing from {rules:?}"));
    }
    // the three sentences as one document
    let doc = format!("{HEADLINE_TEXT}\n{OIL_TOOL_TEXT}\n{AIKMAN_TEXT}\n");
    let trees = parse_trees(&format!("{HEADLINE_TREE}\n{OIL_TOOL_TREE}\n{AIKMAN_TREE}\n")).map_err(|e| e.to_string())?;
    let spans: Vec<(usize, usize)> = align(&trees, &doc).map_err(|e| e.to_string())?.iter().map(|s| s.span).collect();
    let mut at = 0;
    for (i, s) in [HEADLINE_TEXT, OIL_TOOL_TEXT, AIKMAN_TEXT].iter().enumerate() {
        if spans[i] != (at, at + s.len()) {
            return Err(format!("sentence {i} aligned to {:?} in the joined document", spans[i]));
        }
        at += s.len() + 1;
    }
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------- weighted overall

pub const INTER_F1: f64 = 35.791;
pub const INTRA_F1: f64 = 47.154;
pub const OVERALL_F1: f64 = 38.608;

pub fn weighted_overall_identity() -> Check {
    let w = solve_inter_weight(INTER_F1, INTRA_F1, OVERALL_F1).map_err(|e| e.to_string())?;
    let oracle = (OVERALL_F1 - INTRA_F1) / (INTER_F1 - INTRA_F1);
    if !(w > 0.74 && w < 0.77) {
        return Err(format!("recovered weight {w} outside (0.74, 0.77)"));
    }
    if !close(w, oracle, 1e-3) {
        return Err(format!("recovered weight {w} vs {oracle}"));
    }
    let back = weighted_overall(INTER_F1, INTRA_F1, w, 1.0 - w).map_err(|e| e.to_string())?;
    if !close(back, OVERALL_F1, 1e-3) {
        return Err(format!("weight {w} gives overall {back}"));
    }
    Ok(format!("w = {w:.4}"))
}

// ---------------------------------------------------------------- synthetic end to end

#[derive(Debug, Clone)]
pub struct EndToEnd {
    pub instances: usize,
    pub basic_micro: f64,
    pub basic_intra: f64,
    pub model1_intra: f64,
    pub model2_informative: f64,
    pub model2_zero: f64,
    pub slowest_secs: f64,
}

pub const E2E_SEED: u64 = 42;
pub const E2E_INSTANCES: usize = 400;

pub fn e2e_train_config() -> TrainConfig {
    TrainConfig {
        lr: 0.003,
        batch_size: 16,
        patience: 10,
        max_epochs: 100,
        hidden: 100,
        dropout: 0.25,
        seed: E2E_SEED,
        ..Default::default()
    }
}

pub fn synthetic_end_to_end() -> Result<EndToEnd, String> {
    let err = |e: pdtb_lab::Error| e.to_string();
    let mut sc = SynthConfig::new(E2E_SEED, 106);
    sc.ambiguity = 0.0;
    let synth = generate(sc).map_err(err)?;
    let corpus = synth.to_corpus().map_err(err)?;
    let mut inst = make_instances(&corpus, InstanceOptions::default());
    if inst.len() < E2E_INSTANCES {
        return Err(format!("only {} instances generated", inst.len()));
    }
    inst.truncate(E2E_INSTANCES);
    let emb = synthetic_embeddings(&synth.vocabulary(), 100, E2E_SEED).map_err(err)?;
    let split = random_split(inst, E2E_SEED, 0.6, 0.2);
    let cfg = e2e_train_config();
    let mut slowest: f64 = 0.0;
    let mut run = |kind: ModelKind, lf: LocationFeature| -> Result<pdtb_lab::eval::MetricsReport, String> {
        let t = std::time::Instant::now();
        let c = TrainConfig {
            location_feature: lf,
            ..cfg.clone()
        };
        let (m, _) = train(kind, &split.train, &split.dev, Some(emb.clone()), &c).map_err(err)?;
        let r = m.score(&split.test).map_err(err)?;
        slowest = slowest.max(t.elapsed().as_secs_f64());
        Ok(r)
    };
    let basic = run(ModelKind::Basic, LocationFeature::Informative)?;
    let m1 = run(ModelKind::Model1, LocationFeature::Informative)?;
    let m2 = run(ModelKind::Model2, LocationFeature::Informative)?;
    let m2z = run(ModelKind::Model2, LocationFeature::Zero)?;
    Ok(EndToEnd {
        instances: E2E_INSTANCES,
        basic_micro: basic.micro_f1,
        basic_intra: basic.intra.micro_f1,
        model1_intra: m1.intra.micro_f1,
        model2_informative: m2.micro_f1,
        model2_zero: m2z.micro_f1,
        slowest_secs: slowest,
    })
}

// ---------------------------------------------------------------- recognizers

/// Sentence labels recomputed from the relation file on disk, without the
/// library's location or linkage code, compared with the dataset.
pub fn sentence_labels_recomputed(dir: &Path, seed: u64) -> Check {
    let err = |e: pdtb_lab::Error| e.to_string();
    let corpus = Corpus::load(&CorpusPaths {
        relations: dir.join("relations.jsonl"),
        format: RelationFormat::JsonLines,
        trees: Some(dir.join("trees")),
        raw: Some(dir.join("raw")),
    })
    .map_err(err)?;
    let text = std::fs::read_to_string(dir.join("relations.jsonl")).map_err(|e| e.to_string())?;
    let raw: Vec<serde_json::Value> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut link_count: HashMap<(String, String), usize> = HashMap::new();
    for r in &raw {
        if let Some(l) = r["link"].as_str() {
            *link_count.entry((r["doc_id"].as_str().unwrap().to_string(), l.to_string())).or_default() += 1;
        }
    }
    let spans_of = |v: &serde_json::Value| -> Vec<(u64, u64)> {
        v.as_array()
            .map(|a| a.iter().map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap())).collect())
            .unwrap_or_default()
    };
    let sentence_spans: HashMap<&str, Vec<(usize, usize)>> =
        corpus.docs.iter().map(|d| (d.doc_id.as_str(), d.sentence_spans())).collect();
    let mut expected: HashSet<(String, usize)> = HashSet::new();
    for r in &raw {
        let ty = r["rel_type"].as_str().unwrap();
        if ty != "Implicit" && ty != "AltLex" {
            continue;
        }
        let doc = r["doc_id"].as_str().unwrap();
        if let Some(l) = r["link"].as_str() {
            if link_count[&(doc.to_string(), l.to_string())] > 1 {
                continue;
            }
        }
        let mut all = spans_of(&r["arg1"]);
        all.extend(spans_of(&r["arg2"]));
        all.extend(spans_of(&r["conn_span"]));
        let host = sentence_spans[doc]
            .iter()
            .position(|&(s, e)| all.iter().all(|&(a, b)| s as u64 <= a && b <= e as u64));
        if let Some(i) = host {
            expected.insert((doc.to_string(), i));
        }
    }
    let split = build_sentence_dataset(&corpus, seed).map_err(err)?;
    let mut n = 0;
    for s in split.train.iter().chain(&split.dev).chain(&split.test) {
        let want = expected.contains(&(s.doc_id.clone(), s.sentence));
        if s.label != want {
            return Err(format!("{} sentence {}: label {} expected {want}", s.doc_id, s.sentence, s.label));
        }
        n += 1;
    }
    let total: usize = sentence_spans.values().map(Vec::len).sum();
    if n != total {
        return Err(format!("{n} dataset sentences for {total} parsed sentences"));
    }
    Ok(format!("{n} sentences, {} labelled 1", expected.len()))
}

pub fn majority_accuracy_is_frequency(trials: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let n = rng.gen_range(1..200);
        let rate: f64 = rng.gen_range(0.0..1.0);
        let labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(rate)).collect();
        let m = majority_baseline(&labels).map_err(|e| e.to_string())?;
        let r = binary_report(&labels, &vec![m; n]).map_err(|e| e.to_string())?;
        let ones = labels.iter().filter(|&&b| b).count();
        let freq = ones.max(n - ones) as f64 / n as f64;
        if r.accuracy != freq {
            return Err(format!("trial {t}: accuracy {} vs majority frequency {freq}", r.accuracy));
        }
    }
    Ok(format!("{trials} label sets, exact"))
}

/// Four instances, one binary feature, Laplace 1. By hand:
/// P(linked) = P(stand-alone) = 1/2,
/// P(f=1 | linked) = (2+1)/(2+2) = 3/4, P(f=1 | stand-alone) = (0+1)/(2+2) = 1/4,
/// so P(linked | f=1) = (3/8) / (3/8 + 1/8) = 3/4.
pub fn naive_bayes_hand_example() -> Check {
    let data: [(&[bool], bool); 4] = [(&[true], true), (&[true], true), (&[false], false), (&[false], false)];
    let nb = NaiveBayes::train(data, 1.0).map_err(|e| e.to_string())?;
    let p = nb.posterior(&[true]).map_err(|e| e.to_string())?;
    let q = nb.posterior(&[false]).map_err(|e| e.to_string())?;
    let hand = (0.5 * 0.75) / (0.5 * 0.75 + 0.5 * 0.25);
    if !close(p, hand, 1e-12) || !close(q, 1.0 - hand, 1e-12) {
        return Err(format!("posteriors {p}, {q} vs {hand}, {}", 1.0 - hand));
    }
    Ok(format!("P(linked | f=1) = {p}"))
}
