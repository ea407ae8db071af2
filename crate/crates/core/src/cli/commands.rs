use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::BufReader;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, SplitChoice};
use crate::classifiers::{composed_grad_check, train, SenseClassifier};
use crate::corpus::synth::generate_synthetic_corpus;
use crate::corpus::{
    cv_folds, link_warnings, locate, make_instances, random_split, Corpus, Instance, InstanceOptions, RelType, Split,
    SplitSpec,
};
use crate::error::{Error, Result};
use crate::eval::{chi_square_location, cross_validate, distribution, Axis, ChiSquareResult, CvReport, DistributionReport, MetricsReport};
use crate::nn::{config_hash, layer_suite, synthetic_embeddings, Checkpoint, EmbeddingTable, GradCheck};
use crate::recognizers::{
    build_linked_dataset, build_sentence_dataset, majority_baseline, pipeline_classify, train_intra_recognizer,
    binary_report, BinaryReport, IntraRecognizer, LinkedRecognizer, PipelineReport,
};

pub const CLASSIFIER_KIND: &str = "sense-classifier";
pub const RECOGNIZER_KIND: &str = "intra-recognizer";

/// Written next to every command's artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub version: String,
    pub created_unix: u64,
}

fn write_manifest(cfg: &ExperimentConfig, command: &str) -> Result<String> {
    let hash = config_hash(cfg)?;
    let m = Manifest {
        command: command.to_string(),
        config_hash: hash.clone(),
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    write_json(&cfg.out.join(format!("manifest_{command}.json")), &m)?;
    Ok(hash)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::Io(e).in_file(path))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).map_err(|e| Error::Io(e).in_file(path))
}

pub fn load_corpus(cfg: &ExperimentConfig) -> Result<Corpus> {
    cfg.validate()?;
    Corpus::load(&cfg.corpus_paths())
}

fn instances(cfg: &ExperimentConfig, corpus: &Corpus) -> Vec<Instance> {
    make_instances(
        corpus,
        InstanceOptions {
            policy: cfg.train.policy,
            include_altlex: false,
        },
    )
}

fn split_instances(cfg: &ExperimentConfig, all: Vec<Instance>) -> Result<Split<Instance>> {
    let split = match cfg.split {
        SplitChoice::Standard => SplitSpec::standard().apply(&all),
        SplitChoice::Random => random_split_by_relation(all, cfg.require_seed()?),
    };
    if split.train.is_empty() || split.dev.is_empty() || split.test.is_empty() {
        return Err(Error::invalid(format!(
            "split leaves an empty part (train {}, dev {}, test {})",
            split.train.len(),
            split.dev.len(),
            split.test.len()
        )));
    }
    Ok(split)
}

/// Random 60/20/20 over relations, so the senses of one relation stay together.
fn random_split_by_relation(all: Vec<Instance>, seed: u64) -> Split<Instance> {
    let mut groups: BTreeMap<_, Vec<Instance>> = BTreeMap::new();
    for i in all {
        groups.entry(i.rel_id.clone()).or_default().push(i);
    }
    random_split(groups.into_values().collect(), seed, 0.6, 0.2).map(|g| g.into_iter().flatten().collect())
}

/// Pretrained vectors restricted to the instance vocabulary, or seeded
/// random vectors when no file is configured.
pub fn embeddings_for(cfg: &ExperimentConfig, instances: &[Instance]) -> Result<EmbeddingTable> {
    let mut vocab: Vec<String> = instances
        .iter()
        .flat_map(|i| i.arg1_tokens.iter().chain(&i.arg2_tokens))
        .cloned()
        .collect();
    vocab.sort();
    vocab.dedup();
    match &cfg.embeddings.path {
        Some(p) => {
            let keep: HashSet<String> = vocab.into_iter().collect();
            let f = File::open(p).map_err(|e| Error::Io(e).in_file(p))?;
            let t = EmbeddingTable::load_text(BufReader::new(f), Some(&keep)).map_err(|e| e.in_file(p))?;
            if t.dim() != cfg.embeddings.dim {
                log::warn!("{} has {}-d vectors; config says {}", p.display(), t.dim(), cfg.embeddings.dim);
            }
            Ok(t)
        }
        None => synthetic_embeddings(&vocab, cfg.embeddings.dim, cfg.seed.unwrap_or(0)),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub documents: usize,
    pub parsed_documents: usize,
    pub relations: usize,
    pub by_type: BTreeMap<String, usize>,
    pub implicit_inter: usize,
    pub implicit_intra: usize,
    pub warnings: Vec<String>,
}

/// Load the corpus, align trees and locate every relation.
pub fn cmd_validate(cfg: &ExperimentConfig) -> Result<ValidateReport> {
    let corpus = load_corpus(cfg)?;
    let mut r = ValidateReport {
        documents: corpus.docs.len(),
        ..Default::default()
    };
    for doc in &corpus.docs {
        r.warnings.extend(link_warnings(&doc.relations));
        if doc.sentences.is_empty() {
            continue;
        }
        r.parsed_documents += 1;
        let spans = doc.sentence_spans();
        for rel in &doc.relations {
            rel.validate().map_err(|e| e.in_file(&doc.doc_id))?;
            let loc = locate(rel, &spans).map_err(|e| e.in_file(&doc.doc_id))?;
            if rel.rel_type == RelType::Implicit {
                if loc.is_intra() {
                    r.implicit_intra += 1;
                } else {
                    r.implicit_inter += 1;
                }
            }
        }
    }
    for rel in corpus.relations() {
        r.relations += 1;
        *r.by_type.entry(rel.rel_type.as_str().to_string()).or_default() += 1;
    }
    Ok(r)
}

/// Sense distribution by location or linkage; writes `distribution_<axis>.tsv`.
pub fn cmd_stats(cfg: &ExperimentConfig, axis: Axis) -> Result<DistributionReport> {
    let corpus = load_corpus(cfg)?;
    let report = distribution(&corpus, axis);
    let name = match axis {
        Axis::Location => "location",
        Axis::Linkage => "linkage",
    };
    write_text(&cfg.out.join(format!("distribution_{name}.tsv")), &report.to_tsv())?;
    write_manifest(cfg, "stats")?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub model: String,
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    pub epochs: usize,
    pub metrics: MetricsReport,
    /// Correct/incorrect against location on the test predictions.
    pub chi_square: ChiSquareResult,
}

fn chi_square_of(classifier: &SenseClassifier, test: &[Instance]) -> Result<ChiSquareResult> {
    let inv = classifier.inventory();
    let mut correct = Vec::new();
    let mut locs = Vec::new();
    for i in crate::corpus::eval_view(test) {
        let gold = crate::classifiers::gold_indices(i, &inv);
        if gold.is_empty() {
            continue;
        }
        correct.push(gold.contains(&classifier.predict_instance(i)?));
        locs.push(i.location);
    }
    chi_square_location(&correct, &locs, true)
}

/// Train the configured model; writes the checkpoint, epoch log and test
/// metrics.
pub fn cmd_train(cfg: &ExperimentConfig) -> Result<(SenseClassifier, TrainReport)> {
    cfg.require_seed()?;
    let cfg = cfg.clone().seeded();
    let corpus = load_corpus(&cfg)?;
    let all = instances(&cfg, &corpus);
    let table = embeddings_for(&cfg, &all)?;
    let split = split_instances(&cfg, all)?;
    let (classifier, log) = train(cfg.model, &split.train, &split.dev, Some(table), &cfg.train)?;
    let metrics = classifier.score(&split.test)?;
    let report = TrainReport {
        model: cfg.model.to_string(),
        train: split.train.len(),
        dev: split.dev.len(),
        test: split.test.len(),
        epochs: log.epochs.len(),
        chi_square: chi_square_of(&classifier, &split.test)?,
        metrics,
    };
    let hash = write_manifest(&cfg, "train")?;
    Checkpoint::new(CLASSIFIER_KIND, hash, classifier.clone()).save(&cfg.out.join("model.json"))?;
    write_text(&cfg.out.join("train_log.jsonl"), &log.to_jsonl()?)?;
    write_text(&cfg.out.join("metrics.tsv"), &report.metrics.to_tsv())?;
    write_json(&cfg.out.join("report.json"), &report)?;
    Ok((classifier, report))
}

/// Score a saved classifier on the test part of the configured split.
pub fn cmd_eval(cfg: &ExperimentConfig, checkpoint: &Path) -> Result<MetricsReport> {
    let ck: Checkpoint<SenseClassifier> = Checkpoint::load(checkpoint, CLASSIFIER_KIND)?;
    let corpus = load_corpus(cfg)?;
    let split = split_instances(cfg, instances(cfg, &corpus))?;
    let metrics = ck.payload.score(&split.test)?;
    write_text(&cfg.out.join("eval_metrics.tsv"), &metrics.to_tsv())?;
    write_json(&cfg.out.join("eval_report.json"), &metrics)?;
    write_manifest(cfg, "eval")?;
    Ok(metrics)
}

/// k-fold cross-validation over contiguous section groups, scoring the
/// weighted overall micro F1 of each test fold.
pub fn cmd_cv(cfg: &ExperimentConfig, k: usize) -> Result<CvReport> {
    cfg.require_seed()?;
    let cfg = cfg.clone().seeded();
    let corpus = load_corpus(&cfg)?;
    let all = instances(&cfg, &corpus);
    let table = embeddings_for(&cfg, &all)?;
    let folds = cv_folds(&corpus.sections(), k)?;
    let report = cross_validate(&folds, |i, f| {
        let s = f.apply(&all);
        if s.train.is_empty() || s.dev.is_empty() || s.test.is_empty() {
            return Err(Error::invalid(format!("fold {i} has no instances in some part")));
        }
        let (m, _) = train(cfg.model, &s.train, &s.dev, Some(table.clone()), &cfg.train)?;
        Ok(m.score(&s.test)?.overall_micro)
    })?;
    write_json(&cfg.out.join("cv.json"), &report)?;
    write_manifest(&cfg, "cv")?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recognizer {
    Intra,
    Linked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecognizeReport {
    pub recognizer: Recognizer,
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    /// Share of positive labels in the test set.
    pub positive_rate: f64,
    pub baseline: BinaryReport,
    pub model: BinaryReport,
}

fn constant_report(labels: &[bool], value: bool) -> Result<BinaryReport> {
    binary_report(labels, &vec![value; labels.len()])
}

fn positive_rate(labels: &[bool]) -> f64 {
    if labels.is_empty() {
        0.0
    } else {
        labels.iter().filter(|&&l| l).count() as f64 / labels.len() as f64
    }
}

/// Train and score one recognizer against the majority baseline.
pub fn cmd_recognize(cfg: &ExperimentConfig, which: Recognizer) -> Result<RecognizeReport> {
    let seed = cfg.require_seed()?;
    let cfg = cfg.clone().seeded();
    let corpus = load_corpus(&cfg)?;
    let report = match which {
        Recognizer::Intra => {
            let split = build_sentence_dataset(&corpus, seed)?;
            let train_labels: Vec<bool> = split.train.iter().map(|s| s.label).collect();
            let test_labels: Vec<bool> = split.test.iter().map(|s| s.label).collect();
            let pretrained = match &cfg.embeddings.path {
                Some(p) => {
                    let f = File::open(p).map_err(|e| Error::Io(e).in_file(p))?;
                    Some(EmbeddingTable::load_text(BufReader::new(f), None).map_err(|e| e.in_file(p))?)
                }
                None => None,
            };
            let (net, log) = train_intra_recognizer(&split, &cfg.recognizer, pretrained.as_ref())?;
            let hash = config_hash(&cfg)?;
            Checkpoint::<IntraRecognizer>::new(RECOGNIZER_KIND, hash, net.clone())
                .save(&cfg.out.join("intra_recognizer.json"))?;
            write_text(&cfg.out.join("recognizer_log.jsonl"), &log.to_jsonl()?)?;
            RecognizeReport {
                recognizer: which,
                train: split.train.len(),
                dev: split.dev.len(),
                test: split.test.len(),
                positive_rate: positive_rate(&test_labels),
                baseline: constant_report(&test_labels, majority_baseline(&train_labels)?)?,
                model: net.evaluate(&split.test)?,
            }
        }
        Recognizer::Linked => {
            let data = build_linked_dataset(&corpus, cfg.linked.features, cfg.linked.mode)?;
            let rec = LinkedRecognizer::train(&data, cfg.linked.alpha)?;
            write_text(&cfg.out.join("linked_recognizer.json"), &rec.to_json()?)?;
            let train_labels: Vec<bool> = data.split.train.iter().map(|i| i.label).collect();
            let test_labels: Vec<bool> = data.split.test.iter().map(|i| i.label).collect();
            let preds = rec.predict_all(&data.split.test)?;
            RecognizeReport {
                recognizer: which,
                train: data.split.train.len(),
                dev: data.split.dev.len(),
                test: data.split.test.len(),
                positive_rate: positive_rate(&test_labels),
                baseline: constant_report(&test_labels, majority_baseline(&train_labels)?)?,
                model: binary_report(&test_labels, &preds)?,
            }
        }
    };
    write_json(&cfg.out.join(format!("recognize_{}.json", match which {
        Recognizer::Intra => "intra",
        Recognizer::Linked => "linked",
    })), &report)?;
    write_manifest(&cfg, "recognize")?;
    Ok(report)
}

/// Linked recognizer, then the configured sense classifier on the flagged
/// test relations.
pub fn cmd_pipeline(cfg: &ExperimentConfig) -> Result<PipelineReport> {
    cfg.require_seed()?;
    let cfg = cfg.clone().seeded();
    let corpus = load_corpus(&cfg)?;
    let data = build_linked_dataset(&corpus, cfg.linked.features, cfg.linked.mode)?;
    let rec = LinkedRecognizer::train(&data, cfg.linked.alpha)?;
    let flagged = rec.predict_all(&data.split.test)?;
    let all = instances(&cfg, &corpus);
    let table = embeddings_for(&cfg, &all)?;
    let split = SplitSpec::standard().apply(&all);
    let (classifier, _) = train(cfg.model, &split.train, &split.dev, Some(table), &cfg.train)?;
    let (preds, report) = pipeline_classify(&corpus, &data.split.test, &flagged, &classifier)?;
    let mut lines = String::new();
    for p in &preds {
        lines.push_str(&serde_json::to_string(p)?);
        lines.push('\n');
    }
    write_text(&cfg.out.join("pipeline_predictions.jsonl"), &lines)?;
    write_json(&cfg.out.join("pipeline.json"), &report)?;
    write_manifest(&cfg, "pipeline")?;
    Ok(report)
}

/// Finite-difference check of every layer and the composed model.
pub fn cmd_gradcheck(seed: u64) -> Result<Vec<(String, GradCheck)>> {
    let eps = 1e-5;
    let mut out = layer_suite(seed, eps)?;
    out.push(("basic_model".to_string(), composed_grad_check(seed, eps)?));
    Ok(out)
}

/// Write a synthetic corpus and a ready-to-run config beside it.
pub fn cmd_synth(seed: u64, size: usize, out: &Path) -> Result<ExperimentConfig> {
    let s = generate_synthetic_corpus(seed, size)?;
    s.write_to(out)?;
    let cfg = ExperimentConfig::from_toml(&format!(
        "seed = {seed}\nsplit = \"random\"\nout = \"runs\"\n\n[corpus]\nrelations = \"relations.jsonl\"\nformat = \"json_lines\"\ntrees = \"trees\"\nraw = \"raw\"\n\n\
         [train]\nlr = 0.003\npatience = 10\nbatch_size = 16\n\n\
         [recognizer]\nembed_dim = 32\nhidden = 32\nlr = 0.003\npatience = 5\nmax_epochs = 30\n"
    ))?;
    write_text(&out.join("experiment.toml"), &cfg.to_toml()?)?;
    Ok(cfg)
}
