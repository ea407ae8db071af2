//! Implicit sense classifiers: the Basic Model, Model 1 (separate inter-
//! and intra-sentential networks), Model 2 (location bit before the output
//! layer) and the most-frequent-sense baseline.

mod basic;
mod train;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use basic::{composed_grad_check, BasicConfig, BasicNet, BatchCache, Example};
pub use train::{EarlyStopping, EpochLog, LocationFeature, StopDecision, TrainConfig, TrainLog};

use crate::corpus::{eval_view, Instance, Location};
use crate::error::{Error, Result};
use crate::eval::{evaluate, MetricsReport, Scored};
use crate::nn::{argmax, softmax, EmbeddingTable};
use crate::sense::{SenseInventory, SenseLevel};
use train::{fit, TrainItem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mfs,
    Basic,
    Model1,
    Model2,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Mfs, ModelKind::Basic, ModelKind::Model1, ModelKind::Model2];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Mfs => "mfs",
            ModelKind::Basic => "basic",
            ModelKind::Model1 => "model1",
            ModelKind::Model2 => "model2",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::validation("model kind", s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Body {
    Mfs { sense: usize },
    Basic(BasicNet),
    Model1 { inter: BasicNet, intra: BasicNet },
    Model2(BasicNet),
}

/// A trained sense classifier with everything needed to predict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseClassifier {
    pub kind: ModelKind,
    pub level: SenseLevel,
    pub location_feature: LocationFeature,
    pub embedding: Option<EmbeddingTable>,
    pub body: Body,
}

fn location_bit(loc: Location, feature: LocationFeature) -> f64 {
    match feature {
        LocationFeature::Informative if loc.is_intra() => 1.0,
        _ => 0.0,
    }
}

impl SenseClassifier {
    pub fn inventory(&self) -> SenseInventory {
        SenseInventory::new(self.level)
    }

    fn table(&self) -> Result<&EmbeddingTable> {
        self.embedding
            .as_ref()
            .ok_or_else(|| Error::invalid("neural classifier without an embedding table"))
    }

    /// Output logits for one argument pair at a known location.
    pub fn logits(&self, arg1: &[String], arg2: &[String], location: Location) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        fn ex<'a>(arg1: &'a [String], arg2: &'a [String], extra: &'a [f64]) -> Example<'a> {
            Example { arg1, arg2, extra }
        }
        match &self.body {
            Body::Mfs { sense } => {
                let mut v = vec![0.0; self.inventory().len()];
                v[*sense] = 1.0;
                Ok(v)
            }
            Body::Basic(net) => net.logits(self.table()?, ex(arg1, arg2, &[]), &mut rng),
            Body::Model1 { inter, intra } => {
                let net = if location.is_intra() { intra } else { inter };
                net.logits(self.table()?, ex(arg1, arg2, &[]), &mut rng)
            }
            Body::Model2(net) => {
                let f = [location_bit(location, self.location_feature)];
                net.logits(self.table()?, ex(arg1, arg2, &f), &mut rng)
            }
        }
    }

    pub fn predict_proba(&self, arg1: &[String], arg2: &[String], location: Location) -> Result<Vec<f64>> {
        match self.body {
            Body::Mfs { .. } => self.logits(arg1, arg2, location),
            _ => Ok(softmax(&self.logits(arg1, arg2, location)?)),
        }
    }

    /// Argmax inventory index; the lowest index wins ties.
    pub fn predict(&self, arg1: &[String], arg2: &[String], location: Location) -> Result<usize> {
        Ok(argmax(&self.logits(arg1, arg2, location)?))
    }

    pub fn predict_instance(&self, inst: &Instance) -> Result<usize> {
        self.predict(&inst.arg1_tokens, &inst.arg2_tokens, inst.location)
    }

    /// Scores over one instance per relation; a prediction matching any gold
    /// sense is correct.
    pub fn score(&self, instances: &[Instance]) -> Result<MetricsReport> {
        let inv = self.inventory();
        let scored = scored_predictions(instances, &inv, |i| self.predict_instance(i))?;
        evaluate(&scored, inv.labels())
    }
}

/// Gold indices of an instance at the inventory's level, skipping senses
/// that have no output slot.
pub fn gold_indices(inst: &Instance, inv: &SenseInventory) -> Vec<usize> {
    let mut g: Vec<usize> = inst.gold.iter().filter_map(|s| inv.index_of(s)).collect();
    g.dedup();
    g
}

pub(crate) fn scored_predictions(
    instances: &[Instance],
    inv: &SenseInventory,
    mut predict: impl FnMut(&Instance) -> Result<usize>,
) -> Result<Vec<Scored>> {
    let mut out = Vec::new();
    for inst in eval_view(instances) {
        let gold = gold_indices(inst, inv);
        if gold.is_empty() {
            continue;
        }
        out.push(Scored {
            gold,
            pred: predict(inst)?,
            location: inst.location,
        });
    }
    Ok(out)
}

/// Inventory index of the most frequent training sense; ties go to the
/// lexicographically smallest label.
pub fn mfs_predict(train: &[Instance], level: SenseLevel) -> Result<usize> {
    let inv = SenseInventory::new(level);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for inst in train {
        if let Some(i) = inv.index_of(&inst.sense) {
            *counts.entry(inv.label(i)).or_default() += 1;
        }
    }
    let best = counts
        .iter()
        .fold(None, |acc: Option<(&str, usize)>, (&l, &c)| match acc {
            Some((_, bc)) if bc >= c => acc,
            _ => Some((l, c)),
        })
        .ok_or_else(|| Error::invalid("empty training set"))?;
    Ok(inv.index_of_name(best.0).unwrap())
}

fn train_items<'a>(
    instances: &'a [Instance],
    inv: &SenseInventory,
    extra: impl Fn(&Instance) -> Vec<f64>,
) -> Vec<TrainItem<'a>> {
    let mut skipped = 0;
    let items: Vec<TrainItem> = instances
        .iter()
        .filter_map(|i| match inv.index_of(&i.sense) {
            Some(gold) => Some(TrainItem {
                arg1: &i.arg1_tokens,
                arg2: &i.arg2_tokens,
                extra: extra(i),
                gold,
            }),
            None => {
                skipped += 1;
                None
            }
        })
        .collect();
    if skipped > 0 {
        log::warn!("{skipped} training instances have no slot at level {}", inv.level().number());
    }
    items
}

fn warn_missing_dev_labels(train: &[Instance], dev: &[Instance], inv: &SenseInventory) {
    let dev_labels: std::collections::HashSet<usize> = dev.iter().flat_map(|i| gold_indices(i, inv)).collect();
    let mut missing: Vec<&str> = train
        .iter()
        .filter_map(|i| inv.index_of(&i.sense))
        .filter(|i| !dev_labels.contains(i))
        .map(|i| inv.label(i))
        .collect();
    missing.sort_unstable();
    missing.dedup();
    if !missing.is_empty() {
        log::warn!("dev set lacks training labels: {}", missing.join(", "));
    }
}

fn dev_f1(net: &BasicNet, table: &EmbeddingTable, dev: &[Instance], inv: &SenseInventory, extra: &dyn Fn(&Instance) -> Vec<f64>) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let scored = scored_predictions(dev, inv, |i| {
        let f = extra(i);
        let ex = Example {
            arg1: &i.arg1_tokens,
            arg2: &i.arg2_tokens,
            extra: &f,
        };
        Ok(argmax(&net.logits(table, ex, &mut rng)?))
    })?;
    if scored.is_empty() {
        return Ok(0.0);
    }
    Ok(evaluate(&scored, inv.labels())?.overall_micro)
}

/// Train one classifier. Neural kinds need an embedding table; the
/// returned model is the epoch with the best dev score.
pub fn train(
    kind: ModelKind,
    train: &[Instance],
    dev: &[Instance],
    embedding: Option<EmbeddingTable>,
    cfg: &TrainConfig,
) -> Result<(SenseClassifier, TrainLog)> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    let level = SenseLevel::from_number(cfg.level)?;
    let inv = SenseInventory::new(level);
    let mut log = TrainLog::default();
    if kind == ModelKind::Mfs {
        let sense = mfs_predict(train, level)?;
        return Ok((
            SenseClassifier {
                kind,
                level,
                location_feature: cfg.location_feature,
                embedding: None,
                body: Body::Mfs { sense },
            },
            log,
        ));
    }
    if dev.is_empty() {
        return Err(Error::invalid("empty dev set"));
    }
    let table = embedding.ok_or_else(|| Error::invalid(format!("{kind} needs word embeddings")))?;
    warn_missing_dev_labels(train, dev, &inv);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bc = BasicConfig::new(table.dim(), cfg.hidden, inv.len());
    bc.dropout = cfg.dropout;
    if let Some(d) = cfg.dense {
        bc.dense = d;
    }
    let none = |_: &Instance| Vec::new();
    let body = match kind {
        ModelKind::Basic => {
            let items = train_items(train, &inv, none);
            let net = BasicNet::new(bc, &mut rng);
            let (net, l) = fit(net, &table, &items, cfg, &mut rng, None, |n| dev_f1(n, &table, dev, &inv, &none))?;
            log.epochs = l;
            Body::Basic(net)
        }
        ModelKind::Model2 => {
            bc.extra_inputs = 1;
            let feature = cfg.location_feature;
            let fs = move |i: &Instance| vec![location_bit(i.location, feature)];
            let items = train_items(train, &inv, fs);
            let net = BasicNet::new(bc, &mut rng);
            let (net, l) = fit(net, &table, &items, cfg, &mut rng, None, |n| dev_f1(n, &table, dev, &inv, &fs))?;
            log.epochs = l;
            Body::Model2(net)
        }
        ModelKind::Model1 => {
            let mut nets = Vec::new();
            for (part, intra) in [("inter", false), ("intra", true)] {
                let tr: Vec<Instance> = train.iter().filter(|i| i.location.is_intra() == intra).cloned().collect();
                let mut dv: Vec<Instance> = dev.iter().filter(|i| i.location.is_intra() == intra).cloned().collect();
                if dv.is_empty() {
                    log::warn!("no {part}-sentential dev instances; using the whole dev set");
                    dv = dev.to_vec();
                }
                let net = BasicNet::new(bc, &mut rng);
                if tr.is_empty() {
                    log::warn!("no {part}-sentential training instances; sub-model left untrained");
                    nets.push(net);
                    continue;
                }
                let items = train_items(&tr, &inv, none);
                let (net, l) = fit(net, &table, &items, cfg, &mut rng, Some(part), |n| dev_f1(n, &table, &dv, &inv, &none))?;
                log.epochs.extend(l);
                nets.push(net);
            }
            let intra = nets.pop().unwrap();
            let inter = nets.pop().unwrap();
            Body::Model1 { inter, intra }
        }
        ModelKind::Mfs => unreachable!(),
    };
    Ok((
        SenseClassifier {
            kind,
            level,
            location_feature: cfg.location_feature,
            embedding: Some(table),
            body,
        },
        log,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub embed_dim: usize,
    pub hidden: usize,
    /// Weighted overall F1 on the test set.
    pub f1: f64,
}

/// Train one model per (embedding size, hidden size) and score it on
/// `test`. `embeddings` supplies a table of the requested size.
pub fn config_sweep(
    configs: &[(usize, usize)],
    mut embeddings: impl FnMut(usize) -> Result<EmbeddingTable>,
    kind: ModelKind,
    train_set: &[Instance],
    dev: &[Instance],
    test: &[Instance],
    cfg: &TrainConfig,
) -> Result<Vec<SweepRow>> {
    if configs.is_empty() {
        return Err(Error::invalid("no configurations to sweep"));
    }
    let mut rows = Vec::with_capacity(configs.len());
    for &(embed_dim, hidden) in configs {
        let table = embeddings(embed_dim)?;
        if table.dim() != embed_dim {
            return Err(Error::shape(format!("asked for {embed_dim}-d embeddings, got {}", table.dim())));
        }
        let c = TrainConfig {
            hidden,
            ..cfg.clone()
        };
        let (model, _) = train(kind, train_set, dev, Some(table), &c)?;
        rows.push(SweepRow {
            embed_dim,
            hidden,
            f1: model.score(test)?.overall_micro,
        });
    }
    Ok(rows)
}
