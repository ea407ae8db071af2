use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sentence::{binary_report, build_vocab, BinaryReport, SentenceInstance};
use crate::classifiers::{EarlyStopping, EpochLog, TrainLog};
use crate::corpus::Split;
use crate::error::{Error, Result};
use crate::nn::{
    adam_step, bidirectional_backward, bidirectional_forward, maxpool_backward, maxpool_time, sigmoid_bce, Activation,
    AdamState, Dense, Direction, EmbeddingTable, Lstm, LstmCache, Params, Tensor,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecognizerConfig {
    pub embed_dim: usize,
    /// Per direction.
    pub hidden: usize,
    pub vocab_cap: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        RecognizerConfig {
            embed_dim: 200,
            hidden: 256,
            vocab_cap: 25_000,
            lr: 1e-4,
            batch_size: 32,
            patience: 3,
            max_epochs: 50,
            seed: 0,
            threshold: 0.5,
        }
    }
}

impl RecognizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.embed_dim == 0 || self.hidden == 0 || self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::invalid("recognizer sizes must be positive"));
        }
        if self.patience < 1 {
            return Err(Error::invalid("patience must be at least 1"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::invalid(format!("threshold {} outside (0, 1)", self.threshold)));
        }
        if !(self.lr > 0.0) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        Ok(())
    }
}

/// Sentence recognizer: trainable embeddings, a bidirectional LSTM, max
/// pooling over time and one logit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntraRecognizer {
    pub embedding: EmbeddingTable,
    pub fwd: Lstm,
    pub bwd: Lstm,
    pub head: Dense,
    pub threshold: f64,
}

impl Params for IntraRecognizer {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        self.embedding.visit(&mut |n, t| f(format!("embedding.{n}"), t));
        self.fwd.visit(&mut |n, t| f(format!("fwd.{n}"), t));
        self.bwd.visit(&mut |n, t| f(format!("bwd.{n}"), t));
        self.head.visit(&mut |n, t| f(format!("head.{n}"), t));
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        self.embedding.visit_mut(&mut |n, t| f(format!("embedding.{n}"), t));
        self.fwd.visit_mut(&mut |n, t| f(format!("fwd.{n}"), t));
        self.bwd.visit_mut(&mut |n, t| f(format!("bwd.{n}"), t));
        self.head.visit_mut(&mut |n, t| f(format!("head.{n}"), t));
    }
}

struct SentCache {
    ids: Vec<usize>,
    lstm: (LstmCache, LstmCache),
    argmax: Vec<usize>,
    pooled: Vec<f64>,
    logit: Vec<f64>,
}

impl IntraRecognizer {
    pub fn new(embedding: EmbeddingTable, hidden: usize, threshold: f64, rng: &mut impl Rng) -> IntraRecognizer {
        let d = embedding.dim();
        IntraRecognizer {
            fwd: Lstm::new(d, hidden, Direction::Forward, rng),
            bwd: Lstm::new(d, hidden, Direction::Backward, rng),
            head: Dense::new(2 * hidden, 1, Activation::None, rng),
            embedding,
            threshold,
        }
    }

    fn forward(&self, tokens: &[String]) -> Result<SentCache> {
        let xs = self.embedding.embed(tokens)?;
        let (hs, lstm) = bidirectional_forward(&xs, &self.fwd, &self.bwd)?;
        let (pooled, argmax) = maxpool_time(&hs)?;
        let logit = self.head.forward(&pooled)?;
        Ok(SentCache {
            ids: self.embedding.ids(tokens),
            lstm,
            argmax,
            pooled,
            logit,
        })
    }

    fn backward(&self, c: &SentCache, d_logit: f64, grad: &mut IntraRecognizer) {
        let d_pooled = self.head.backward(&c.pooled, &c.logit, &[d_logit], &mut grad.head);
        let d_hs = maxpool_backward(&d_pooled, &c.argmax, c.ids.len());
        let dx = bidirectional_backward(&self.fwd, &self.bwd, &c.lstm, &d_hs, &mut grad.fwd, &mut grad.bwd);
        self.embedding.backward(&c.ids, &dx, &mut grad.embedding);
    }

    pub fn logit(&self, tokens: &[String]) -> Result<f64> {
        Ok(self.forward(tokens)?.logit[0])
    }

    pub fn probability(&self, tokens: &[String]) -> Result<f64> {
        Ok(crate::nn::sigmoid_bce(self.logit(tokens)?, true).0)
    }

    pub fn predict(&self, tokens: &[String]) -> Result<bool> {
        Ok(self.probability(tokens)? >= self.threshold)
    }

    /// Mean binary cross-entropy over a batch and its gradient.
    pub fn loss_and_grad(&self, batch: &[&SentenceInstance]) -> Result<(f64, IntraRecognizer)> {
        let mut grad = self.zeros_like();
        let n = batch.len() as f64;
        let mut loss = 0.0;
        for s in batch {
            let c = self.forward(&s.tokens)?;
            let (_, l, d) = sigmoid_bce(c.logit[0], s.label);
            loss += l / n;
            self.backward(&c, d / n, &mut grad);
        }
        Ok((loss, grad))
    }

    pub fn evaluate(&self, data: &[SentenceInstance]) -> Result<BinaryReport> {
        let golds: Vec<bool> = data.iter().map(|s| s.label).collect();
        let preds = data.iter().map(|s| self.predict(&s.tokens)).collect::<Result<Vec<_>>>()?;
        binary_report(&golds, &preds)
    }
}

/// Train on `split.train`, keeping the epoch with the best positive-class
/// F1 on `split.dev`. `pretrained` vectors seed the rows they cover and must
/// match the configured dimension.
pub fn train_intra_recognizer(
    split: &Split<SentenceInstance>,
    cfg: &RecognizerConfig,
    pretrained: Option<&EmbeddingTable>,
) -> Result<(IntraRecognizer, TrainLog)> {
    cfg.validate()?;
    if split.train.is_empty() || split.dev.is_empty() {
        return Err(Error::invalid("recognizer needs non-empty train and dev sets"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let vocab = build_vocab(&split.train, cfg.vocab_cap);
    let mut table = EmbeddingTable::random(&vocab, cfg.embed_dim, true, &mut rng)?;
    if let Some(p) = pretrained {
        if p.dim() != cfg.embed_dim {
            return Err(Error::shape(format!(
                "pretrained vectors have {} dimensions, recognizer expects {}",
                p.dim(),
                cfg.embed_dim
            )));
        }
        table = warm_start(table, p)?;
    }
    let mut net = IntraRecognizer::new(table, cfg.hidden, cfg.threshold, &mut rng);
    let mut adam = AdamState::new(cfg.lr);
    let mut stopper = EarlyStopping::new(cfg.patience);
    let mut best = net.clone();
    let mut log = TrainLog::default();
    let mut order: Vec<&SentenceInstance> = split.train.iter().collect();
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for b in order.chunks(cfg.batch_size) {
            let (loss, grad) = net.loss_and_grad(b)?;
            adam_step(&mut net, &grad, &mut adam)?;
            total += loss * b.len() as f64;
        }
        let dev = net.evaluate(&split.dev)?.f1;
        let loss = total / order.len() as f64;
        log::info!("recognizer epoch {epoch}: loss {loss:.4}, dev F1 {dev:.4}");
        log.epochs.push(EpochLog {
            part: None,
            epoch,
            loss,
            dev_f1: dev,
        });
        let d = stopper.update(epoch, dev);
        if d.improved {
            best = net.clone();
        }
        if d.stop {
            break;
        }
    }
    Ok((best, log))
}

fn warm_start(table: EmbeddingTable, pretrained: &EmbeddingTable) -> Result<EmbeddingTable> {
    let tokens = table.tokens().to_vec();
    let mut m = table.matrix().clone();
    let mut hits = 0;
    for (i, t) in tokens.iter().enumerate().skip(1) {
        let j = pretrained.id(t);
        if j != 0 {
            m.row_mut(i).copy_from_slice(pretrained.row(j));
            hits += 1;
        }
    }
    log::info!("warm start covers {hits} of {} vocabulary rows", tokens.len() - 1);
    let mut t = EmbeddingTable::from_rows(tokens, m)?;
    t.trainable = true;
    Ok(t)
}
