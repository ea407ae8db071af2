use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basic::{BasicNet, Example};
use crate::corpus::SensePolicy;
use crate::error::{Error, Result};
use crate::nn::{adam_step, AdamState, EmbeddingTable};

/// How Model 2 fills its location feature.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocationFeature {
    /// 1 for intra-sentential, 0 for inter-sentential.
    #[default]
    Informative,
    /// Always 0; an ablation.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub level: u8,
    pub dropout: f64,
    pub hidden: usize,
    /// Defaults to `hidden / 5`.
    pub dense: Option<usize>,
    pub policy: SensePolicy,
    pub location_feature: LocationFeature,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 0.001,
            batch_size: 32,
            patience: 3,
            max_epochs: 100,
            seed: 0,
            level: 2,
            dropout: 0.25,
            hidden: 100,
            dense: None,
            policy: SensePolicy::AllSenses,
            location_feature: LocationFeature::Informative,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.patience < 1 {
            return Err(Error::invalid("patience must be at least 1"));
        }
        if self.level != 2 && self.level != 3 {
            return Err(Error::invalid(format!("sense level must be 2 or 3, got {}", self.level)));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.hidden == 0 {
            return Err(Error::invalid("batch size, epoch cap and hidden size must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::invalid(format!("dropout {} outside [0, 1)", self.dropout)));
        }
        if !(self.lr > 0.0) {
            return Err(Error::invalid("learning rate must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    /// Sub-model name for Model 1 (`inter` / `intra`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub part: Option<String>,
    pub epoch: usize,
    pub loss: f64,
    pub dev_f1: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
}

impl TrainLog {
    /// One JSON object per epoch.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut s = String::new();
        for e in &self.epochs {
            s.push_str(&serde_json::to_string(e)?);
            s.push('\n');
        }
        Ok(s)
    }
}

/// Stop once the dev score has not improved for `patience` epochs.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    pub patience: usize,
    pub best: Option<(usize, f64)>,
    since: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopDecision {
    pub improved: bool,
    pub stop: bool,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience,
            best: None,
            since: 0,
        }
    }

    pub fn update(&mut self, epoch: usize, score: f64) -> StopDecision {
        let improved = self.best.is_none_or(|(_, b)| score > b);
        if improved {
            self.best = Some((epoch, score));
            self.since = 0;
        } else {
            self.since += 1;
        }
        StopDecision {
            improved,
            stop: self.since >= self.patience,
        }
    }
}

pub(crate) struct TrainItem<'a> {
    pub arg1: &'a [String],
    pub arg2: &'a [String],
    pub extra: Vec<f64>,
    pub gold: usize,
}

/// Minibatch Adam with early stopping on `dev_score`; returns the
/// best-scoring network.
pub(crate) fn fit(
    mut net: BasicNet,
    table: &EmbeddingTable,
    items: &[TrainItem],
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
    part: Option<&str>,
    mut dev_score: impl FnMut(&BasicNet) -> Result<f64>,
) -> Result<(BasicNet, Vec<EpochLog>)> {
    if items.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    let mut adam = AdamState::new(cfg.lr);
    let mut stopper = EarlyStopping::new(cfg.patience);
    let mut best = net.clone();
    let mut log = Vec::new();
    let mut order: Vec<usize> = (0..items.len()).collect();
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(rng);
        let mut batches: Vec<&[usize]> = order.chunks(cfg.batch_size).collect();
        // a trailing single example gives batch normalization nothing to normalize
        if batches.len() > 1 && batches.last().unwrap().len() == 1 {
            batches.pop();
            let n = batches.len();
            batches[n - 1] = &order[(n - 1) * cfg.batch_size..];
        }
        let mut total = 0.0;
        for b in batches {
            let batch: Vec<Example> = b
                .iter()
                .map(|&i| Example {
                    arg1: items[i].arg1,
                    arg2: items[i].arg2,
                    extra: &items[i].extra,
                })
                .collect();
            let golds: Vec<usize> = b.iter().map(|&i| items[i].gold).collect();
            let (loss, grad, cache) = net.loss_and_grad(table, &batch, &golds, rng)?;
            adam_step(&mut net, &grad, &mut adam)?;
            net.batchnorm.running_mean = cache.running.0;
            net.batchnorm.running_var = cache.running.1;
            total += loss * b.len() as f64;
        }
        let dev = dev_score(&net)?;
        let loss = total / items.len() as f64;
        log::info!("{}epoch {epoch}: loss {loss:.4}, dev F1 {dev:.4}", part.map(|p| format!("{p} ")).unwrap_or_default());
        log.push(EpochLog {
            part: part.map(str::to_string),
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stops_after_patience() {
        let mut s = EarlyStopping::new(3);
        let scores = [0.5, 0.4, 0.3, 0.2, 0.1, 0.0];
        let mut stopped = None;
        for (i, &sc) in scores.iter().enumerate() {
            if s.update(i + 1, sc).stop {
                stopped = Some(i + 1);
                break;
            }
        }
        assert_eq!(stopped, Some(4));
        assert_eq!(s.best, Some((1, 0.5)));
    }

    #[test]
    fn equal_score_is_not_improvement() {
        let mut s = EarlyStopping::new(1);
        assert!(s.update(1, 0.5).improved);
        let d = s.update(2, 0.5);
        assert!(!d.improved && d.stop);
    }

    #[test]
    fn config_checks() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig {
            patience: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            level: 4,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
