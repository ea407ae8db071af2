use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{
    dropout, grad_check, synthetic_embeddings, GradCheck, maxpool_backward, maxpool_time, softmax, softmax_xent, Activation, BatchNorm, BatchNormCache, Dense,
    Direction, EmbeddingTable, Interaction, Lstm, LstmCache, Params, Tensor,
};

/// Layer sizes of one Basic Model network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicConfig {
    pub embed_dim: usize,
    pub hidden: usize,
    pub dense: usize,
    pub outputs: usize,
    /// Extra features appended to the dense output before the output layer.
    pub extra_inputs: usize,
    pub dropout: f64,
}

impl BasicConfig {
    pub fn new(embed_dim: usize, hidden: usize, outputs: usize) -> Self {
        BasicConfig {
            embed_dim,
            hidden,
            dense: (hidden / 5).max(1),
            outputs,
            extra_inputs: 0,
            dropout: 0.25,
        }
    }
}

/// Trainable part of the Basic Model: one LSTM per argument, max pooling,
/// the argument interaction, batch normalization, a tanh dense layer and
/// the output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicNet {
    pub config: BasicConfig,
    pub lstm1: Lstm,
    pub lstm2: Lstm,
    pub interaction: Interaction,
    pub batchnorm: BatchNorm,
    pub dense: Dense,
    pub output: Dense,
}

impl Params for BasicNet {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        self.lstm1.visit(&mut |n, t| f(format!("lstm1.{n}"), t));
        self.lstm2.visit(&mut |n, t| f(format!("lstm2.{n}"), t));
        self.interaction.visit(&mut |n, t| f(format!("interaction.{n}"), t));
        self.batchnorm.visit(&mut |n, t| f(format!("batchnorm.{n}"), t));
        self.dense.visit(&mut |n, t| f(format!("dense.{n}"), t));
        self.output.visit(&mut |n, t| f(format!("output.{n}"), t));
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        self.lstm1.visit_mut(&mut |n, t| f(format!("lstm1.{n}"), t));
        self.lstm2.visit_mut(&mut |n, t| f(format!("lstm2.{n}"), t));
        self.interaction.visit_mut(&mut |n, t| f(format!("interaction.{n}"), t));
        self.batchnorm.visit_mut(&mut |n, t| f(format!("batchnorm.{n}"), t));
        self.dense.visit_mut(&mut |n, t| f(format!("dense.{n}"), t));
        self.output.visit_mut(&mut |n, t| f(format!("output.{n}"), t));
    }
}

/// One input pair plus any extra output-layer features.
#[derive(Debug, Clone, Copy)]
pub struct Example<'a> {
    pub arg1: &'a [String],
    pub arg2: &'a [String],
    pub extra: &'a [f64],
}

struct ArgCache {
    lstm: LstmCache,
    pooled: Vec<f64>,
    argmax: Vec<usize>,
    len: usize,
}

struct ExampleCache {
    a1: ArgCache,
    a2: ArgCache,
    hid: Vec<f64>,
    dense_in: Vec<f64>,
    dense_out: Vec<f64>,
    out_in: Vec<f64>,
    logits: Vec<f64>,
}

pub struct BatchCache {
    examples: Vec<ExampleCache>,
    bn: BatchNormCache,
    /// Batch-norm running statistics after this batch.
    pub running: (Vec<f64>, Vec<f64>),
}

impl BasicNet {
    pub fn new(config: BasicConfig, rng: &mut impl Rng) -> BasicNet {
        let c = config;
        BasicNet {
            lstm1: Lstm::new(c.embed_dim, c.hidden, Direction::Forward, rng),
            lstm2: Lstm::new(c.embed_dim, c.hidden, Direction::Forward, rng),
            interaction: Interaction::new(c.hidden, c.hidden, rng),
            batchnorm: BatchNorm::new(c.hidden),
            dense: Dense::new(c.hidden, c.dense, Activation::Tanh, rng),
            output: Dense::new(c.dense + c.extra_inputs, c.outputs, Activation::None, rng),
            config,
        }
    }

    fn encode(&self, lstm: &Lstm, table: &EmbeddingTable, toks: &[String], train: bool, rng: &mut impl Rng) -> Result<ArgCache> {
        let xs = table.embed(toks)?;
        let (xs, _) = dropout(&xs, self.config.dropout, rng, train)?;
        let (hs, cache) = lstm.forward(&xs)?;
        let (pooled, argmax) = maxpool_time(&hs)?;
        Ok(ArgCache {
            lstm: cache,
            pooled,
            argmax,
            len: toks.len(),
        })
    }

    /// Output logits for a batch. Training mode uses dropout and batch
    /// statistics; evaluation mode uses running statistics, so examples are
    /// independent.
    pub fn forward_batch(
        &self,
        table: &EmbeddingTable,
        batch: &[Example],
        train: bool,
        rng: &mut impl Rng,
    ) -> Result<(Vec<Vec<f64>>, BatchCache)> {
        if table.dim() != self.config.embed_dim {
            return Err(Error::shape(format!(
                "embedding size {} for a network expecting {}",
                table.dim(),
                self.config.embed_dim
            )));
        }
        let mut examples = Vec::with_capacity(batch.len());
        let mut hids = Vec::with_capacity(batch.len());
        for ex in batch {
            if ex.extra.len() != self.config.extra_inputs {
                return Err(Error::shape(format!(
                    "{} extra features for a network expecting {}",
                    ex.extra.len(),
                    self.config.extra_inputs
                )));
            }
            let a1 = self.encode(&self.lstm1, table, ex.arg1, train, rng)?;
            let a2 = self.encode(&self.lstm2, table, ex.arg2, train, rng)?;
            let hid = self.interaction.forward(&a1.pooled, &a2.pooled)?;
            hids.push(hid.clone());
            examples.push(ExampleCache {
                a1,
                a2,
                hid,
                dense_in: Vec::new(),
                dense_out: Vec::new(),
                out_in: Vec::new(),
                logits: Vec::new(),
            });
        }
        let mut bn = self.batchnorm.clone();
        let (normed, bn_cache) = bn.forward(&hids, train, train)?;
        let mut logits = Vec::with_capacity(batch.len());
        for ((ex, cache), x) in batch.iter().zip(&mut examples).zip(normed) {
            let d = self.dense.forward(&x)?;
            let mut o_in = d.clone();
            o_in.extend_from_slice(ex.extra);
            let l = self.output.forward(&o_in)?;
            cache.logits = l.clone();
            logits.push(l);
            cache.dense_in = x;
            cache.dense_out = d;
            cache.out_in = o_in;
        }
        Ok((
            logits,
            BatchCache {
                examples,
                bn: bn_cache,
                running: (bn.running_mean, bn.running_var),
            },
        ))
    }

    /// Accumulate parameter gradients for the given logit gradients.
    pub fn backward_batch(&self, cache: &BatchCache, d_logits: &[Vec<f64>], grad: &mut BasicNet) {
        let dn = self.config.dense;
        let mut d_bn_out = Vec::with_capacity(d_logits.len());
        for (c, dl) in cache.examples.iter().zip(d_logits) {
            let d_out_in = self.output.backward(&c.out_in, &c.logits, dl, &mut grad.output);
            d_bn_out.push(self.dense.backward(&c.dense_in, &c.dense_out, &d_out_in[..dn], &mut grad.dense));
        }
        let d_hid = self.batchnorm.backward(&cache.bn, &d_bn_out, &mut grad.batchnorm);
        for (c, dh) in cache.examples.iter().zip(&d_hid) {
            let (da1, da2) = self
                .interaction
                .backward(&c.a1.pooled, &c.a2.pooled, &c.hid, dh, &mut grad.interaction);
            for (lstm, g, a, da) in [
                (&self.lstm1, &mut grad.lstm1, &c.a1, da1),
                (&self.lstm2, &mut grad.lstm2, &c.a2, da2),
            ] {
                let dh_seq = maxpool_backward(&da, &a.argmax, a.len);
                // input gradients stop at the frozen embeddings
                lstm.backward(&a.lstm, &dh_seq, g);
            }
        }
    }

    /// Mean cross-entropy and its gradient for one training batch.
    pub fn loss_and_grad(
        &self,
        table: &EmbeddingTable,
        batch: &[Example],
        golds: &[usize],
        rng: &mut impl Rng,
    ) -> Result<(f64, BasicNet, BatchCache)> {
        let (logits, cache) = self.forward_batch(table, batch, true, rng)?;
        let n = batch.len() as f64;
        let mut loss = 0.0;
        let mut d = Vec::with_capacity(logits.len());
        for (l, &g) in logits.iter().zip(golds) {
            let (_, li, mut dl) = softmax_xent(l, g)?;
            loss += li / n;
            dl.iter_mut().for_each(|v| *v /= n);
            d.push(dl);
        }
        let mut grad = self.zeros_like();
        self.backward_batch(&cache, &d, &mut grad);
        Ok((loss, grad, cache))
    }

    pub fn predict_proba(&self, table: &EmbeddingTable, ex: Example, rng: &mut impl Rng) -> Result<Vec<f64>> {
        let (logits, _) = self.forward_batch(table, &[ex], false, rng)?;
        Ok(softmax(&logits[0]))
    }

    pub fn logits(&self, table: &EmbeddingTable, ex: Example, rng: &mut impl Rng) -> Result<Vec<f64>> {
        let (mut logits, _) = self.forward_batch(table, &[ex], false, rng)?;
        Ok(logits.remove(0))
    }
}

/// Finite-difference check of the whole network: batch of three 3-token
/// argument pairs, one extra input, dropout on with a fixed mask seed.
pub fn composed_grad_check(seed: u64, eps: f64) -> Result<GradCheck> {
    let toks = |s: &str| -> Vec<String> { s.split(' ').map(str::to_string).collect() };
    let vocab = toks("a b c d e f");
    let table = synthetic_embeddings(&vocab, 4, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cfg = BasicConfig::new(4, 5, 3);
    cfg.extra_inputs = 1;
    let net = BasicNet::new(cfg, &mut rng);
    let args = [toks("a b c"), toks("d e f"), toks("c a x"), toks("f f b"), toks("b d e"), toks("a c f")];
    let fs = [[1.0], [0.0], [1.0]];
    let batch: Vec<Example> = (0..3)
        .map(|i| Example {
            arg1: &args[2 * i],
            arg2: &args[2 * i + 1],
            extra: &fs[i],
        })
        .collect();
    let golds = [0, 2, 1];
    let mask_seed = seed.wrapping_add(1);
    let (_, grad, _) = net.loss_and_grad(&table, &batch, &golds, &mut ChaCha8Rng::seed_from_u64(mask_seed))?;
    grad_check(&net, &grad, eps, |q| {
        Ok(q.loss_and_grad(&table, &batch, &golds, &mut ChaCha8Rng::seed_from_u64(mask_seed))?.0)
    })
}
