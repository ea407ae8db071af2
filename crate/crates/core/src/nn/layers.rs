use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tensor::{sigmoid, Params, Tensor};
use crate::error::{Error, Result};

/// Elementwise max over time. Also returns the winning time step per
/// dimension (first on ties).
pub fn maxpool_time(hs: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<usize>)> {
    let first = hs.first().ok_or_else(|| Error::invalid("maxpool over an empty sequence"))?;
    let mut a = first.clone();
    let mut idx = vec![0; a.len()];
    for (t, h) in hs.iter().enumerate().skip(1) {
        if h.len() != a.len() {
            return Err(Error::shape(format!("state {t} has size {}, expected {}", h.len(), a.len())));
        }
        for j in 0..a.len() {
            if h[j] > a[j] {
                a[j] = h[j];
                idx[j] = t;
            }
        }
    }
    Ok((a, idx))
}

pub fn maxpool_backward(d_a: &[f64], idx: &[usize], len: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; d_a.len()]; len];
    for (j, (&d, &t)) in d_a.iter().zip(idx).enumerate() {
        out[t][j] = d;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    /// `[out, in]`
    pub w: Tensor,
    pub b: Tensor,
    pub activation: Activation,
}

impl Dense {
    pub fn new(input: usize, output: usize, activation: Activation, rng: &mut impl Rng) -> Dense {
        let bound = 1.0 / (input.max(1) as f64).sqrt();
        Dense {
            w: Tensor::uniform(&[output, input], bound, rng),
            b: Tensor::zeros(&[output]),
            activation,
        }
    }

    pub fn input_size(&self) -> usize {
        self.w.cols()
    }

    pub fn output_size(&self) -> usize {
        self.w.rows()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = self.w.matvec(x)?;
        for (v, b) in y.iter_mut().zip(self.b.data()) {
            *v += b;
            if self.activation == Activation::Tanh {
                *v = v.tanh();
            }
        }
        Ok(y)
    }

    /// `y` is the forward output. Returns the input gradient.
    pub fn backward(&self, x: &[f64], y: &[f64], d_y: &[f64], grad: &mut Dense) -> Vec<f64> {
        let dz: Vec<f64> = match self.activation {
            Activation::Tanh => d_y.iter().zip(y).map(|(d, v)| d * (1.0 - v * v)).collect(),
            Activation::None => d_y.to_vec(),
        };
        grad.w.outer_acc(&dz, x);
        for (g, d) in grad.b.data_mut().iter_mut().zip(&dz) {
            *g += d;
        }
        let mut dx = vec![0.0; x.len()];
        self.w.matvec_t_acc(&dz, &mut dx);
        dx
    }
}

impl Params for Dense {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        f("w".into(), &self.w);
        f("b".into(), &self.b);
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        f("w".into(), &mut self.w);
        f("b".into(), &mut self.b);
    }
}

/// `tanh(W1 · a1 + W2 · a2 + b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub w1: Tensor,
    pub w2: Tensor,
    pub b: Tensor,
}

impl Interaction {
    pub fn new(input: usize, output: usize, rng: &mut impl Rng) -> Interaction {
        let bound = 1.0 / ((2 * input).max(1) as f64).sqrt();
        Interaction {
            w1: Tensor::uniform(&[output, input], bound, rng),
            w2: Tensor::uniform(&[output, input], bound, rng),
            b: Tensor::zeros(&[output]),
        }
    }

    pub fn forward(&self, a1: &[f64], a2: &[f64]) -> Result<Vec<f64>> {
        interaction(a1, a2, &self.w1, &self.w2, &self.b)
    }

    pub fn backward(&self, a1: &[f64], a2: &[f64], h: &[f64], d_h: &[f64], grad: &mut Interaction) -> (Vec<f64>, Vec<f64>) {
        let dz: Vec<f64> = d_h.iter().zip(h).map(|(d, v)| d * (1.0 - v * v)).collect();
        grad.w1.outer_acc(&dz, a1);
        grad.w2.outer_acc(&dz, a2);
        for (g, d) in grad.b.data_mut().iter_mut().zip(&dz) {
            *g += d;
        }
        let mut d1 = vec![0.0; a1.len()];
        let mut d2 = vec![0.0; a2.len()];
        self.w1.matvec_t_acc(&dz, &mut d1);
        self.w2.matvec_t_acc(&dz, &mut d2);
        (d1, d2)
    }
}

impl Params for Interaction {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        f("w1".into(), &self.w1);
        f("w2".into(), &self.w2);
        f("b".into(), &self.b);
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        f("w1".into(), &mut self.w1);
        f("w2".into(), &mut self.w2);
        f("b".into(), &mut self.b);
    }
}

pub fn interaction(a1: &[f64], a2: &[f64], w1: &Tensor, w2: &Tensor, b: &Tensor) -> Result<Vec<f64>> {
    if w1.shape() != w2.shape() || w1.rows() != b.len() {
        return Err(Error::shape(format!(
            "interaction weights {:?}, {:?}, bias {:?}",
            w1.shape(),
            w2.shape(),
            b.shape()
        )));
    }
    let z1 = w1.matvec(a1)?;
    let z2 = w2.matvec(a2)?;
    Ok(z1
        .iter()
        .zip(&z2)
        .zip(b.data())
        .map(|((x, y), c)| (x + y + c).tanh())
        .collect())
}

/// Batch normalization over the batch axis with running statistics for
/// evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchNorm {
    pub gamma: Tensor,
    pub beta: Tensor,
    pub running_mean: Vec<f64>,
    pub running_var: Vec<f64>,
    pub momentum: f64,
    pub eps: f64,
}

#[derive(Debug, Clone)]
pub struct BatchNormCache {
    xhat: Vec<Vec<f64>>,
    inv_std: Vec<f64>,
    train: bool,
}

impl BatchNorm {
    pub fn new(size: usize) -> BatchNorm {
        let mut gamma = Tensor::zeros(&[size]);
        gamma.fill(1.0);
        BatchNorm {
            gamma,
            beta: Tensor::zeros(&[size]),
            running_mean: vec![0.0; size],
            running_var: vec![1.0; size],
            momentum: 0.1,
            eps: 1e-5,
        }
    }

    pub fn size(&self) -> usize {
        self.beta.len()
    }

    /// In training mode normalizes with batch statistics and, when
    /// `update_running` is set, updates the running estimates.
    pub fn forward(&mut self, batch: &[Vec<f64>], train: bool, update_running: bool) -> Result<(Vec<Vec<f64>>, BatchNormCache)> {
        let d = self.size();
        if batch.is_empty() {
            return Err(Error::invalid("batchnorm over an empty batch"));
        }
        if let Some(x) = batch.iter().find(|x| x.len() != d) {
            return Err(Error::shape(format!("batchnorm size {d} got {}", x.len())));
        }
        let n = batch.len() as f64;
        let (mean, var) = if train {
            let mean: Vec<f64> = (0..d).map(|j| batch.iter().map(|x| x[j]).sum::<f64>() / n).collect();
            let var: Vec<f64> = (0..d)
                .map(|j| batch.iter().map(|x| (x[j] - mean[j]).powi(2)).sum::<f64>() / n)
                .collect();
            if update_running {
                let unbias = if batch.len() > 1 { n / (n - 1.0) } else { 1.0 };
                for j in 0..d {
                    self.running_mean[j] = (1.0 - self.momentum) * self.running_mean[j] + self.momentum * mean[j];
                    self.running_var[j] = (1.0 - self.momentum) * self.running_var[j] + self.momentum * var[j] * unbias;
                }
            }
            (mean, var)
        } else {
            (self.running_mean.clone(), self.running_var.clone())
        };
        let inv_std: Vec<f64> = var.iter().map(|v| 1.0 / (v + self.eps).sqrt()).collect();
        let xhat: Vec<Vec<f64>> = batch
            .iter()
            .map(|x| (0..d).map(|j| (x[j] - mean[j]) * inv_std[j]).collect())
            .collect();
        let out = xhat
            .iter()
            .map(|xh| {
                (0..d)
                    .map(|j| self.gamma.data()[j] * xh[j] + self.beta.data()[j])
                    .collect()
            })
            .collect();
        Ok((out, BatchNormCache { xhat, inv_std, train }))
    }

    pub fn backward(&self, cache: &BatchNormCache, d_out: &[Vec<f64>], grad: &mut BatchNorm) -> Vec<Vec<f64>> {
        let d = self.size();
        let n = d_out.len() as f64;
        let gamma = self.gamma.data();
        let mut out = vec![vec![0.0; d]; d_out.len()];
        for j in 0..d {
            let mut sum_dy = 0.0;
            let mut sum_dy_xhat = 0.0;
            for (dy, xh) in d_out.iter().zip(&cache.xhat) {
                sum_dy += dy[j];
                sum_dy_xhat += dy[j] * xh[j];
            }
            grad.beta.data_mut()[j] += sum_dy;
            grad.gamma.data_mut()[j] += sum_dy_xhat;
            for (i, (dy, xh)) in d_out.iter().zip(&cache.xhat).enumerate() {
                out[i][j] = if cache.train {
                    gamma[j] * cache.inv_std[j] / n * (n * dy[j] - sum_dy - xh[j] * sum_dy_xhat)
                } else {
                    gamma[j] * cache.inv_std[j] * dy[j]
                };
            }
        }
        out
    }
}

impl Params for BatchNorm {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        f("gamma".into(), &self.gamma);
        f("beta".into(), &self.beta);
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        f("gamma".into(), &mut self.gamma);
        f("beta".into(), &mut self.beta);
    }
}

/// Inverted dropout mask: zero with probability `ratio`, otherwise
/// `1 / (1 - ratio)`. All ones outside training.
pub fn dropout_mask(len: usize, ratio: f64, train: bool, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&ratio) {
        return Err(Error::invalid(format!("dropout ratio {ratio} outside [0, 1)")));
    }
    if !train || ratio == 0.0 {
        return Ok(vec![1.0; len]);
    }
    let keep = 1.0 / (1.0 - ratio);
    Ok((0..len).map(|_| if rng.gen::<f64>() < ratio { 0.0 } else { keep }).collect())
}

/// Apply dropout to every vector of a sequence.
pub fn dropout(seq: &[Vec<f64>], ratio: f64, rng: &mut impl Rng, train: bool) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mut out = Vec::with_capacity(seq.len());
    let mut masks = Vec::with_capacity(seq.len());
    for x in seq {
        let m = dropout_mask(x.len(), ratio, train, rng)?;
        out.push(x.iter().zip(&m).map(|(a, b)| a * b).collect());
        masks.push(m);
    }
    Ok((out, masks))
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Probabilities, loss `-ln p[gold]` and the logit gradient `p - onehot`.
pub fn softmax_xent(logits: &[f64], gold: usize) -> Result<(Vec<f64>, f64, Vec<f64>)> {
    if logits.is_empty() {
        return Err(Error::invalid("softmax over no logits"));
    }
    if gold >= logits.len() {
        return Err(Error::invalid(format!("gold index {gold} out of range for {} logits", logits.len())));
    }
    let p = softmax(logits);
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logits.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
    let loss = lse - logits[gold];
    let mut d = p.clone();
    d[gold] -= 1.0;
    Ok((p, loss, d))
}

/// Sigmoid binary cross-entropy on one logit: probability, loss, dloss/dlogit.
pub fn sigmoid_bce(logit: f64, label: bool) -> (f64, f64, f64) {
    let p = sigmoid(logit);
    let y = if label { 1.0 } else { 0.0 };
    // log(1 + e^-|x|) + max(x, 0) - x*y
    let loss = (1.0 + (-logit.abs()).exp()).ln() + logit.max(0.0) - logit * y;
    (p, loss, p - y)
}

/// Index of the largest value; lowest index on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
