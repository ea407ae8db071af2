use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tensor::{sigmoid, Params, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// LSTM cell parameters. Gate rows are stacked as input, forget, cell, output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lstm {
    pub input_size: usize,
    pub hidden_size: usize,
    pub direction: Direction,
    /// `[4h, input]`
    pub w: Tensor,
    /// `[4h, h]`
    pub u: Tensor,
    /// `[4h]`
    pub b: Tensor,
}

/// Per-step activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct LstmCache {
    xs: Vec<Vec<f64>>,
    hs: Vec<Vec<f64>>,
    cs: Vec<Vec<f64>>,
    // [i, f, g, o] after nonlinearity
    gates: Vec<Vec<f64>>,
}

impl Lstm {
    pub fn new(input_size: usize, hidden_size: usize, direction: Direction, rng: &mut impl Rng) -> Lstm {
        let bound = 1.0 / (hidden_size as f64).sqrt();
        let mut b = Tensor::zeros(&[4 * hidden_size]);
        b.data_mut()[hidden_size..2 * hidden_size].fill(1.0);
        Lstm {
            input_size,
            hidden_size,
            direction,
            w: Tensor::uniform(&[4 * hidden_size, input_size], bound, rng),
            u: Tensor::uniform(&[4 * hidden_size, hidden_size], bound, rng),
            b,
        }
    }

    pub fn zeroed(input_size: usize, hidden_size: usize, direction: Direction) -> Lstm {
        Lstm {
            input_size,
            hidden_size,
            direction,
            w: Tensor::zeros(&[4 * hidden_size, input_size]),
            u: Tensor::zeros(&[4 * hidden_size, hidden_size]),
            b: Tensor::zeros(&[4 * hidden_size]),
        }
    }

    /// Hidden states in input order. A backward LSTM reads the reversed
    /// sequence and its states are re-reversed.
    pub fn forward(&self, seq: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, LstmCache)> {
        if let Some(x) = seq.iter().find(|x| x.len() != self.input_size) {
            return Err(Error::shape(format!(
                "LSTM input size {} got vector of {}",
                self.input_size,
                x.len()
            )));
        }
        let h = self.hidden_size;
        let xs: Vec<Vec<f64>> = match self.direction {
            Direction::Forward => seq.to_vec(),
            Direction::Backward => seq.iter().rev().cloned().collect(),
        };
        let mut cache = LstmCache {
            hs: Vec::with_capacity(xs.len()),
            cs: Vec::with_capacity(xs.len()),
            gates: Vec::with_capacity(xs.len()),
            xs: Vec::new(),
        };
        let mut h_prev = vec![0.0; h];
        let mut c_prev = vec![0.0; h];
        for x in &xs {
            let mut z = self.b.data().to_vec();
            self.w.matvec_acc(x, &mut z);
            self.u.matvec_acc(&h_prev, &mut z);
            for k in 0..h {
                z[k] = sigmoid(z[k]);
                z[h + k] = sigmoid(z[h + k]);
                z[2 * h + k] = z[2 * h + k].tanh();
                z[3 * h + k] = sigmoid(z[3 * h + k]);
            }
            let c: Vec<f64> = (0..h).map(|k| z[h + k] * c_prev[k] + z[k] * z[2 * h + k]).collect();
            let hh: Vec<f64> = (0..h).map(|k| z[3 * h + k] * c[k].tanh()).collect();
            cache.gates.push(z);
            cache.cs.push(c.clone());
            cache.hs.push(hh.clone());
            h_prev = hh;
            c_prev = c;
        }
        cache.xs = xs;
        let mut out = cache.hs.clone();
        if self.direction == Direction::Backward {
            out.reverse();
        }
        Ok((out, cache))
    }

    /// Backpropagate `d_out` (gradients w.r.t. the returned states, in input
    /// order). Accumulates parameter gradients into `grad` and returns the
    /// gradients w.r.t. the input sequence.
    pub fn backward(&self, cache: &LstmCache, d_out: &[Vec<f64>], grad: &mut Lstm) -> Vec<Vec<f64>> {
        let h = self.hidden_size;
        let n = cache.xs.len();
        let dh_seq: Vec<&Vec<f64>> = match self.direction {
            Direction::Forward => d_out.iter().collect(),
            Direction::Backward => d_out.iter().rev().collect(),
        };
        let zero = vec![0.0; h];
        let mut dxs = vec![vec![0.0; self.input_size]; n];
        let mut dh_next = vec![0.0; h];
        let mut dc_next = vec![0.0; h];
        for t in (0..n).rev() {
            let g = &cache.gates[t];
            let c = &cache.cs[t];
            let c_prev = if t > 0 { &cache.cs[t - 1] } else { &zero };
            let h_prev = if t > 0 { &cache.hs[t - 1] } else { &zero };
            let mut dz = vec![0.0; 4 * h];
            for k in 0..h {
                let dh = dh_seq[t][k] + dh_next[k];
                let (i, f, gg, o) = (g[k], g[h + k], g[2 * h + k], g[3 * h + k]);
                let tc = c[k].tanh();
                let dc = dc_next[k] + dh * o * (1.0 - tc * tc);
                dz[k] = dc * gg * i * (1.0 - i);
                dz[h + k] = dc * c_prev[k] * f * (1.0 - f);
                dz[2 * h + k] = dc * i * (1.0 - gg * gg);
                dz[3 * h + k] = dh * tc * o * (1.0 - o);
                dc_next[k] = dc * f;
            }
            grad.w.outer_acc(&dz, &cache.xs[t]);
            grad.u.outer_acc(&dz, h_prev);
            for (gb, d) in grad.b.data_mut().iter_mut().zip(&dz) {
                *gb += d;
            }
            self.w.matvec_t_acc(&dz, &mut dxs[t]);
            dh_next.fill(0.0);
            self.u.matvec_t_acc(&dz, &mut dh_next);
        }
        if self.direction == Direction::Backward {
            dxs.reverse();
        }
        dxs
    }
}

impl Params for Lstm {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        f("w".into(), &self.w);
        f("u".into(), &self.u);
        f("b".into(), &self.b);
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        f("w".into(), &mut self.w);
        f("u".into(), &mut self.u);
        f("b".into(), &mut self.b);
    }
}

/// Per-position concatenation `[forward ; backward]`.
pub fn bidirectional_forward(
    seq: &[Vec<f64>],
    fwd: &Lstm,
    bwd: &Lstm,
) -> Result<(Vec<Vec<f64>>, (LstmCache, LstmCache))> {
    let (a, ca) = fwd.forward(seq)?;
    let (b, cb) = bwd.forward(seq)?;
    let out = a
        .into_iter()
        .zip(b)
        .map(|(mut x, y)| {
            x.extend(y);
            x
        })
        .collect();
    Ok((out, (ca, cb)))
}

pub fn bidirectional_backward(
    fwd: &Lstm,
    bwd: &Lstm,
    cache: &(LstmCache, LstmCache),
    d_out: &[Vec<f64>],
    gf: &mut Lstm,
    gb: &mut Lstm,
) -> Vec<Vec<f64>> {
    let h = fwd.hidden_size;
    let da: Vec<Vec<f64>> = d_out.iter().map(|d| d[..h].to_vec()).collect();
    let db: Vec<Vec<f64>> = d_out.iter().map(|d| d[h..].to_vec()).collect();
    let mut dx = fwd.backward(&cache.0, &da, gf);
    for (x, y) in dx.iter_mut().zip(bwd.backward(&cache.1, &db, gb)) {
        for (a, b) in x.iter_mut().zip(y) {
            *a += b;
        }
    }
    dx
}
