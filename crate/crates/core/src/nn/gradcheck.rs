use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::embedding::EmbeddingTable;
use super::layers::{maxpool_backward, maxpool_time, sigmoid_bce, softmax_xent, Activation, BatchNorm, Dense, Interaction};
use super::lstm::{bidirectional_backward, bidirectional_forward, Direction, Lstm};
use super::tensor::{dot, Params, Tensor};
use crate::error::{Error, Result};

/// `|a - n| / max(|a|, |n|)`, or the absolute difference when both are
/// below `1e-7`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs());
    let diff = (analytic - numeric).abs();
    if denom < 1e-7 {
        diff
    } else {
        diff / denom
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GradCheck {
    pub max_rel_error: f64,
    /// Parameter name and flat index of the worst element.
    pub worst: (String, usize),
    pub checked: usize,
}

/// Compare `analytic` against central differences of `loss` around `params`
/// for every trainable element.
pub fn grad_check<P, F>(params: &P, analytic: &P, eps: f64, mut loss: F) -> Result<GradCheck>
where
    P: Params + Clone,
    F: FnMut(&P) -> Result<f64>,
{
    if eps <= 0.0 {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let names: Vec<String> = params.tensors().into_iter().map(|(n, _)| n).collect();
    let grads: Vec<Vec<f64>> = analytic.tensors().into_iter().map(|(_, t)| t.data().to_vec()).collect();
    if grads.len() != names.len() {
        return Err(Error::shape("gradient set does not match parameters".to_string()));
    }
    let mut probe = params.clone();
    let mut out = GradCheck {
        max_rel_error: 0.0,
        worst: (String::new(), 0),
        checked: 0,
    };
    for (k, name) in names.iter().enumerate() {
        let n = grads[k].len();
        for i in 0..n {
            let orig = probe.tensors_mut()[k].data()[i];
            probe.tensors_mut()[k].data_mut()[i] = orig + eps;
            let up = loss(&probe)?;
            probe.tensors_mut()[k].data_mut()[i] = orig - eps;
            let down = loss(&probe)?;
            probe.tensors_mut()[k].data_mut()[i] = orig;
            let numeric = (up - down) / (2.0 * eps);
            let e = relative_error(grads[k][i], numeric);
            if e > out.max_rel_error || out.checked == 0 {
                out.max_rel_error = e;
                out.worst = (name.clone(), i);
            }
            out.checked += 1;
        }
    }
    Ok(out)
}

impl Params for Tensor {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        f("value".into(), self)
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        f("value".into(), self)
    }
}

impl<A: Params, B: Params> Params for (A, B) {
    fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
        self.0.visit(&mut |n, t| f(format!("0.{n}"), t));
        self.1.visit(&mut |n, t| f(format!("1.{n}"), t));
    }
    fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
        self.0.visit_mut(&mut |n, t| f(format!("0.{n}"), t));
        self.1.visit_mut(&mut |n, t| f(format!("1.{n}"), t));
    }
}

fn rows(t: &Tensor) -> Vec<Vec<f64>> {
    (0..t.rows()).map(|r| t.row(r).to_vec()).collect()
}

fn random_rows(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Tensor {
    Tensor::uniform(&[n, d], 1.0, rng)
}

fn weighted_sum(ys: &[Vec<f64>], r: &[Vec<f64>]) -> f64 {
    ys.iter().zip(r).map(|(y, w)| dot(y, w)).sum()
}

/// Gradient checks of every layer in isolation. Each fragment is scored
/// with a random linear functional of its output so all paths carry
/// gradient.
pub fn layer_suite(seed: u64, eps: f64) -> Result<Vec<(String, GradCheck)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    // dense + tanh, parameters and input
    {
        let layer = Dense::new(4, 3, Activation::Tanh, &mut rng);
        let x = Tensor::uniform(&[4], 1.0, &mut rng);
        let r: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = (layer, x);
        let y = p.0.forward(p.1.data())?;
        let mut g = p.zeros_like();
        let dx = p.0.backward(p.1.data(), &y, &r, &mut g.0);
        g.1.data_mut().copy_from_slice(&dx);
        let c = grad_check(&p, &g, eps, |q| Ok(dot(&q.0.forward(q.1.data())?, &r)))?;
        out.push(("dense_tanh".to_string(), c));
    }

    // interaction over both pooled arguments
    {
        let layer = Interaction::new(3, 4, &mut rng);
        let a = Tensor::uniform(&[2, 3], 1.0, &mut rng);
        let r: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let p = (layer, a);
        let h = p.0.forward(p.1.row(0), p.1.row(1))?;
        let mut g = p.zeros_like();
        let (d1, d2) = p.0.backward(p.1.row(0), p.1.row(1), &h, &r, &mut g.0);
        g.1.row_mut(0).copy_from_slice(&d1);
        g.1.row_mut(1).copy_from_slice(&d2);
        let c = grad_check(&p, &g, eps, |q| Ok(dot(&q.0.forward(q.1.row(0), q.1.row(1))?, &r)))?;
        out.push(("interaction".to_string(), c));
    }

    for dir in [Direction::Forward, Direction::Backward] {
        let mut lstm = Lstm::new(4, 3, dir, &mut rng);
        // move the biases off their init so every gate matters
        for v in lstm.b.data_mut() {
            *v += rng.gen_range(-0.5..0.5);
        }
        let xs = random_rows(3, 4, &mut rng);
        let r = rows(&random_rows(3, 3, &mut rng));
        let p = (lstm, xs);
        let (_, cache) = p.0.forward(&rows(&p.1))?;
        let mut g = p.zeros_like();
        let dx = p.0.backward(&cache, &r, &mut g.0);
        for (i, d) in dx.iter().enumerate() {
            g.1.row_mut(i).copy_from_slice(d);
        }
        let c = grad_check(&p, &g, eps, |q| Ok(weighted_sum(&q.0.forward(&rows(&q.1))?.0, &r)))?;
        out.push((format!("lstm_{dir:?}").to_lowercase(), c));
    }

    {
        let f = Lstm::new(3, 2, Direction::Forward, &mut rng);
        let b = Lstm::new(3, 2, Direction::Backward, &mut rng);
        let xs = random_rows(4, 3, &mut rng);
        let r = rows(&random_rows(4, 4, &mut rng));
        let p = ((f, b), xs);
        let (_, cache) = bidirectional_forward(&rows(&p.1), &p.0 .0, &p.0 .1)?;
        let mut g = p.zeros_like();
        let (gf, gb) = &mut g.0;
        let dx = bidirectional_backward(&p.0 .0, &p.0 .1, &cache, &r, gf, gb);
        for (i, d) in dx.iter().enumerate() {
            g.1.row_mut(i).copy_from_slice(d);
        }
        let c = grad_check(&p, &g, eps, |q| {
            Ok(weighted_sum(&bidirectional_forward(&rows(&q.1), &q.0 .0, &q.0 .1)?.0, &r))
        })?;
        out.push(("bilstm".to_string(), c));
    }

    {
        // distinct values keep the max strict
        let hs = random_rows(5, 4, &mut rng);
        let r: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, idx) = maxpool_time(&rows(&hs))?;
        let d = maxpool_backward(&r, &idx, 5);
        let mut g = hs.clone();
        for (i, row) in d.iter().enumerate() {
            g.row_mut(i).copy_from_slice(row);
        }
        let c = grad_check(&hs, &g, eps, |q| Ok(dot(&maxpool_time(&rows(q))?.0, &r)))?;
        out.push(("maxpool".to_string(), c));
    }

    for train in [true, false] {
        let mut bn = BatchNorm::new(3);
        for v in bn.gamma.data_mut().iter_mut().chain(bn.beta.data_mut()) {
            *v += rng.gen_range(-0.5..0.5);
        }
        bn.running_mean = vec![0.1, -0.2, 0.3];
        bn.running_var = vec![0.5, 1.5, 2.0];
        let x = random_rows(4, 3, &mut rng);
        let r = rows(&random_rows(4, 3, &mut rng));
        let mut p = (bn, x);
        let (_, cache) = p.0.forward(&rows(&p.1), train, false)?;
        let mut g = p.zeros_like();
        let dx = p.0.backward(&cache, &r, &mut g.0);
        for (i, d) in dx.iter().enumerate() {
            g.1.row_mut(i).copy_from_slice(d);
        }
        let c = grad_check(&p.clone(), &g, eps, |q| {
            let mut bn = q.0.clone();
            Ok(weighted_sum(&bn.forward(&rows(&q.1), train, false)?.0, &r))
        })?;
        out.push((format!("batchnorm_{}", if train { "train" } else { "eval" }), c));
    }

    {
        let logits = Tensor::uniform(&[5], 2.0, &mut rng);
        let (_, _, d) = softmax_xent(logits.data(), 2)?;
        let g = Tensor::from_vec(vec![5], d)?;
        let c = grad_check(&logits, &g, eps, |q| Ok(softmax_xent(q.data(), 2)?.1))?;
        out.push(("softmax_xent".to_string(), c));
    }

    {
        let logit = Tensor::uniform(&[1], 2.0, &mut rng);
        let (_, _, d) = sigmoid_bce(logit.data()[0], true);
        let g = Tensor::from_vec(vec![1], vec![d])?;
        let c = grad_check(&logit, &g, eps, |q| Ok(sigmoid_bce(q.data()[0], true).1))?;
        out.push(("sigmoid_bce".to_string(), c));
    }

    {
        let vocab: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let table = EmbeddingTable::random(&vocab, 3, true, &mut rng)?;
        let toks: Vec<String> = ["a", "c", "a", "zz"].iter().map(|s| s.to_string()).collect();
        let r = rows(&random_rows(4, 3, &mut rng));
        let mut g = table.zeros_like();
        table.backward(&table.ids(&toks), &r, &mut g);
        let c = grad_check(&table, &g, eps, |q| Ok(weighted_sum(&q.embed(&toks)?, &r)))?;
        out.push(("embedding".to_string(), c));
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_layer_passes() {
        for (name, c) in layer_suite(7, 1e-5).unwrap() {
            assert!(c.max_rel_error < 1e-6, "{name}: {c:?}");
        }
    }

    #[test]
    fn detects_a_wrong_gradient() {
        let x = Tensor::from_vec(vec![2], vec![1.0, 2.0]).unwrap();
        let wrong = Tensor::from_vec(vec![2], vec![1.0, 1.0]).unwrap();
        let c = grad_check(&x, &wrong, 1e-5, |q| Ok(q.data().iter().map(|v| v * v / 2.0).sum())).unwrap();
        assert!(c.max_rel_error > 0.4);
        assert_eq!(c.worst.1, 1);
    }
}
