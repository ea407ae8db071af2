use serde::{Deserialize, Serialize};

use super::tensor::{Params, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<Tensor>,
    v: Vec<Tensor>,
}

impl AdamState {
    pub fn new(lr: f64) -> AdamState {
        AdamState {
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: Vec::new(),
            v: Vec::new(),
        }
    }
}

/// One bias-corrected Adam update of `params` with `grads`.
pub fn adam_step<P: Params>(params: &mut P, grads: &P, state: &mut AdamState) -> Result<()> {
    let gs = grads.tensors();
    let ps = params.tensors_mut();
    if ps.len() != gs.len() {
        return Err(Error::shape("parameter and gradient sets differ".to_string()));
    }
    if state.m.is_empty() {
        state.m = gs.iter().map(|(_, g)| Tensor::zeros(g.shape())).collect();
        state.v = state.m.clone();
    }
    for ((p, (name, g)), m) in ps.iter().zip(&gs).zip(&state.m) {
        if p.shape() != g.shape() || m.shape() != g.shape() {
            return Err(Error::shape(format!("{name}: {:?} vs {:?}", p.shape(), g.shape())));
        }
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - state.beta1.powi(t);
    let c2 = 1.0 - state.beta2.powi(t);
    for (((p, (_, g)), m), v) in ps.into_iter().zip(gs).zip(&mut state.m).zip(&mut state.v) {
        let (pd, gd) = (p.data_mut(), g.data());
        for (((x, &gi), mi), vi) in pd.iter_mut().zip(gd).zip(m.data_mut()).zip(v.data_mut()) {
            *mi = state.beta1 * *mi + (1.0 - state.beta1) * gi;
            *vi = state.beta2 * *vi + (1.0 - state.beta2) * gi * gi;
            *x -= state.lr * (*mi / c1) / ((*vi / c2).sqrt() + state.eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Clone)]
    struct Scalar(Tensor);
    impl Params for Scalar {
        fn visit<'a>(&'a self, f: &mut dyn FnMut(String, &'a Tensor)) {
            f("x".into(), &self.0)
        }
        fn visit_mut<'a>(&'a mut self, f: &mut dyn FnMut(String, &'a mut Tensor)) {
            f("x".into(), &mut self.0)
        }
    }

    fn scalar(v: f64) -> Scalar {
        Scalar(Tensor::from_vec(vec![1], vec![v]).unwrap())
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut p = scalar(1.0);
        let mut s = AdamState::new(0.001);
        adam_step(&mut p, &scalar(1.0), &mut s).unwrap();
        assert!((p.0.data()[0] - 0.999).abs() < 1e-8);
    }

    #[test]
    fn zero_gradient_is_noop() {
        let mut p = scalar(0.3);
        let mut s = AdamState::new(0.001);
        for _ in 0..5 {
            adam_step(&mut p, &scalar(0.0), &mut s).unwrap();
        }
        assert_eq!(p.0.data()[0], 0.3);
    }
}
