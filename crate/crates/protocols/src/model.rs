//! Model definitions, centralized cleartext training steps (the reference
//! the federated runs are compared with), batching and metrics.

use hesimd_core::Matrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::common::matvec;
use crate::dataset::{sigmoid, Dataset};

/// Cubic sigmoid approximation `q0 + q1·z + q2·z³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidPoly {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
}

impl Default for SigmoidPoly {
    fn default() -> Self {
        Self { q0: 0.5, q1: 0.197, q2: -0.004 }
    }
}

impl SigmoidPoly {
    pub fn eval(&self, z: f64) -> f64 {
        self.q0 + self.q1 * z + self.q2 * z * z * z
    }
}

/// Weights of a vertically split linear model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub wa: Vec<f64>,
    pub wb: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(na: usize, nb: usize) -> Self {
        Self { wa: vec![0.0; na], wb: vec![0.0; nb] }
    }

    pub fn logits(&self, xa: &Matrix<f64>, xb: &Matrix<f64>) -> Vec<f64> {
        matvec(xa, &self.wa).iter().zip(matvec(xb, &self.wb)).map(|(a, b)| a + b).collect()
    }
}

/// `Xᵀ·v / m`.
pub fn scaled_transpose_product(x: &Matrix<f64>, v: &[f64]) -> Vec<f64> {
    let m = x.rows() as f64;
    (0..x.cols()).map(|j| (0..x.rows()).map(|i| x.get(i, j) * v[i]).sum::<f64>() / m).collect()
}

pub(crate) fn step(w: &mut [f64], g: &[f64], lr: f64) {
    for (w, g) in w.iter_mut().zip(g) {
        *w -= lr * g;
    }
}

/// Least-squares gradient step: `θ -= lr · Xᵀ(Xθ − y)/m`.
pub fn linr_step(model: &mut LinearModel, xa: &Matrix<f64>, xb: &Matrix<f64>, y: &[f64], lr: f64) {
    let d: Vec<f64> = model.logits(xa, xb).iter().zip(y).map(|(u, y)| u - y).collect();
    let (ga, gb) = (scaled_transpose_product(xa, &d), scaled_transpose_product(xb, &d));
    step(&mut model.wa, &ga, lr);
    step(&mut model.wb, &gb, lr);
}

/// Logistic step with the cubic sigmoid: `θ -= lr · Xᵀ(σ̃(Xθ) − y)/m`.
pub fn logistic_step(model: &mut LinearModel, xa: &Matrix<f64>, xb: &Matrix<f64>, y: &[f64], lr: f64, s: SigmoidPoly) {
    let e: Vec<f64> = model.logits(xa, xb).iter().zip(y).map(|(&z, y)| s.eval(z) - y).collect();
    let (ga, gb) = (scaled_transpose_product(xa, &e), scaled_transpose_product(xb, &e));
    step(&mut model.wa, &ga, lr);
    step(&mut model.wb, &gb, lr);
}

/// Split network: linear bottom models, an interactive layer, tanh, linear top.
///
/// `α_A = X_A·V_A`, `α_B = X_B·V_B`, `z = α_A·W_A + α_B·W_B`, `ŷ = tanh(z)·w_top`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnModel {
    pub va: Matrix<f64>,
    pub vb: Matrix<f64>,
    pub wa: Matrix<f64>,
    pub wb: Matrix<f64>,
    pub top: Vec<f64>,
}

/// Forward activations of one batch.
pub struct NnForward {
    pub alpha_a: Matrix<f64>,
    pub alpha_b: Matrix<f64>,
    pub act: Matrix<f64>,
    pub out: Vec<f64>,
}

/// Gradients of one batch; `delta` is `∂L/∂z` (already divided by the batch size).
pub struct NnGrads {
    pub delta: Matrix<f64>,
    pub top: Vec<f64>,
    pub wa: Matrix<f64>,
    pub wb: Matrix<f64>,
    pub va: Matrix<f64>,
    pub vb: Matrix<f64>,
}

pub(crate) fn mat_sub_scaled(w: &mut Matrix<f64>, g: &Matrix<f64>, lr: f64) {
    for i in 0..w.rows() {
        for j in 0..w.cols() {
            w.set(i, j, w.get(i, j) - lr * g.get(i, j));
        }
    }
}

impl NnModel {
    pub fn init(na: usize, nb: usize, embed: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut mat = |r: usize, c: usize| {
            let d = Normal::new(0.0, (1.0 / r as f64).sqrt()).expect("positive std");
            Matrix::from_fn(r, c, |_, _| d.sample(&mut rng))
        };
        let (va, vb, wa, wb) = (mat(na, embed), mat(nb, embed), mat(embed, hidden), mat(embed, hidden));
        let top = mat(hidden, 1).column(0);
        Self { va, vb, wa, wb, top }
    }

    pub fn forward(&self, xa: &Matrix<f64>, xb: &Matrix<f64>) -> NnForward {
        let alpha_a = xa.matmul(&self.va).expect("shapes");
        let alpha_b = xb.matmul(&self.vb).expect("shapes");
        let za = alpha_a.matmul(&self.wa).expect("shapes");
        let zb = alpha_b.matmul(&self.wb).expect("shapes");
        let act = Matrix::from_fn(za.rows(), za.cols(), |i, j| (za.get(i, j) + zb.get(i, j)).tanh());
        let out = matvec(&act, &self.top);
        NnForward { alpha_a, alpha_b, act, out }
    }

    pub fn top_backward(&self, act: &Matrix<f64>, out: &[f64], y: &[f64]) -> (Matrix<f64>, Vec<f64>) {
        top_backward(&self.top, act, out, y)
    }

    pub fn backward(&self, xa: &Matrix<f64>, xb: &Matrix<f64>, f: &NnForward, y: &[f64]) -> NnGrads {
        let (delta, top) = self.top_backward(&f.act, &f.out, y);
        let wa = f.alpha_a.transpose().matmul(&delta).expect("shapes");
        let wb = f.alpha_b.transpose().matmul(&delta).expect("shapes");
        let da = delta.matmul(&self.wa.transpose()).expect("shapes");
        let db = delta.matmul(&self.wb.transpose()).expect("shapes");
        let va = xa.transpose().matmul(&da).expect("shapes");
        let vb = xb.transpose().matmul(&db).expect("shapes");
        NnGrads { delta, top, wa, wb, va, vb }
    }

    pub fn apply(&mut self, g: &NnGrads, lr: f64) {
        step(&mut self.top, &g.top, lr);
        mat_sub_scaled(&mut self.wa, &g.wa, lr);
        mat_sub_scaled(&mut self.wb, &g.wb, lr);
        mat_sub_scaled(&mut self.va, &g.va, lr);
        mat_sub_scaled(&mut self.vb, &g.vb, lr);
    }

    pub fn predict(&self, xa: &Matrix<f64>, xb: &Matrix<f64>) -> Vec<f64> {
        self.forward(xa, xb).out
    }
}

/// Top-model part of the backward pass: `(∂L/∂z, ∂L/∂w_top)` for MSE loss
/// given the interactive activations.
pub fn top_backward(top: &[f64], act: &Matrix<f64>, out: &[f64], y: &[f64]) -> (Matrix<f64>, Vec<f64>) {
    let m = y.len() as f64;
    let r: Vec<f64> = out.iter().zip(y).map(|(o, y)| o - y).collect();
    let grad_top = scaled_transpose_product(act, &r);
    let delta = Matrix::from_fn(act.rows(), act.cols(), |i, j| {
        r[i] * top[j] * (1.0 - act.get(i, j) * act.get(i, j)) / m
    });
    (delta, grad_top)
}

/// Row indices of every batch of one epoch, shuffled by `(seed, epoch)`.
pub fn batches(rows: usize, batch_size: usize, seed: u64, epoch: usize) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..rows).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ (epoch as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    idx.shuffle(&mut rng);
    idx.chunks(batch_size.max(1)).map(<[usize]>::to_vec).collect()
}

/// `mean((p − y)²) / 2`.
pub fn mse_loss(pred: &[f64], y: &[f64]) -> f64 {
    pred.iter().zip(y).map(|(p, y)| (p - y) * (p - y)).sum::<f64>() / (2.0 * y.len() as f64)
}

/// Mean binary cross-entropy of `sigmoid(logit)`.
pub fn logistic_loss(logits: &[f64], y: &[f64]) -> f64 {
    let eps = 1e-12;
    logits
        .iter()
        .zip(y)
        .map(|(&z, &y)| {
            let p = sigmoid(z).clamp(eps, 1.0 - eps);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum::<f64>()
        / y.len() as f64
}

/// Area under the ROC curve (ties count one half).
pub fn auc(scores: &[f64], y: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    let pos = y.iter().filter(|&&v| v > 0.5).count() as f64;
    let neg = y.len() as f64 - pos;
    if pos == 0.0 || neg == 0.0 {
        return 0.5;
    }
    let rank_sum: f64 = ranks.iter().zip(y).filter(|(_, &v)| v > 0.5).map(|(r, _)| r).sum();
    (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg)
}

/// Loss of a linear model over the whole dataset.
pub fn linear_loss(model: &LinearModel, data: &Dataset, logistic: bool) -> f64 {
    let z = model.logits(&data.xa, &data.xb);
    if logistic {
        logistic_loss(&z, &data.y)
    } else {
        mse_loss(&z, &data.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_cases() {
        assert_eq!(auc(&[0.1, 0.9], &[0.0, 1.0]), 1.0);
        assert_eq!(auc(&[0.9, 0.1], &[0.0, 1.0]), 0.0);
        assert_eq!(auc(&[0.5, 0.5], &[0.0, 1.0]), 0.5);
    }

    #[test]
    fn nn_gradient_matches_finite_difference() {
        let xa = Matrix::from_fn(3, 2, |i, j| (i as f64 - j as f64) * 0.3);
        let xb = Matrix::from_fn(3, 2, |i, j| (i * j) as f64 * 0.2 - 0.1);
        let y = vec![0.5, -0.2, 0.1];
        let model = NnModel::init(2, 2, 2, 2, 3);
        let loss = |m: &NnModel| mse_loss(&m.predict(&xa, &xb), &y);
        let f = model.forward(&xa, &xb);
        let g = model.backward(&xa, &xb, &f, &y);
        let h = 1e-6;
        let mut p = model.clone();
        p.va.set(1, 0, p.va.get(1, 0) + h);
        assert!(((loss(&p) - loss(&model)) / h - g.va.get(1, 0)).abs() < 1e-5);
        let mut p = model.clone();
        p.wb.set(0, 1, p.wb.get(0, 1) + h);
        assert!(((loss(&p) - loss(&model)) / h - g.wb.get(0, 1)).abs() < 1e-5);
        let mut p = model.clone();
        p.top[1] += h;
        assert!(((loss(&p) - loss(&model)) / h - g.top[1]).abs() < 1e-5);
    }
}
