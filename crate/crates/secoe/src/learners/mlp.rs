//! One-hidden-layer perceptron with rectified-linear units, softmax output,
//! and cross-entropy loss, trained by adaptive-moment stochastic gradient
//! descent. Training is sequential and seeded, so loss trajectories are
//! bit-reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpHyper {
    pub hidden: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Early stop: epoch loss must improve on the best seen by at least this
    /// much, otherwise the patience counter ticks.
    pub min_improvement: f64,
    pub patience: usize,
}

impl Default for MlpHyper {
    fn default() -> Self {
        MlpHyper {
            hidden: 100,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 200,
            max_epochs: 200,
            min_improvement: 1e-4,
            patience: 10,
        }
    }
}

impl MlpHyper {
    pub(crate) fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if self.hidden == 0 {
            return Err(Error::InvalidArgument("mlp hidden width must be > 0".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument("mlp learning rate must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::InvalidArgument("mlp moment decays must lie in [0, 1)".into()));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(Error::InvalidArgument(
                "mlp batch size and epoch cap must be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MlpModel {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub n_classes: usize,
    /// hidden x input, row-major
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// classes x hidden, row-major
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl MlpModel {
    fn init(hyper: &MlpHyper, seed: u64, input_dim: usize, n_classes: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hidden = hyper.hidden;
        // He-style uniform for the rectified layer, Glorot for the output
        let limit1 = (6.0 / input_dim as f64).sqrt();
        let limit2 = (6.0 / (hidden + n_classes) as f64).sqrt();
        let w1 = (0..hidden * input_dim)
            .map(|_| rng.gen_range(-limit1..limit1))
            .collect();
        let w2 = (0..n_classes * hidden)
            .map(|_| rng.gen_range(-limit2..limit2))
            .collect();
        MlpModel {
            input_dim,
            hidden_dim: hidden,
            n_classes,
            w1,
            b1: vec![0.0; hidden],
            w2,
            b2: vec![0.0; n_classes],
        }
    }

    /// Pre-activation hidden values, then raw class scores.
    fn forward(&self, x: &[f64], hidden_pre: &mut [f64], scores: &mut [f64]) {
        debug_assert_eq!(x.len(), self.input_dim);
        for k in 0..self.hidden_dim {
            let row = &self.w1[k * self.input_dim..(k + 1) * self.input_dim];
            let mut acc = self.b1[k];
            for (w, v) in row.iter().zip(x) {
                acc += w * v;
            }
            hidden_pre[k] = acc;
        }
        for c in 0..self.n_classes {
            let row = &self.w2[c * self.hidden_dim..(c + 1) * self.hidden_dim];
            let mut acc = self.b2[c];
            for (w, h) in row.iter().zip(hidden_pre.iter()) {
                acc += w * h.max(0.0);
            }
            scores[c] = acc;
        }
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let mut hidden = vec![0.0; self.hidden_dim];
        let mut scores = vec![0.0; self.n_classes];
        self.forward(x, &mut hidden, &mut scores);
        argmax(&scores)
    }

    /// Class probabilities for one input.
    pub fn predict_proba(&self, x: &[f64]) -> Vec<f64> {
        let mut hidden = vec![0.0; self.hidden_dim];
        let mut scores = vec![0.0; self.n_classes];
        self.forward(x, &mut hidden, &mut scores);
        softmax(&scores)
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// log(sum(exp(scores))), stable.
fn log_sum_exp(scores: &[f64]) -> f64 {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln()
}

#[derive(Clone)]
struct Gradients {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
}

impl Gradients {
    fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            w1: vec![0.0; model.w1.len()],
            b1: vec![0.0; model.b1.len()],
            w2: vec![0.0; model.w2.len()],
            b2: vec![0.0; model.b2.len()],
        }
    }

    fn reset(&mut self) {
        self.w1.fill(0.0);
        self.b1.fill(0.0);
        self.w2.fill(0.0);
        self.b2.fill(0.0);
    }
}

/// Mean cross-entropy over the indexed rows; gradients accumulate into
/// `grads` (caller resets).
fn batch_loss_and_grads(
    model: &MlpModel,
    x: &Matrix,
    y: &[usize],
    indices: &[usize],
    grads: &mut Gradients,
) -> f64 {
    let d = model.input_dim;
    let h = model.hidden_dim;
    let c = model.n_classes;
    let scale = 1.0 / indices.len() as f64;

    let mut hidden_pre = vec![0.0; h];
    let mut scores = vec![0.0; c];
    let mut d_scores = vec![0.0; c];
    let mut d_hidden = vec![0.0; h];
    let mut loss = 0.0;

    for &i in indices {
        let row = x.row(i);
        model.forward(row, &mut hidden_pre, &mut scores);
        loss += (log_sum_exp(&scores) - scores[y[i]]) * scale;

        let probs = softmax(&scores);
        for (cc, p) in probs.iter().enumerate() {
            d_scores[cc] = (p - if cc == y[i] { 1.0 } else { 0.0 }) * scale;
        }

        for k in 0..h {
            d_hidden[k] = 0.0;
        }
        for cc in 0..c {
            let g = d_scores[cc];
            grads.b2[cc] += g;
            let w_row = &model.w2[cc * h..(cc + 1) * h];
            let g_row = &mut grads.w2[cc * h..(cc + 1) * h];
            for k in 0..h {
                let act = hidden_pre[k].max(0.0);
                g_row[k] += g * act;
                d_hidden[k] += g * w_row[k];
            }
        }
        for k in 0..h {
            if hidden_pre[k] <= 0.0 {
                continue; // rectifier gate
            }
            let g = d_hidden[k];
            grads.b1[k] += g;
            let g_row = &mut grads.w1[k * d..(k + 1) * d];
            for (gw, v) in g_row.iter_mut().zip(row) {
                *gw += g * v;
            }
        }
    }
    loss
}

struct Adam {
    m: Gradients,
    v: Gradients,
    t: u64,
}

impl Adam {
    fn new(model: &MlpModel) -> Self {
        Adam {
            m: Gradients::zeros_like(model),
            v: Gradients::zeros_like(model),
            t: 0,
        }
    }

    fn step(&mut self, model: &mut MlpModel, grads: &Gradients, hyper: &MlpHyper) {
        self.t += 1;
        let bc1 = 1.0 - hyper.beta1.powi(self.t as i32);
        let bc2 = 1.0 - hyper.beta2.powi(self.t as i32);
        let update = |theta: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for i in 0..theta.len() {
                m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
                v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                theta[i] -= hyper.learning_rate * m_hat / (v_hat.sqrt() + hyper.epsilon);
            }
        };
        update(&mut model.w1, &grads.w1, &mut self.m.w1, &mut self.v.w1);
        update(&mut model.b1, &grads.b1, &mut self.m.b1, &mut self.v.b1);
        update(&mut model.w2, &grads.w2, &mut self.m.w2, &mut self.v.w2);
        update(&mut model.b2, &grads.b2, &mut self.m.b2, &mut self.v.b2);
    }
}

/// Trains the network; returns the model and the per-epoch loss trajectory.
pub(crate) fn fit_traced(
    hyper: &MlpHyper,
    seed: u64,
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
) -> (MlpModel, Vec<f64>) {
    let n = x.n_rows();
    let mut model = MlpModel::init(hyper, seed, x.n_cols(), n_classes);
    let mut adam = Adam::new(&model);
    let mut grads = Gradients::zeros_like(&model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut order: Vec<usize> = (0..n).collect();

    let mut trajectory = Vec::new();
    let mut best_loss = f64::INFINITY;
    let mut stale_epochs = 0;

    for _ in 0..hyper.max_epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);

        let mut epoch_loss = 0.0;
        for batch in order.chunks(hyper.batch_size) {
            grads.reset();
            let batch_loss = batch_loss_and_grads(&model, x, y, batch, &mut grads);
            epoch_loss += batch_loss * batch.len() as f64;
            adam.step(&mut model, &grads, hyper);
        }
        epoch_loss /= n as f64;
        trajectory.push(epoch_loss);

        if best_loss - epoch_loss < hyper.min_improvement {
            stale_epochs += 1;
        } else {
            stale_epochs = 0;
        }
        best_loss = best_loss.min(epoch_loss);
        if stale_epochs >= hyper.patience {
            break;
        }
    }
    (model, trajectory)
}

pub(crate) fn fit(hyper: &MlpHyper, seed: u64, x: &Matrix, y: &[usize], n_classes: usize) -> MlpModel {
    fit_traced(hyper, seed, x, y, n_classes).0
}

/// Compares analytic gradients against central finite differences (step
/// 1e-5) over every parameter, on a freshly initialized network. Returns the
/// maximum relative error.
pub fn gradient_check(
    hyper: &MlpHyper,
    seed: u64,
    x: &Matrix,
    y: &[usize],
    n_classes: usize,
) -> f64 {
    let model = MlpModel::init(hyper, seed, x.n_cols(), n_classes);
    gradient_check_model(model, x, y)
}

fn param_mut(model: &mut MlpModel, block: usize, i: usize) -> &mut f64 {
    match block {
        0 => &mut model.w1[i],
        1 => &mut model.b1[i],
        2 => &mut model.w2[i],
        _ => &mut model.b2[i],
    }
}

pub(crate) fn gradient_check_model(mut model: MlpModel, x: &Matrix, y: &[usize]) -> f64 {
    let indices: Vec<usize> = (0..x.n_rows()).collect();
    let mut grads = Gradients::zeros_like(&model);
    batch_loss_and_grads(&model, x, y, &indices, &mut grads);

    let step = 1e-5;
    let mut max_rel = 0.0f64;
    let mut scratch = Gradients::zeros_like(&model);

    for block in 0..4 {
        let len = match block {
            0 => model.w1.len(),
            1 => model.b1.len(),
            2 => model.w2.len(),
            _ => model.b2.len(),
        };
        for i in 0..len {
            let analytic = match block {
                0 => grads.w1[i],
                1 => grads.b1[i],
                2 => grads.w2[i],
                _ => grads.b2[i],
            };
            let original = *param_mut(&mut model, block, i);
            *param_mut(&mut model, block, i) = original + step;
            let plus = batch_loss_and_grads(&model, x, y, &indices, &mut scratch);
            scratch.reset();
            *param_mut(&mut model, block, i) = original - step;
            let minus = batch_loss_and_grads(&model, x, y, &indices, &mut scratch);
            scratch.reset();
            *param_mut(&mut model, block, i) = original;

            let numeric = (plus - minus) / (2.0 * step);
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
            max_rel = max_rel.max(rel);
        }
    }
    max_rel
}
