//! One-vs-rest linear support-vector classifier trained by sub-gradient
//! descent on the hinge loss with L2 regularization (Pegasos-style step
//! sizes). The bias rides along as a constant-1 feature so it shares the
//! step-size decay; with standardized inputs the extra regularization on it
//! is negligible.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::Matrix;
use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmHyper {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmHyper {
    fn default() -> Self {
        SvmHyper {
            lambda: 1e-4,
            epochs: 1000,
        }
    }
}

impl SvmHyper {
    pub(crate) fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument("svm lambda must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("svm needs at least 1 epoch".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SvmModel {
    /// One weight vector per class (one-vs-rest).
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub n_classes: usize,
}

impl SvmModel {
    /// Highest-scoring class; ties go to the lowest class index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for c in 0..self.n_classes {
            let score = dot(&self.weights[c], x) + self.biases[c];
            if score > best_score {
                best_score = score;
                best = c;
            }
        }
        best
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn fit(hyper: &SvmHyper, seed: u64, x: &Matrix, y: &[usize], n_classes: usize) -> SvmModel {
    let d = x.n_cols();
    let n = x.n_rows();
    let mut weights = Vec::with_capacity(n_classes);
    let mut biases = Vec::with_capacity(n_classes);

    for class in 0..n_classes {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, class as u64));
        // last slot is the bias, fed by a constant-1 pseudo-feature
        let mut w = vec![0.0; d + 1];
        let mut order: Vec<usize> = (0..n).collect();
        let mut t: u64 = 0;

        for _ in 0..hyper.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (hyper.lambda * t as f64);
                let target = if y[i] == class { 1.0 } else { -1.0 };
                let row = x.row(i);
                let margin = target * (dot(&w[..d], row) + w[d]);
                let decay = 1.0 - eta * hyper.lambda;
                for wj in &mut w {
                    *wj *= decay;
                }
                if margin < 1.0 {
                    let step = eta * target;
                    for (wj, &v) in w.iter_mut().zip(row) {
                        *wj += step * v;
                    }
                    w[d] += step;
                }
            }
        }
        biases.push(w[d]);
        w.truncate(d);
        weights.push(w);
    }

    SvmModel {
        weights,
        biases,
        n_classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fits_separable_blobs() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..15 {
            let t = i as f64 * 0.05;
            rows.push(vec![2.0 + t, 2.0]);
            labels.push(0usize);
            rows.push(vec![-2.0 - t, -2.0]);
            labels.push(1usize);
        }
        let x = Matrix::from_rows(rows).unwrap();
        let hyper = SvmHyper {
            epochs: 200,
            ..SvmHyper::default()
        };
        let model = fit(&hyper, 0, &x, &labels, 2);
        let correct = x
            .rows_iter()
            .zip(&labels)
            .filter(|(row, &l)| model.predict(row) == l)
            .count();
        assert_eq!(correct, labels.len());
    }

    #[test]
    fn deterministic_given_seed() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![(i % 5) as f64, (i % 3) as f64])
            .collect();
        let labels: Vec<usize> = (0..20).map(|i| i % 3).collect();
        let x = Matrix::from_rows(rows).unwrap();
        let hyper = SvmHyper {
            epochs: 50,
            ..SvmHyper::default()
        };
        let a = fit(&hyper, 4, &x, &labels, 3);
        let b = fit(&hyper, 4, &x, &labels, 3);
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.biases, b.biases);
    }

    #[test]
    fn tie_goes_to_lowest_class() {
        let model = SvmModel {
            weights: vec![vec![0.0], vec![0.0]],
            biases: vec![0.0, 0.0],
            n_classes: 2,
        };
        assert_eq!(model.predict(&[1.0]), 0);
    }
}
