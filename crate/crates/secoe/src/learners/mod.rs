//! Trainable classifiers and the mean imputer.
//!
//! Three families are implemented from scratch -- a one-hidden-layer
//! perceptron, a random forest, and a one-vs-rest linear SVM -- behind a
//! common spec/fit/predict surface. All training is deterministic given the
//! spec seed. A [`TrainedModel`] bundles the fitted parameters with the
//! feature subset it consumes, its subset-restricted standardizer, and the
//! raw-space training means used for imputation.

mod forest;
mod mlp;
mod svm;

pub use forest::{ForestHyper, ForestModel};
pub use mlp::{gradient_check, MlpHyper, MlpModel};
pub use svm::{SvmHyper, SvmModel};

use serde::{Deserialize, Serialize};

use crate::dataset::{
    apply_standardizer, fit_standardizer, Dataset, StandardizationParams,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::planner::ModelFeatures;

/// A learner family together with its hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClassifierFamily {
    Mlp(MlpHyper),
    RandomForest(ForestHyper),
    LinearSvm(SvmHyper),
}

impl ClassifierFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ClassifierFamily::Mlp(_) => "mlp",
            ClassifierFamily::RandomForest(_) => "forest",
            ClassifierFamily::LinearSvm(_) => "svm",
        }
    }

    /// Family with default hyperparameters, from its short name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "mlp" => Ok(ClassifierFamily::Mlp(MlpHyper::default())),
            "forest" | "rf" | "random_forest" => {
                Ok(ClassifierFamily::RandomForest(ForestHyper::default()))
            }
            "svm" | "linear_svm" => Ok(ClassifierFamily::LinearSvm(SvmHyper::default())),
            other => Err(Error::InvalidArgument(format!(
                "unknown learner family {other:?} (expected mlp, forest, or svm)"
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ClassifierFamily::Mlp(h) => h.validate(),
            ClassifierFamily::RandomForest(h) => h.validate(),
            ClassifierFamily::LinearSvm(h) => h.validate(),
        }
    }
}

/// What to train and with which seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    #[serde(flatten)]
    pub family: ClassifierFamily,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(family: ClassifierFamily, seed: u64) -> Self {
        ClassifierSpec { family, seed }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ClassifierSpec {
            family: self.family.clone(),
            seed,
        }
    }
}

/// Learned parameters, by family. `Constant` covers degenerate single-class
/// training data for every family.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Constant { class: usize },
    Mlp(MlpModel),
    Forest(ForestModel),
    Svm(SvmModel),
}

impl ModelParams {
    pub fn predict(&self, x: &[f64]) -> usize {
        match self {
            ModelParams::Constant { class } => *class,
            ModelParams::Mlp(m) => m.predict(x),
            ModelParams::Forest(m) => m.predict(x),
            ModelParams::Svm(m) => m.predict(x),
        }
    }
}

/// Output of a low-level fit: parameters plus accuracy on the training rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FittedModel {
    pub params: ModelParams,
    pub training_accuracy: f64,
}

/// Fraction of rows whose prediction matches the label.
pub fn accuracy<F: Fn(&[f64]) -> usize>(predict: F, x: &Matrix, y: &[usize]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let correct = x
        .rows_iter()
        .zip(y)
        .filter(|(row, &label)| predict(row) == label)
        .count();
    correct as f64 / y.len() as f64
}

/// Trains a classifier on an already subset-restricted, standardized matrix.
/// Deterministic given the spec seed. Single-class input yields a constant
/// predictor with training accuracy 1.0.
pub fn fit(spec: &ClassifierSpec, x: &Matrix, y: &[usize], n_classes: usize) -> Result<FittedModel> {
    spec.family.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows but {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::EmptyInput("cannot fit on zero rows".into()));
    }
    if x.n_rows() < n_classes {
        return Err(Error::InvalidArgument(format!(
            "{} training rows cannot cover {n_classes} classes",
            x.n_rows()
        )));
    }
    if let Some(&bad) = y.iter().find(|&&l| l >= n_classes) {
        return Err(Error::InvalidArgument(format!(
            "label {bad} out of range for {n_classes} classes"
        )));
    }

    let first = y[0];
    if y.iter().all(|&l| l == first) {
        return Ok(FittedModel {
            params: ModelParams::Constant { class: first },
            training_accuracy: 1.0,
        });
    }

    let params = match &spec.family {
        ClassifierFamily::Mlp(hyper) => {
            ModelParams::Mlp(mlp::fit(hyper, spec.seed, x, y, n_classes))
        }
        ClassifierFamily::RandomForest(hyper) => {
            ModelParams::Forest(forest::fit(hyper, spec.seed, x, y, n_classes))
        }
        ClassifierFamily::LinearSvm(hyper) => {
            ModelParams::Svm(svm::fit(hyper, spec.seed, x, y, n_classes))
        }
    };
    let training_accuracy = accuracy(|row| params.predict(row), x, y);
    Ok(FittedModel {
        params,
        training_accuracy,
    })
}

/// Fills the listed missing slots with their training means, leaving every
/// other entry untouched. Operates in raw (unstandardized) space; callers
/// standardize afterwards.
pub fn impute(x_raw: &[f64], missing: &[usize], means: &[f64]) -> Vec<f64> {
    assert_eq!(
        x_raw.len(),
        means.len(),
        "imputation means must cover every feature"
    );
    let mut out = x_raw.to_vec();
    for &i in missing {
        assert!(i < out.len(), "missing index {i} out of range");
        out[i] = means[i];
    }
    out
}

/// A classifier ready for routing: fitted parameters plus the feature subset
/// it consumes (in order), its standardizer, and raw-space imputation means.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ClassifierSpec,
    pub feature_subset: ModelFeatures,
    pub training_accuracy: f64,
    pub standardizer: StandardizationParams,
    pub imputation_means: Vec<f64>,
    params: ModelParams,
}

impl TrainedModel {
    /// Full training pipeline for one model: restrict the raw training
    /// matrix to the subset, record raw column means, fit a standardizer on
    /// the subset, standardize, and fit the classifier.
    pub fn train(spec: &ClassifierSpec, subset: ModelFeatures, data: &Dataset) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::InvalidArgument(
                "a model needs at least one feature".into(),
            ));
        }
        let n_sensors = data.n_sensors();
        if let Some(bad) = subset.sensors.iter().find(|s| s.index() >= n_sensors) {
            return Err(Error::InvalidArgument(format!(
                "plan references sensor {bad} but the dataset has only {n_sensors} sensors"
            )));
        }
        let columns: Vec<usize> = subset.sensors.iter().map(|s| s.index()).collect();
        let raw = data.features().select_columns(&columns);

        let restricted = Dataset::new(
            raw.clone(),
            data.labels().to_vec(),
            data.class_names().to_vec(),
        )?;
        let standardizer = fit_standardizer(&restricted)?;
        let imputation_means = standardizer.means.clone();
        let standardized = apply_standardizer(&standardizer, &raw)?;

        let fitted = fit(spec, &standardized, data.labels(), data.n_classes())?;
        Ok(TrainedModel {
            spec: spec.clone(),
            feature_subset: subset,
            training_accuracy: fitted.training_accuracy,
            standardizer,
            imputation_means,
            params: fitted.params,
        })
    }

    /// Predicts from an already standardized vector in subset order.
    pub fn predict(&self, x_std: &[f64]) -> usize {
        assert_eq!(
            x_std.len(),
            self.feature_subset.len(),
            "input length must match the model's feature subset"
        );
        self.params.predict(x_std)
    }

    /// Predicts from a raw vector in subset order with the given slots
    /// missing: mean-imputes in raw space, standardizes, predicts. Returns
    /// the label and the number of imputed features.
    pub fn predict_masked(&self, x_raw: &[f64], missing: &[usize]) -> (usize, usize) {
        let mut filled = impute(x_raw, missing, &self.imputation_means);
        self.standardizer.apply_row(&mut filled);
        (self.predict(&filled), missing.len())
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Two well-separated 2-feature blobs, 10 points per class.
    pub fn separable_toy() -> (Matrix, Vec<usize>) {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            let t = i as f64 * 0.1;
            rows.push(vec![3.0 + t, 3.0 - t]);
            labels.push(0);
            rows.push(vec![-3.0 - t, -3.0 + t]);
            labels.push(1);
        }
        (Matrix::from_rows(rows).unwrap(), labels)
    }

    /// The four XOR corners; not linearly separable.
    pub fn xor_toy() -> (Matrix, Vec<usize>) {
        let rows = vec![
            vec![-1.0, -1.0],
            vec![-1.0, 1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
        ];
        let labels = vec![0, 1, 1, 0];
        (Matrix::from_rows(rows).unwrap(), labels)
    }

    pub fn all_specs() -> Vec<ClassifierSpec> {
        vec![
            ClassifierSpec::new(ClassifierFamily::Mlp(MlpHyper::default()), 7),
            ClassifierSpec::new(ClassifierFamily::RandomForest(ForestHyper::default()), 7),
            ClassifierSpec::new(ClassifierFamily::LinearSvm(SvmHyper::default()), 7),
        ]
    }
}
