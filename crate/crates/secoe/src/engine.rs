//! The inference engine: a base model over all sensors plus one sub-model
//! per planned feature subset, with failure-aware routing.
//!
//! Routing per record: no failed sensors goes to the base model; otherwise
//! the sub-models with the fewest failed sensors in their feature set are
//! "suitable". A single suitable model predicts alone; exactly two suitable
//! models are resolved by training accuracy; three or more vote, with
//! plurality ties broken by the most accurate voter. Whatever executes
//! mean-imputes any failed features it still contains (raw space, before its
//! standardizer runs).

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, SensorId};
use crate::error::{Error, Result};
use crate::learners::{ClassifierSpec, TrainedModel};
use crate::matrix::Matrix;
use crate::planner::{EnsemblePlan, ModelFeatures};
use crate::seed::derive_seed;

/// The set of sensors whose streams are currently absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureMask {
    failed: BTreeSet<SensorId>,
}

impl FailureMask {
    pub fn empty() -> Self {
        FailureMask::default()
    }

    pub fn from_sensors(sensors: impl IntoIterator<Item = SensorId>) -> Self {
        FailureMask {
            failed: sensors.into_iter().collect(),
        }
    }

    /// Parses a comma-separated list of sensor letters; empty input means no
    /// failures.
    pub fn parse(list: &str) -> Result<Self> {
        let mut failed = BTreeSet::new();
        for part in list.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            failed.insert(SensorId::parse(part)?);
        }
        Ok(FailureMask { failed })
    }

    pub fn is_empty(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn len(&self) -> usize {
        self.failed.len()
    }

    pub fn contains(&self, sensor: SensorId) -> bool {
        self.failed.contains(&sensor)
    }

    pub fn sensors(&self) -> &BTreeSet<SensorId> {
        &self.failed
    }

    pub fn validate_against(&self, sensors: &[SensorId]) -> Result<()> {
        if let Some(bad) = self.failed.iter().find(|s| !sensors.contains(s)) {
            return Err(Error::InvalidArgument(format!(
                "failure mask names sensor {bad} which the system does not have"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for FailureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.failed.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", names.join(","))
    }
}

/// Which model produced (or contributed to) a prediction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelRef {
    Base,
    Sub(usize),
}

impl fmt::Display for ModelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelRef::Base => write!(f, "base"),
            ModelRef::Sub(i) => write!(f, "sub{}", i + 1),
        }
    }
}

/// How a prediction was routed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Base,
    SingleSub,
    TwoSubTieBreak,
    MajorityVote,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Route::Base => "base",
            Route::SingleSub => "single_sub",
            Route::TwoSubTieBreak => "two_sub_tie_break",
            Route::MajorityVote => "majority_vote",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionResult {
    pub label: usize,
    pub models_used: Vec<ModelRef>,
    /// Features imputed by each executing model (identical across voters by
    /// construction: all suitable models share the minimum overlap).
    pub imputations: usize,
    pub route: Route,
}

/// A trained ensemble ready for prediction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Engine {
    pub base_model: TrainedModel,
    pub sub_models: Vec<TrainedModel>,
    pub plan: EnsemblePlan,
    pub sensors: Vec<SensorId>,
    pub class_names: Vec<String>,
    /// Content hash of the training data, for bundle manifests.
    pub dataset_fingerprint: String,
}

/// Trains the base model on all sensors and one sub-model per planned
/// feature subset. Per-model seeds derive deterministically from the spec
/// seed and the model index, so concurrent training cannot change results.
pub fn build_engine(train: &Dataset, plan: &EnsemblePlan, spec: &ClassifierSpec) -> Result<Engine> {
    let sensors = train.sensors().to_vec();
    for mf in &plan.model_features {
        if let Some(bad) = mf.sensors.iter().find(|s| s.index() >= sensors.len()) {
            return Err(Error::InvalidArgument(format!(
                "plan references sensor {bad} outside the dataset's {} sensors",
                sensors.len()
            )));
        }
    }

    let base_subset = ModelFeatures {
        sensors: sensors.clone(),
    };
    let mut jobs: Vec<(ClassifierSpec, ModelFeatures)> =
        vec![(spec.with_seed(derive_seed(spec.seed, 0)), base_subset)];
    for (j, mf) in plan.model_features.iter().enumerate() {
        jobs.push((
            spec.with_seed(derive_seed(spec.seed, j as u64 + 1)),
            mf.clone(),
        ));
    }

    let mut models = jobs
        .into_par_iter()
        .map(|(model_spec, subset)| TrainedModel::train(&model_spec, subset, train))
        .collect::<Result<Vec<_>>>()?;

    let base_model = models.remove(0);
    Ok(Engine {
        base_model,
        sub_models: models,
        plan: plan.clone(),
        sensors,
        class_names: train.class_names().to_vec(),
        dataset_fingerprint: fingerprint(train),
    })
}

/// FNV-1a over the dataset's shape, names, and raw bytes.
fn fingerprint(data: &Dataset) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(PRIME);
        }
    };
    eat(&data.n_samples().to_le_bytes());
    eat(&data.n_sensors().to_le_bytes());
    for name in data.class_names() {
        eat(name.as_bytes());
    }
    for row in data.features().rows_iter() {
        for v in row {
            eat(&v.to_le_bytes());
        }
    }
    for &label in data.labels() {
        eat(&label.to_le_bytes());
    }
    format!("{hash:016x}")
}

impl Engine {
    pub fn n_sub_models(&self) -> usize {
        self.sub_models.len()
    }

    /// Indices of the sub-models whose feature sets contain the fewest
    /// failed sensors. The minimum overlap may be greater than zero when
    /// many sensors fail at once.
    pub fn suitable_models(&self, mask: &FailureMask) -> Vec<usize> {
        let overlaps: Vec<usize> = self
            .sub_models
            .iter()
            .map(|m| m.feature_subset.overlap(mask.sensors()))
            .collect();
        let Some(&min) = overlaps.iter().min() else {
            return Vec::new();
        };
        overlaps
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == min)
            .map(|(i, _)| i)
            .collect()
    }

    /// Routes and predicts a single raw record. The record must supply a
    /// finite value for every non-failed sensor, in dataset sensor order;
    /// failed positions are ignored (anything, including NaN, is accepted
    /// there).
    pub fn predict_one(&self, record: &[f64], mask: &FailureMask) -> Result<PredictionResult> {
        let suitable = self.suitable_models(mask);
        self.predict_with_suitable(record, mask, &suitable)
    }

    /// Elementwise prediction over rows that share one failure episode; the
    /// suitable-model resolution is computed once.
    pub fn predict_batch(&self, records: &Matrix, mask: &FailureMask) -> Result<Vec<PredictionResult>> {
        if records.n_cols() != self.sensors.len() {
            return Err(Error::DimensionMismatch(format!(
                "records have {} columns, engine expects {}",
                records.n_cols(),
                self.sensors.len()
            )));
        }
        let suitable = self.suitable_models(mask);
        records
            .rows_iter()
            .map(|row| self.predict_with_suitable(row, mask, &suitable))
            .collect()
    }

    fn predict_with_suitable(
        &self,
        record: &[f64],
        mask: &FailureMask,
        suitable: &[usize],
    ) -> Result<PredictionResult> {
        if record.len() != self.sensors.len() {
            return Err(Error::DimensionMismatch(format!(
                "record has {} values, engine expects {}",
                record.len(),
                self.sensors.len()
            )));
        }
        mask.validate_against(&self.sensors)?;
        for (i, sensor) in self.sensors.iter().enumerate() {
            if !mask.contains(*sensor) && !record[i].is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "record is missing a value for non-failed sensor {sensor}"
                )));
            }
        }

        // no failure: the base model alone handles the record
        if mask.is_empty() {
            let (label, imputations) = self.execute(&self.base_model, record, mask);
            return Ok(PredictionResult {
                label,
                models_used: vec![ModelRef::Base],
                imputations,
                route: Route::Base,
            });
        }

        // no sub-models to route to: degenerate engine, base imputes
        if suitable.is_empty() {
            let (label, imputations) = self.execute(&self.base_model, record, mask);
            return Ok(PredictionResult {
                label,
                models_used: vec![ModelRef::Base],
                imputations,
                route: Route::Base,
            });
        }

        match suitable {
            [only] => {
                let (label, imputations) = self.execute(&self.sub_models[*only], record, mask);
                Ok(PredictionResult {
                    label,
                    models_used: vec![ModelRef::Sub(*only)],
                    imputations,
                    route: Route::SingleSub,
                })
            }
            [a, b] => {
                // exactly two suitable: the higher training accuracy decides
                let chosen = if self.sub_models[*b].training_accuracy
                    > self.sub_models[*a].training_accuracy
                {
                    *b
                } else {
                    *a
                };
                let (label, imputations) = self.execute(&self.sub_models[chosen], record, mask);
                Ok(PredictionResult {
                    label,
                    models_used: vec![ModelRef::Sub(chosen)],
                    imputations,
                    route: Route::TwoSubTieBreak,
                })
            }
            _ => {
                let mut votes = vec![0usize; self.class_names.len()];
                let mut ballots = Vec::with_capacity(suitable.len());
                let mut imputations = 0;
                for &j in suitable {
                    let (label, imp) = self.execute(&self.sub_models[j], record, mask);
                    votes[label] += 1;
                    ballots.push((j, label));
                    imputations = imp; // equal across voters (shared min overlap)
                }
                let top = *votes.iter().max().expect("at least one class");
                let label = if votes.iter().filter(|&&v| v == top).count() == 1 {
                    votes.iter().position(|&v| v == top).expect("counted above")
                } else {
                    // plurality tie: take the tied label predicted by the most
                    // accurate voter (accuracy ties go to the lower index)
                    ballots
                        .iter()
                        .filter(|(_, label)| votes[*label] == top)
                        .max_by(|(i, _), (j, _)| {
                            self.sub_models[*i]
                                .training_accuracy
                                .partial_cmp(&self.sub_models[*j].training_accuracy)
                                .unwrap_or(std::cmp::Ordering::Equal)
                                .then(j.cmp(i))
                        })
                        .expect("suitable set is non-empty")
                        .1
                };
                Ok(PredictionResult {
                    label,
                    models_used: suitable.iter().map(|&j| ModelRef::Sub(j)).collect(),
                    imputations,
                    route: Route::MajorityVote,
                })
            }
        }
    }

    /// Runs one model on the record: gathers its subset, mean-imputes failed
    /// slots, standardizes, predicts.
    fn execute(&self, model: &TrainedModel, record: &[f64], mask: &FailureMask) -> (usize, usize) {
        let subset = &model.feature_subset.sensors;
        let mut values = Vec::with_capacity(subset.len());
        let mut missing = Vec::new();
        for (slot, sensor) in subset.iter().enumerate() {
            if mask.contains(*sensor) {
                missing.push(slot);
                values.push(f64::NAN); // replaced by the imputer
            } else {
                values.push(record[sensor.index()]);
            }
        }
        model.predict_masked(&values, &missing)
    }
}
