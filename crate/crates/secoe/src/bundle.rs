//! Engine bundles: a directory holding the plan, one model blob per model,
//! and a manifest with the dataset fingerprint and seeds.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::SensorId;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::learners::TrainedModel;
use crate::planner::EnsemblePlan;

pub const BUNDLE_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub dataset_fingerprint: String,
    pub sensors: Vec<SensorId>,
    pub class_names: Vec<String>,
    pub learner_family: String,
    pub learner_seed: u64,
    pub n_sub_models: usize,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Error::Serialize(e.to_string()))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&json)
        .map_err(|e| Error::InvalidBundle(format!("{}: {e}", path.display())))
}

fn sub_model_file(index: usize) -> String {
    format!("sub_model_{index:03}.json")
}

/// Writes the engine into `dir` (created if needed).
pub fn save_bundle(engine: &Engine, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = Manifest {
        version: BUNDLE_VERSION,
        dataset_fingerprint: engine.dataset_fingerprint.clone(),
        sensors: engine.sensors.clone(),
        class_names: engine.class_names.clone(),
        learner_family: engine.base_model.spec.family.name().to_string(),
        learner_seed: engine.base_model.spec.seed,
        n_sub_models: engine.sub_models.len(),
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    write_json(&dir.join("plan.json"), &engine.plan)?;
    write_json(&dir.join("base_model.json"), &engine.base_model)?;
    for (i, model) in engine.sub_models.iter().enumerate() {
        write_json(&dir.join(sub_model_file(i)), model)?;
    }
    Ok(())
}

/// Loads an engine bundle, checking the version tag and the plan/model
/// consistency invariants.
pub fn load_bundle(dir: &Path) -> Result<Engine> {
    let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
    if manifest.version != BUNDLE_VERSION {
        return Err(Error::InvalidBundle(format!(
            "bundle version {} unsupported (expected {BUNDLE_VERSION})",
            manifest.version
        )));
    }
    let plan: EnsemblePlan = read_json(&dir.join("plan.json"))?;
    let base_model: TrainedModel = read_json(&dir.join("base_model.json"))?;
    let mut sub_models = Vec::with_capacity(manifest.n_sub_models);
    for i in 0..manifest.n_sub_models {
        sub_models.push(read_json::<TrainedModel>(&dir.join(sub_model_file(i)))?);
    }

    if base_model.feature_subset.sensors != manifest.sensors {
        return Err(Error::InvalidBundle(
            "base model does not cover the manifest's sensor list".into(),
        ));
    }
    if sub_models.len() != plan.model_features.len() {
        return Err(Error::InvalidBundle(format!(
            "plan lists {} sub-models but bundle holds {}",
            plan.model_features.len(),
            sub_models.len()
        )));
    }
    for (i, (model, mf)) in sub_models.iter().zip(&plan.model_features).enumerate() {
        if &model.feature_subset != mf {
            return Err(Error::InvalidBundle(format!(
                "sub-model {i} feature subset disagrees with the plan"
            )));
        }
    }

    Ok(Engine {
        base_model,
        sub_models,
        plan,
        sensors: manifest.sensors,
        class_names: manifest.class_names,
        dataset_fingerprint: manifest.dataset_fingerprint,
    })
}
