//! Sub-model feature planning: the window-shift selection over correlated
//! groups, the minimum-model-count rule, the random-selection baseline, and a
//! plan validator.
//!
//! The selection guarantees two coverage conditions at the minimum model
//! count: (a) every sensor is included in at least one sub-model, and
//! (b) every sensor is excluded from at least one sub-model.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correlation::GroupingPlan;
use crate::dataset::SensorId;
use crate::error::{Error, Result};

/// The ordered feature list of one sub-model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelFeatures {
    pub sensors: Vec<SensorId>,
}

impl ModelFeatures {
    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    pub fn contains(&self, sensor: SensorId) -> bool {
        self.sensors.contains(&sensor)
    }

    /// Number of the given sensors that fall inside this feature set.
    pub fn overlap(&self, sensors: &BTreeSet<SensorId>) -> usize {
        self.sensors.iter().filter(|s| sensors.contains(s)).count()
    }

    pub fn names(&self) -> String {
        self.sensors.iter().map(|s| s.name()).collect()
    }
}

/// How a plan's feature subsets were chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMethod {
    Secoe,
    RandomSelection,
}

impl std::fmt::Display for PlanMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlanMethod::Secoe => write!(f, "secoe"),
            PlanMethod::RandomSelection => write!(f, "random_selection"),
        }
    }
}

/// A complete ensemble plan: one feature list per sub-model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePlan {
    pub method: PlanMethod,
    pub min_models: usize,
    pub num_models: usize,
    #[serde(rename = "models")]
    pub model_features: Vec<ModelFeatures>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_groups: Option<GroupingPlan>,
}

impl EnsemblePlan {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let plan: EnsemblePlan = serde_json::from_str(json)
            .map_err(|e| Error::InvalidArgument(format!("bad plan JSON: {e}")))?;
        if plan.num_models != plan.model_features.len() {
            return Err(Error::InvalidArgument(format!(
                "plan declares {} models but lists {}",
                plan.num_models,
                plan.model_features.len()
            )));
        }
        Ok(plan)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json)
    }

    /// Every sensor referenced by any sub-model.
    pub fn referenced_sensors(&self) -> BTreeSet<SensorId> {
        self.model_features
            .iter()
            .flat_map(|mf| mf.sensors.iter().copied())
            .collect()
    }
}

/// Coverage-condition report for a plan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanValidationReport {
    pub condition_a_ok: bool,
    pub condition_b_ok: bool,
    pub violating_sensors: Vec<SensorId>,
    /// Each sub-model's feature count as a fraction of the full sensor set.
    pub per_model_fraction: Vec<f64>,
}

/// Round-half-up of `0.5 * n`.
fn half_round_up(n: usize) -> usize {
    n.div_ceil(2)
}

/// Minimum number of sub-models needed for the coverage conditions when each
/// sub-model takes ~50% of every group: `round(L/2) + 1` for even L,
/// `round(L/2)` for odd L, where L is the largest group size.
pub fn min_models(largest_group: usize) -> Result<usize> {
    if largest_group == 0 {
        return Err(Error::InvalidArgument(
            "largest group size must be at least 1".into(),
        ));
    }
    Ok(if largest_group % 2 == 0 {
        largest_group / 2 + 1
    } else {
        half_round_up(largest_group)
    })
}

/// Sensors taken from a group per sub-model: round-half-up of half the group.
pub fn half_per_group(group_size: usize) -> usize {
    half_round_up(group_size)
}

/// Runs the window-shift selection: sub-model `j` takes the `H` sensors at
/// positions `j .. j+H` (mod group length) of every group, where `H` is half
/// the group rounded up, and the windows advance by one position per
/// sub-model. Feature lists concatenate groups in plan order.
///
/// Exception, needed to keep the coverage guarantee true: when a group has
/// odd length >= 5 and the plan has exactly `H` sub-models (the minimum for
/// an odd largest group), plain unit shifts leave the group's middle sensor
/// inside every window, violating condition (b). In that one case the final
/// window starts at position `H` instead of `H - 1`, wrapping around, which
/// covers the last sensor and excludes the middle one. Even-length groups
/// are never affected. A 3-sensor group at 2 sub-models is beyond repair --
/// two windows of width 2 over 3 sensors always share a sensor -- so it
/// keeps plain shifts and `validate_plan` reports the violation.
///
/// `num_models` defaults to the minimum count; asking for fewer is rejected
/// unless `allow_below_min` is set, because the coverage conditions can
/// break. Asking for more keeps shifting with wrap-around, which may repeat
/// windows of small groups.
pub fn select_features(
    groups: &GroupingPlan,
    num_models: Option<usize>,
    allow_below_min: bool,
) -> Result<EnsemblePlan> {
    groups.validate()?;
    let min = min_models(groups.largest_size())?;
    let num_models = num_models.unwrap_or(min);
    if num_models == 0 {
        return Err(Error::InvalidArgument("a plan needs at least 1 sub-model".into()));
    }
    if num_models < min && !allow_below_min {
        return Err(Error::InvalidArgument(format!(
            "{num_models} sub-models is below the minimum {min}; coverage conditions may break \
             (pass the override to proceed)"
        )));
    }

    let mut model_features: Vec<ModelFeatures> = (0..num_models)
        .map(|_| ModelFeatures { sensors: Vec::new() })
        .collect();

    for group in &groups.groups {
        let len = group.len();
        let take = half_per_group(len);
        let skip_middle_window = len % 2 == 1 && len >= 5 && num_models == take;
        for (j, mf) in model_features.iter_mut().enumerate() {
            let start = if skip_middle_window && j == num_models - 1 {
                j + 1
            } else {
                j
            };
            for t in 0..take {
                mf.sensors.push(group.sensors[(start + t) % len]);
            }
        }
    }

    Ok(EnsemblePlan {
        method: PlanMethod::Secoe,
        min_models: min,
        num_models,
        model_features,
        source_groups: Some(groups.clone()),
    })
}

/// Baseline planner: each sub-model independently samples half the sensors
/// (rounded up) uniformly at random, ignoring correlation. Coverage
/// conditions are NOT guaranteed; that is the point of the baseline.
pub fn random_selection_plan(
    num_sensors: usize,
    num_models: usize,
    seed: u64,
) -> Result<EnsemblePlan> {
    if num_sensors < 2 {
        return Err(Error::InvalidArgument(
            "random selection needs at least 2 sensors".into(),
        ));
    }
    if num_models == 0 {
        return Err(Error::InvalidArgument("a plan needs at least 1 sub-model".into()));
    }
    let take = half_round_up(num_sensors);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model_features = (0..num_models)
        .map(|_| {
            let mut picks = rand::seq::index::sample(&mut rng, num_sensors, take).into_vec();
            picks.sort_unstable();
            Ok(ModelFeatures {
                sensors: picks
                    .into_iter()
                    .map(SensorId::new)
                    .collect::<Result<Vec<_>>>()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EnsemblePlan {
        method: PlanMethod::RandomSelection,
        min_models: num_models,
        num_models,
        model_features,
        source_groups: None,
    })
}

/// Checks the two coverage conditions against a concrete sensor set and
/// reports each sub-model's share of it.
pub fn validate_plan(plan: &EnsemblePlan, all_sensors: &[SensorId]) -> PlanValidationReport {
    let total = all_sensors.len();
    let mut violating = BTreeSet::new();
    let mut condition_a_ok = true;
    let mut condition_b_ok = true;

    for &sensor in all_sensors {
        let appearances = plan
            .model_features
            .iter()
            .filter(|mf| mf.contains(sensor))
            .count();
        if appearances == 0 {
            condition_a_ok = false;
            violating.insert(sensor);
        }
        if appearances == plan.model_features.len() || plan.model_features.is_empty() {
            condition_b_ok = false;
            violating.insert(sensor);
        }
    }

    PlanValidationReport {
        condition_a_ok,
        condition_b_ok,
        violating_sensors: violating.into_iter().collect(),
        per_model_fraction: plan
            .model_features
            .iter()
            .map(|mf| mf.len() as f64 / total.max(1) as f64)
            .collect(),
    }
}
