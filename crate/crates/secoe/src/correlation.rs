//! Pearson correlation over training features and formation of the ordered
//! correlated sensor groups consumed by the planner.
//!
//! Only positive correlation matters for grouping: each sensor is linked to
//! the other sensor it is most positively correlated with, and the connected
//! components of those links become the groups. Negative coefficients are
//! treated as "uncorrelated" when ranking partners.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, SensorId};
use crate::error::{Error, Result};

/// Symmetric pairwise Pearson coefficients over the training features.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    sensors: Vec<SensorId>,
    values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn new(sensors: Vec<SensorId>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = sensors.len();
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "correlation matrix must be {n} x {n}"
            )));
        }
        Ok(CorrelationMatrix { sensors, values })
    }

    #[inline]
    pub fn n_sensors(&self) -> usize {
        self.sensors.len()
    }

    #[inline]
    pub fn sensors(&self) -> &[SensorId] {
        &self.sensors
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }
}

/// Interpretation bands for a positive Pearson coefficient. Boundaries are
/// half-open and closed at the lower bound of the higher band, so each value
/// falls in exactly one category. Used for reporting; grouping works on the
/// raw coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CorrelationCategory {
    None,
    VeryWeak,
    Weak,
    Moderate,
    Strong,
}

impl CorrelationCategory {
    /// Lower inclusive bound of the band.
    pub fn lower_bound(self) -> f64 {
        match self {
            CorrelationCategory::Strong => 0.76,
            CorrelationCategory::Moderate => 0.50,
            CorrelationCategory::Weak => 0.25,
            CorrelationCategory::VeryWeak => 0.10,
            CorrelationCategory::None => -1.0,
        }
    }
}

impl std::fmt::Display for CorrelationCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            CorrelationCategory::Strong => "strong",
            CorrelationCategory::Moderate => "moderate",
            CorrelationCategory::Weak => "weak",
            CorrelationCategory::VeryWeak => "very weak",
            CorrelationCategory::None => "none",
        };
        write!(f, "{label}")
    }
}

/// An ordered group of mutually correlated sensors. Order matters: the
/// planner slides selection windows over it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorrelatedGroup {
    pub sensors: Vec<SensorId>,
}

impl CorrelatedGroup {
    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }
}

/// The full partition of sensors into ordered correlated groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupingPlan {
    pub groups: Vec<CorrelatedGroup>,
}

impl GroupingPlan {
    /// Size of the largest group (the planner's L).
    pub fn largest_size(&self) -> usize {
        self.groups.iter().map(CorrelatedGroup::len).max().unwrap_or(0)
    }

    pub fn n_sensors(&self) -> usize {
        self.groups.iter().map(CorrelatedGroup::len).sum()
    }

    pub fn all_sensors(&self) -> Vec<SensorId> {
        let mut sensors: Vec<SensorId> = self
            .groups
            .iter()
            .flat_map(|g| g.sensors.iter().copied())
            .collect();
        sensors.sort_unstable();
        sensors
    }

    /// Checks the partition property: non-empty, duplicate-free, disjoint
    /// groups. Coverage of a concrete sensor set is checked where a dataset
    /// is in scope.
    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::InvalidArgument("grouping has no groups".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, group) in self.groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidArgument(format!("group {i} is empty")));
            }
            for sensor in &group.sensors {
                if !seen.insert(*sensor) {
                    return Err(Error::InvalidArgument(format!(
                        "sensor {sensor} appears in more than one group"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let plan: GroupingPlan = serde_json::from_str(json)
            .map_err(|e| Error::InvalidArgument(format!("bad grouping JSON: {e}")))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&json)
    }
}

/// Sample Pearson coefficient of two equal-length vectors. Returns 0 when
/// either vector has zero variance; the result is clamped to [-1, 1].
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "pearson inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument(
            "pearson needs at least 2 observations".into(),
        ));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Ok(0.0);
    }
    Ok((cov / (var_x * var_y).sqrt()).clamp(-1.0, 1.0))
}

/// Pairwise Pearson matrix over the training features.
pub fn correlation_matrix(train: &Dataset) -> Result<CorrelationMatrix> {
    if train.n_samples() < 2 {
        return Err(Error::InvalidArgument(
            "correlation needs at least 2 training rows".into(),
        ));
    }
    let n = train.n_sensors();
    let columns: Vec<Vec<f64>> = (0..n).map(|j| train.features().column(j)).collect();
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = pearson(&columns[i], &columns[i])?;
        for j in (i + 1)..n {
            let r = pearson(&columns[i], &columns[j])?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    CorrelationMatrix::new(train.sensors().to_vec(), values)
}

/// Band lookup for a coefficient in [-1, 1].
pub fn categorize(r: f64) -> Result<CorrelationCategory> {
    if !r.is_finite() || !(-1.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "correlation coefficient {r} outside [-1, 1]"
        )));
    }
    Ok(if r >= 0.76 {
        CorrelationCategory::Strong
    } else if r >= 0.50 {
        CorrelationCategory::Moderate
    } else if r >= 0.25 {
        CorrelationCategory::Weak
    } else if r >= 0.10 {
        CorrelationCategory::VeryWeak
    } else {
        CorrelationCategory::None
    })
}

/// Groups every sensor with its most positively correlated partner and takes
/// connected components.
///
/// Negative coefficients rank as 0, so an all-negative row still links to the
/// least-uncorrelated candidate (ties by ascending index). Every sensor has a
/// best partner, so no group is a singleton. Within a group, sensors appear
/// in the order they joined it (components merge smaller-minimum-index
/// first); groups are listed by their smallest contained index.
pub fn form_groups(matrix: &CorrelationMatrix) -> Result<GroupingPlan> {
    let n = matrix.n_sensors();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "grouping needs at least 2 sensors".into(),
        ));
    }

    let best_partner = |i: usize| -> usize {
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for j in 0..n {
            if j == i {
                continue;
            }
            let score = matrix.get(i, j).max(0.0);
            if score > best_score {
                best_score = score;
                best = j;
            }
        }
        best
    };

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }

    // Ordered member list, kept at each component root.
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();

    for i in 0..n {
        let p = best_partner(i);
        let root_i = find(&mut parent, i);
        let root_p = find(&mut parent, p);
        if root_i == root_p {
            continue;
        }
        let list_i = std::mem::take(&mut members[root_i]);
        let list_p = std::mem::take(&mut members[root_p]);
        // The component whose earliest sensor has the smaller index keeps the
        // front of the merged order.
        let merged = if list_i.iter().min() < list_p.iter().min() {
            [list_i, list_p].concat()
        } else {
            [list_p, list_i].concat()
        };
        parent[root_p] = root_i;
        members[root_i] = merged;
    }

    let mut groups: Vec<Vec<usize>> = members.into_iter().filter(|m| !m.is_empty()).collect();
    groups.sort_by_key(|g| g.iter().copied().min().unwrap_or(usize::MAX));

    let sensors = matrix.sensors();
    let plan = GroupingPlan {
        groups: groups
            .into_iter()
            .map(|g| CorrelatedGroup {
                sensors: g.into_iter().map(|i| sensors[i]).collect(),
            })
            .collect(),
    };
    plan.validate()?;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn dataset_from_columns(columns: Vec<Vec<f64>>) -> Dataset {
        let n = columns[0].len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| columns.iter().map(|c| c[i]).collect())
            .collect();
        Dataset::new(Matrix::from_rows(rows).unwrap(), vec![0; n], vec!["c".into()]).unwrap()
    }

    fn matrix_from(values: Vec<Vec<f64>>) -> CorrelationMatrix {
        let n = values.len();
        CorrelationMatrix::new(SensorId::first_n(n).unwrap(), values).unwrap()
    }

    #[test]
    fn pearson_self_and_anti_correlation() {
        let x = vec![1.0, 2.0, 4.0, 9.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_relative_eq!(pearson(&x, &x).unwrap(), 1.0);
        assert_relative_eq!(pearson(&x, &neg).unwrap(), -1.0);
    }

    #[test]
    fn pearson_hand_oracle() {
        // direct-formula oracle: r = cov / (sx * sy)
        // x = [1,2,3], y = [1,2,4]: cov = 1, var_x = 2/3, var_y = 14/9
        // r = 1 / sqrt(2/3 * 14/9) = sqrt(27/28) = 0.98198050606...
        let expected = (27.0f64 / 28.0).sqrt();
        let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
        assert_relative_eq!(r, expected, max_relative = 1e-12);
        assert_relative_eq!(r, 0.9819805060619657, max_relative = 1e-12);
    }

    #[test]
    fn pearson_degenerate_and_errors() {
        assert_eq!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn matrix_symmetric_with_unit_diagonal() {
        let ds = dataset_from_columns(vec![
            vec![1.0, 2.0, 3.0, 4.0],
            vec![2.0, 4.0, 6.0, 8.0],
            vec![5.0, 1.0, 4.0, 2.0],
        ]);
        let m = correlation_matrix(&ds).unwrap();
        for i in 0..3 {
            assert_relative_eq!(m.get(i, i), 1.0);
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
        // identical (perfectly scaled) columns
        assert_relative_eq!(m.get(0, 1), 1.0);
    }

    #[test]
    fn categorize_bands() {
        use CorrelationCategory::*;
        assert_eq!(categorize(0.80).unwrap(), Strong);
        assert_eq!(categorize(0.76).unwrap(), Strong);
        assert_eq!(categorize(0.50).unwrap(), Moderate);
        assert_eq!(categorize(0.75).unwrap(), Moderate);
        assert_eq!(categorize(0.25).unwrap(), Weak);
        assert_eq!(categorize(0.10).unwrap(), VeryWeak);
        assert_eq!(categorize(0.05).unwrap(), None);
        assert_eq!(categorize(-0.9).unwrap(), None);
        assert!(categorize(1.5).is_err());
        assert!(categorize(f64::NAN).is_err());
    }

    #[test]
    fn two_sensors_form_one_group() {
        let m = matrix_from(vec![vec![1.0, 0.2], vec![0.2, 1.0]]);
        let plan = form_groups(&m).unwrap();
        assert_eq!(plan.groups.len(), 1);
        assert_eq!(plan.groups[0].len(), 2);
    }

    #[test]
    fn two_clear_components() {
        let m = matrix_from(vec![
            vec![1.0, 0.9, 0.1, 0.05],
            vec![0.9, 1.0, 0.08, 0.1],
            vec![0.1, 0.08, 1.0, 0.8],
            vec![0.05, 0.1, 0.8, 1.0],
        ]);
        let plan = form_groups(&m).unwrap();
        let as_names: Vec<String> = plan
            .groups
            .iter()
            .map(|g| g.sensors.iter().map(|s| s.name()).collect())
            .collect();
        assert_eq!(as_names, vec!["AB".to_string(), "CD".to_string()]);
        assert_eq!(plan.largest_size(), 2);
    }

    #[test]
    fn negative_correlations_do_not_link() {
        // A and B strongly negative; C is A's only positive partner.
        let m = matrix_from(vec![
            vec![1.0, -0.95, 0.3],
            vec![-0.95, 1.0, 0.2],
            vec![0.3, 0.2, 1.0],
        ]);
        let plan = form_groups(&m).unwrap();
        // A links to C, B links to C (its best positive), all merge
        assert_eq!(plan.groups.len(), 1);
    }

    #[test]
    fn grouping_json_round_trip() {
        let plan = GroupingPlan {
            groups: vec![
                CorrelatedGroup {
                    sensors: "HBDCAG".chars().map(|c| SensorId::from_name(c).unwrap()).collect(),
                },
                CorrelatedGroup {
                    sensors: "EF".chars().map(|c| SensorId::from_name(c).unwrap()).collect(),
                },
            ],
        };
        let json = plan.to_json().unwrap();
        assert!(json.contains("\"H\""));
        let back = GroupingPlan::from_json(&json).unwrap();
        assert_eq!(back, plan);
        // duplicates rejected on load
        let bad = r#"{"groups":[["A","B"],["B","C"]]}"#;
        assert!(GroupingPlan::from_json(bad).is_err());
    }

    fn arb_symmetric_matrix() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (2usize..10).prop_flat_map(|n| {
            proptest::collection::vec(-1.0f64..1.0, n * (n - 1) / 2).prop_map(move |upper| {
                let mut values = vec![vec![0.0; n]; n];
                let mut k = 0;
                for i in 0..n {
                    values[i][i] = 1.0;
                    for j in (i + 1)..n {
                        values[i][j] = upper[k];
                        values[j][i] = upper[k];
                        k += 1;
                    }
                }
                values
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn prop_groups_partition_all_sensors(values in arb_symmetric_matrix()) {
            let n = values.len();
            let m = matrix_from(values);
            let plan = form_groups(&m).unwrap();
            let mut seen: Vec<usize> = plan
                .groups
                .iter()
                .flat_map(|g| g.sensors.iter().map(|s| s.index()))
                .collect();
            seen.sort_unstable();
            let expected: Vec<usize> = (0..n).collect();
            prop_assert_eq!(seen, expected);
            // no singletons: best-partner union links every sensor to something
            prop_assert!(plan.groups.iter().all(|g| g.len() >= 2));
        }

        #[test]
        fn prop_pearson_symmetry(pairs in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..40)) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            prop_assert_eq!(pearson(&x, &y).unwrap(), pearson(&y, &x).unwrap());
        }

        #[test]
        fn prop_categorize_total_and_monotone(mut a in -1.0f64..=1.0, mut b in -1.0f64..=1.0) {
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            let ca = categorize(a).unwrap();
            let cb = categorize(b).unwrap();
            prop_assert!(ca <= cb);
        }
    }

    #[test]
    fn scale_invariance_of_matrix_and_groups() {
        let base = vec![
            vec![1.0, 2.0, 3.0, 4.0, 5.0],
            vec![1.1, 2.3, 2.9, 4.2, 5.1],
            vec![5.0, 3.0, 4.0, 1.0, 2.0],
            vec![4.9, 3.2, 3.8, 1.2, 2.1],
        ];
        let ds = dataset_from_columns(base.clone());
        let m1 = correlation_matrix(&ds).unwrap();
        let mut scaled = base;
        for v in &mut scaled[2] {
            *v *= 1000.0;
        }
        let ds2 = dataset_from_columns(scaled);
        let m2 = correlation_matrix(&ds2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((m1.get(i, j) - m2.get(i, j)).abs() < 1e-9);
            }
        }
        assert_eq!(form_groups(&m1).unwrap(), form_groups(&m2).unwrap());
    }
}
