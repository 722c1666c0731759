//! Deterministic synthetic sensor tables with planted correlation structure.
//!
//! Sensors inside one planted group share a class-dependent latent factor
//! (scaled by a positive per-sensor gain), so they are strongly positively
//! correlated and carry redundant class signal -- the structure the grouping
//! step is meant to discover. Each sensor also carries a smaller unique
//! class-dependent component, so losing it genuinely costs information, plus
//! independent noise. Per-sensor scales and offsets keep the raw values on
//! arbitrary units so standardization has real work to do.
//!
//! The presets mirror the shapes of the three public UCI tables this project
//! is usually evaluated on, for self-contained runs when those CSVs are not
//! on disk.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub sensors: usize,
    pub classes: usize,
    pub rows: usize,
    /// Partition of sensor indices; each part shares one latent factor.
    pub groups: Vec<Vec<usize>>,
    /// Spread of per-class latent means: bigger separates classes.
    pub class_separation: f64,
    /// Within-class jitter of each group's latent factor.
    pub latent_noise: f64,
    /// Spread of the per-sensor class-dependent component.
    pub unique_signal: f64,
    /// Independent per-reading noise.
    pub sensor_noise: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.sensors == 0 || self.classes == 0 || self.rows == 0 {
            return Err(Error::InvalidArgument(
                "synthetic spec needs sensors, classes, and rows".into(),
            ));
        }
        let mut seen = vec![false; self.sensors];
        for group in &self.groups {
            for &s in group {
                if s >= self.sensors {
                    return Err(Error::InvalidArgument(format!(
                        "group references sensor index {s} out of range"
                    )));
                }
                if std::mem::replace(&mut seen[s], true) {
                    return Err(Error::InvalidArgument(format!(
                        "sensor index {s} appears in two groups"
                    )));
                }
            }
        }
        if seen.iter().any(|&v| !v) {
            return Err(Error::InvalidArgument(
                "groups must cover every sensor index".into(),
            ));
        }
        for p in [
            self.class_separation,
            self.latent_noise,
            self.unique_signal,
            self.sensor_noise,
        ] {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidArgument(
                    "spread parameters must be non-negative".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Generates the table. Same spec, same dataset, bit for bit.
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let n_groups = spec.groups.len();
    let mut group_of = vec![0usize; spec.sensors];
    for (g, group) in spec.groups.iter().enumerate() {
        for &s in group {
            group_of[s] = g;
        }
    }

    // class-conditional latent means, one per (class, group)
    let latent_means: Vec<Vec<f64>> = (0..spec.classes)
        .map(|_| {
            (0..n_groups)
                .map(|_| normal.sample(&mut rng) * spec.class_separation)
                .collect()
        })
        .collect();

    // per-sensor mixing: positive gain keeps within-group correlation
    // positive; scale/offset move the column onto its own units
    let gains: Vec<f64> = (0..spec.sensors).map(|_| rng.gen_range(0.6..1.4)).collect();
    let scales: Vec<f64> = (0..spec.sensors).map(|_| rng.gen_range(0.5..8.0)).collect();
    let offsets: Vec<f64> = (0..spec.sensors).map(|_| rng.gen_range(-5.0..5.0)).collect();

    // per-sensor class-dependent component
    let unique_means: Vec<Vec<f64>> = (0..spec.classes)
        .map(|_| {
            (0..spec.sensors)
                .map(|_| normal.sample(&mut rng) * spec.unique_signal)
                .collect()
        })
        .collect();

    let mut data = Vec::with_capacity(spec.rows * spec.sensors);
    let mut labels = Vec::with_capacity(spec.rows);
    let mut latents = vec![0.0; n_groups];
    for _ in 0..spec.rows {
        let class = rng.gen_range(0..spec.classes);
        labels.push(class);
        for (g, z) in latents.iter_mut().enumerate() {
            *z = latent_means[class][g] + normal.sample(&mut rng) * spec.latent_noise;
        }
        for s in 0..spec.sensors {
            let signal = gains[s] * latents[group_of[s]]
                + unique_means[class][s]
                + normal.sample(&mut rng) * spec.sensor_noise;
            data.push(scales[s] * signal + offsets[s]);
        }
    }

    let class_names = (0..spec.classes).map(|c| format!("class_{c}")).collect();
    Dataset::new(Matrix::from_flat(spec.rows, spec.sensors, data)?, labels, class_names)
}

/// 16 sensors / 7 classes / 13611 rows, with the four correlated groups
/// planted exactly where the dry-beans table has them.
pub fn beans_like(seed: u64) -> SynthSpec {
    SynthSpec {
        sensors: 16,
        classes: 7,
        rows: 13_611,
        groups: vec![
            vec![7, 1, 3, 2, 0, 6],   // H B D C A G
            vec![4, 5],               // E F
            vec![13, 10, 12, 8, 11, 14], // N K M I L O
            vec![9, 15],              // J P
        ],
        class_separation: 1.0,
        latent_noise: 0.35,
        unique_signal: 0.45,
        sensor_noise: 0.3,
        seed,
    }
}

/// 24 sensors / 4 classes / 5456 rows; largest planted group of 6 gives a
/// minimum ensemble of 4.
pub fn wall_following_like(seed: u64) -> SynthSpec {
    SynthSpec {
        sensors: 24,
        classes: 4,
        rows: 5456,
        groups: vec![
            (0..6).collect(),
            (6..11).collect(),
            (11..15).collect(),
            (15..18).collect(),
            (18..21).collect(),
            (21..24).collect(),
        ],
        class_separation: 1.0,
        latent_noise: 0.35,
        unique_signal: 0.45,
        sensor_noise: 0.3,
        seed,
    }
}

/// 27 sensors / 7 classes / 1941 rows; largest planted group of 10 gives a
/// minimum ensemble of 6.
pub fn steel_plates_like(seed: u64) -> SynthSpec {
    SynthSpec {
        sensors: 27,
        classes: 7,
        rows: 1941,
        groups: vec![
            (0..10).collect(),
            (10..17).collect(),
            (17..21).collect(),
            (21..24).collect(),
            (24..27).collect(),
        ],
        class_separation: 1.0,
        latent_noise: 0.35,
        unique_signal: 0.45,
        sensor_noise: 0.3,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::{correlation_matrix, form_groups};
    use std::collections::BTreeSet;

    fn small_beans(rows: usize, seed: u64) -> SynthSpec {
        SynthSpec {
            rows,
            ..beans_like(seed)
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = small_beans(200, 3);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn preset_shapes() {
        let spec = beans_like(0);
        assert_eq!(spec.sensors, 16);
        assert_eq!(spec.classes, 7);
        assert_eq!(spec.rows, 13_611);
        assert_eq!(spec.groups.iter().map(Vec::len).sum::<usize>(), 16);
        spec.validate().unwrap();
        wall_following_like(0).validate().unwrap();
        steel_plates_like(0).validate().unwrap();
    }

    #[test]
    fn planted_groups_are_recovered() {
        let data = generate(&small_beans(3000, 7)).unwrap();
        let matrix = correlation_matrix(&data).unwrap();
        let plan = form_groups(&matrix).unwrap();
        let found: BTreeSet<BTreeSet<usize>> = plan
            .groups
            .iter()
            .map(|g| g.sensors.iter().map(|s| s.index()).collect())
            .collect();
        let planted: BTreeSet<BTreeSet<usize>> = small_beans(3000, 7)
            .groups
            .iter()
            .map(|g| g.iter().copied().collect())
            .collect();
        assert_eq!(found, planted);
    }

    #[test]
    fn within_group_correlation_is_strong_somewhere() {
        let data = generate(&small_beans(3000, 7)).unwrap();
        let matrix = correlation_matrix(&data).unwrap();
        // group {H,B,D,C,A,G} = indices {7,1,3,2,0,6}
        let group = [7usize, 1, 3, 2, 0, 6];
        let mut best: f64 = -1.0;
        for (k, &i) in group.iter().enumerate() {
            for &j in &group[k + 1..] {
                best = best.max(matrix.get(i, j));
            }
        }
        assert!(best >= 0.76, "strongest in-group pair only reached {best}");
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = small_beans(10, 0);
        spec.groups[0][0] = 99;
        assert!(generate(&spec).is_err());
        let mut spec = small_beans(10, 0);
        spec.groups.pop();
        assert!(generate(&spec).is_err());
    }
}
