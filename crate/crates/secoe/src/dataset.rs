//! Tabular sensor datasets: CSV loading, alphabetical sensor naming,
//! deterministic train/test splitting, and train-set standardization.
//!
//! Sensors are the feature columns of the table; they are renamed to single
//! letters (`A`-`Z`, then `a`-`z`) in original column order so failure masks
//! and feature subsets can be written compactly.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sensor names run A-Z then a-z, so at most 52 columns are addressable.
pub const MAX_SENSORS: usize = 52;

const NAME_ALPHABET: &[u8; 52] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

/// A feature column, identified by its 0-based index in the original table.
///
/// The single-letter display name is a pure function of the index: index 0 is
/// `A`, 25 is `Z`, 26 is `a`, 51 is `z`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SensorId(usize);

impl SensorId {
    pub fn new(index: usize) -> Result<Self> {
        if index >= MAX_SENSORS {
            return Err(Error::InvalidArgument(format!(
                "sensor index {index} exceeds the {MAX_SENSORS}-letter naming range"
            )));
        }
        Ok(SensorId(index))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }

    #[inline]
    pub fn name(self) -> char {
        NAME_ALPHABET[self.0] as char
    }

    pub fn from_name(c: char) -> Option<Self> {
        NAME_ALPHABET.iter().position(|&b| b as char == c).map(SensorId)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => SensorId::from_name(c)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown sensor name {s:?}"))),
            _ => Err(Error::InvalidArgument(format!(
                "sensor names are single letters, got {s:?}"
            ))),
        }
    }

    /// The first `count` sensors, in index order.
    pub fn first_n(count: usize) -> Result<Vec<SensorId>> {
        (0..count).map(SensorId::new).collect()
    }
}

impl fmt::Display for SensorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Serialize for SensorId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name().to_string())
    }
}

impl<'de> Deserialize<'de> for SensorId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        SensorId::parse(&s).map_err(D::Error::custom)
    }
}

/// A fully loaded table: real-valued sensor readings plus one categorical
/// label per row. Failures are never stored here; masks are applied at
/// prediction time.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<usize>,
    sensor_names: Vec<SensorId>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, deriving sensor names from the column count.
    /// Labels are 0-based indices into `class_names`.
    pub fn new(features: Matrix, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if features.n_rows() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature rows but {} labels",
                features.n_rows(),
                labels.len()
            )));
        }
        if !features.is_finite() {
            return Err(Error::InvalidArgument(
                "feature matrix contains non-finite values".into(),
            ));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidArgument(format!(
                "label index {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        let sensor_names = SensorId::first_n(features.n_cols())?;
        Ok(Dataset {
            features,
            labels,
            sensor_names,
            class_names,
        })
    }

    #[inline]
    pub fn features(&self) -> &Matrix {
        &self.features
    }

    #[inline]
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    #[inline]
    pub fn sensors(&self) -> &[SensorId] {
        &self.sensor_names
    }

    #[inline]
    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    #[inline]
    pub fn n_samples(&self) -> usize {
        self.features.n_rows()
    }

    #[inline]
    pub fn n_sensors(&self) -> usize {
        self.features.n_cols()
    }

    #[inline]
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    fn take_rows(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            sensor_names: self.sensor_names.clone(),
            class_names: self.class_names.clone(),
        }
    }
}

/// How to locate the label column in a CSV file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    /// 0-based column index in the original file.
    Index(usize),
}

impl FromStr for LabelColumn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
            Ok(LabelColumn::Index(s.parse().map_err(|_| {
                Error::InvalidArgument(format!("label column index {s:?} out of range"))
            })?))
        } else if s.is_empty() {
            Err(Error::InvalidArgument("label column may not be empty".into()))
        } else {
            Ok(LabelColumn::Name(s.to_string()))
        }
    }
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Name(n) => write!(f, "{n}"),
            LabelColumn::Index(i) => write!(f, "#{i}"),
        }
    }
}

/// Deterministic train/test split parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "train fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        Ok(SplitSpec {
            train_fraction,
            seed,
        })
    }
}

/// Per-feature standardization parameters, fitted on training rows only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl StandardizationParams {
    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// Standardizes a single row in place.
    pub fn apply_row(&self, row: &mut [f64]) {
        debug_assert_eq!(row.len(), self.means.len());
        for (v, (m, s)) in row.iter_mut().zip(self.means.iter().zip(&self.stds)) {
            *v = (*v - m) / s;
        }
    }
}

/// Loads a UTF-8, comma-delimited CSV with one header row. Every non-label
/// column must parse as a finite real number; sensors are renamed
/// alphabetically by original column order and classes are numbered in order
/// of first appearance.
pub fn load_csv(path: &Path, label: &LabelColumn) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => Error::Csv {
                path: path.into(),
                msg: e.to_string(),
            },
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv {
            path: path.into(),
            msg: e.to_string(),
        })?
        .iter()
        .map(str::to_string)
        .collect();

    let label_idx = match label {
        LabelColumn::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::LabelColumnMissing(format!("{name:?}")))?,
        LabelColumn::Index(i) => {
            if *i >= headers.len() {
                return Err(Error::LabelColumnMissing(format!(
                    "#{i} (file has {} columns)",
                    headers.len()
                )));
            }
            *i
        }
    };

    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&c| c != label_idx).collect();
    if feature_cols.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} has no feature columns besides the label",
            path.display()
        )));
    }
    if feature_cols.len() > MAX_SENSORS {
        return Err(Error::InvalidArgument(format!(
            "{} feature columns exceed the {MAX_SENSORS}-sensor naming range",
            feature_cols.len()
        )));
    }

    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();

    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv {
            path: path.into(),
            msg: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::CsvCell {
                path: path.into(),
                row: row_idx + 1,
                col: record.len(),
                msg: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        for &c in &feature_cols {
            let cell = record.get(c).unwrap_or("").trim();
            let value: f64 = cell.parse().map_err(|_| Error::CsvCell {
                path: path.into(),
                row: row_idx + 1,
                col: c + 1,
                msg: format!("{cell:?} is not a real number"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvCell {
                    path: path.into(),
                    row: row_idx + 1,
                    col: c + 1,
                    msg: format!("{cell:?} is not finite"),
                });
            }
            data.push(value);
        }
        let class = record.get(label_idx).unwrap_or("").trim();
        if class.is_empty() {
            return Err(Error::CsvCell {
                path: path.into(),
                row: row_idx + 1,
                col: label_idx + 1,
                msg: "empty label".into(),
            });
        }
        let class_id = match class_names.iter().position(|c| c == class) {
            Some(id) => id,
            None => {
                class_names.push(class.to_string());
                class_names.len() - 1
            }
        };
        labels.push(class_id);
    }

    if labels.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{} contains no data rows",
            path.display()
        )));
    }

    let features = Matrix::from_flat(labels.len(), feature_cols.len(), data)?;
    Dataset::new(features, labels, class_names)
}

/// Writes a dataset back out in the accepted CSV format (sensor letters as
/// headers, label column last, named `label`).
pub fn write_csv(dataset: &Dataset, path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Csv {
        path: path.into(),
        msg: e.to_string(),
    })?;
    let mut header: Vec<String> = dataset.sensors().iter().map(|s| s.to_string()).collect();
    header.push("label".into());
    writer.write_record(&header).map_err(|e| Error::Csv {
        path: path.into(),
        msg: e.to_string(),
    })?;
    for (row, &label) in dataset.features().rows_iter().zip(dataset.labels()) {
        let mut record: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        record.push(dataset.class_names()[label].clone());
        writer.write_record(&record).map_err(|e| Error::Csv {
            path: path.into(),
            msg: e.to_string(),
        })?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Splits rows into disjoint train/test partitions. The shuffle is a
/// seed-determined permutation; the train partition receives
/// `round(train_fraction * n)` rows. Row order within each half follows the
/// original dataset.
pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    SplitSpec::new(spec.train_fraction, spec.seed)?;
    let n = dataset.n_samples();
    let n_train = (spec.train_fraction * n as f64).round() as usize;
    if n_train == 0 {
        return Err(Error::DegenerateSplit {
            fraction: spec.train_fraction,
            side: "train",
            n,
        });
    }
    if n_train >= n {
        return Err(Error::DegenerateSplit {
            fraction: spec.train_fraction,
            side: "test",
            n,
        });
    }

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    indices.shuffle(&mut rng);

    let mut train_idx = indices[..n_train].to_vec();
    let mut test_idx = indices[n_train..].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    Ok((dataset.take_rows(&train_idx), dataset.take_rows(&test_idx)))
}

/// Fits per-feature means and population standard deviations on training
/// rows. Zero-variance columns get std 1.0 so they standardize to 0.
pub fn fit_standardizer(train: &Dataset) -> Result<StandardizationParams> {
    let features = train.features();
    let n = features.n_rows();
    if n == 0 {
        return Err(Error::EmptyInput("cannot standardize an empty dataset".into()));
    }
    let d = features.n_cols();
    let mut means = vec![0.0; d];
    for row in features.rows_iter() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut stds = vec![0.0; d];
    for row in features.rows_iter() {
        for ((s, v), m) in stds.iter_mut().zip(row).zip(&means) {
            let delta = v - m;
            *s += delta * delta;
        }
    }
    for s in &mut stds {
        *s = (*s / n as f64).sqrt();
        if !(*s > 1e-12) {
            *s = 1.0; // degenerate column
        }
    }
    Ok(StandardizationParams { means, stds })
}

/// Applies `(x - mean) / std` column-wise.
pub fn apply_standardizer(params: &StandardizationParams, matrix: &Matrix) -> Result<Matrix> {
    if matrix.n_cols() != params.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} columns, standardizer expects {}",
            matrix.n_cols(),
            params.len()
        )));
    }
    let mut out = matrix.clone();
    for i in 0..out.n_rows() {
        params.apply_row(out.row_mut(i));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::io::Write;

    fn csv_file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    fn toy_dataset(n: usize) -> Dataset {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64, (2 * i) as f64]).collect();
        let labels = (0..n).map(|i| i % 2).collect();
        Dataset::new(
            Matrix::from_rows(rows).unwrap(),
            labels,
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn sensor_names_follow_the_alphabet() {
        assert_eq!(SensorId::new(0).unwrap().name(), 'A');
        assert_eq!(SensorId::new(25).unwrap().name(), 'Z');
        assert_eq!(SensorId::new(26).unwrap().name(), 'a');
        assert_eq!(SensorId::new(51).unwrap().name(), 'z');
        assert!(SensorId::new(52).is_err());
        assert_eq!(SensorId::from_name('H'), Some(SensorId(7)));
        assert_eq!(SensorId::parse("P").unwrap().index(), 15);
        assert!(SensorId::parse("AB").is_err());
    }

    #[test]
    fn minimal_two_column_file() {
        let f = csv_file("temp,class\n1.0,x\n2.0,y\n3.0,x\n");
        let ds = load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap();
        assert_eq!(ds.n_samples(), 3);
        assert_eq!(ds.n_sensors(), 1);
        assert_eq!(ds.sensors()[0].name(), 'A');
        assert_eq!(ds.class_names(), &["x".to_string(), "y".to_string()]);
        assert_eq!(ds.labels(), &[0, 1, 0]);
    }

    #[test]
    fn sixteen_features_rename_a_through_p() {
        let mut header: Vec<String> = (0..16).map(|i| format!("f{i}")).collect();
        header.push("Class".into());
        let mut content = header.join(",") + "\n";
        for r in 0..3 {
            let mut row: Vec<String> = (0..16).map(|c| format!("{}", r * 16 + c)).collect();
            row.push(format!("k{r}"));
            content += &(row.join(",") + "\n");
        }
        let f = csv_file(&content);
        let ds = load_csv(f.path(), &LabelColumn::Name("Class".into())).unwrap();
        let names: String = ds.sensors().iter().map(|s| s.name()).collect();
        assert_eq!(names, "ABCDEFGHIJKLMNOP");
        assert_eq!(ds.n_classes(), 3);
    }

    #[test]
    fn twenty_four_features_rename_a_through_x() {
        let mut header: Vec<String> = (0..24).map(|i| format!("US{i}")).collect();
        header.insert(0, "Move".into());
        let mut content = header.join(",") + "\n";
        for r in 0..2 {
            let mut row: Vec<String> = (0..24).map(|c| format!("{}.5", r + c)).collect();
            row.insert(0, "fwd".into());
            content += &(row.join(",") + "\n");
        }
        let f = csv_file(&content);
        // label addressed by original column index, here column 0
        let ds = load_csv(f.path(), &LabelColumn::Index(0)).unwrap();
        let names: String = ds.sensors().iter().map(|s| s.name()).collect();
        assert_eq!(names, "ABCDEFGHIJKLMNOPQRSTUVWX");
        assert_eq!(ds.n_classes(), 1);
    }

    #[test]
    fn parse_errors_carry_row_and_column() {
        let f = csv_file("a,b,class\n1.0,2.0,x\n1.0,oops,y\n");
        let err = load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap_err();
        match err {
            Error::CsvCell { row, col, .. } => {
                assert_eq!(row, 2);
                assert_eq!(col, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn missing_label_column_and_empty_file() {
        let f = csv_file("a,b\n1,2\n");
        assert!(matches!(
            load_csv(f.path(), &LabelColumn::Name("class".into())),
            Err(Error::LabelColumnMissing(_))
        ));
        let f = csv_file("a,class\n");
        assert!(matches!(
            load_csv(f.path(), &LabelColumn::Name("class".into())),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let ds = toy_dataset(5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.csv");
        write_csv(&ds, &path).unwrap();
        let reloaded = load_csv(&path, &LabelColumn::Name("label".into())).unwrap();
        assert_eq!(reloaded, ds);
    }

    #[test]
    fn split_sizes_and_disjointness() {
        let ds = toy_dataset(100);
        let spec = SplitSpec::new(0.85, 7).unwrap();
        let (train, test) = split(&ds, &spec).unwrap();
        assert_eq!(train.n_samples(), 85);
        assert_eq!(test.n_samples(), 15);
        assert_eq!(train.class_names(), test.class_names());
        // disjoint: every original row appears exactly once across both halves
        let mut seen: Vec<f64> = train
            .features()
            .column(0)
            .into_iter()
            .chain(test.features().column(0))
            .collect();
        seen.sort_by(f64::total_cmp);
        let expected: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn split_matches_dry_beans_row_arithmetic() {
        // round(0.85 * 13611) = 11569, leaving 2042 for test
        let ds = toy_dataset(13611);
        let (train, test) = split(&ds, &SplitSpec::new(0.85, 0).unwrap()).unwrap();
        assert_eq!(train.n_samples(), 11569);
        assert_eq!(test.n_samples(), 2042);
    }

    #[test]
    fn split_is_deterministic() {
        let ds = toy_dataset(60);
        let spec = SplitSpec::new(0.75, 1234).unwrap();
        let (tr1, te1) = split(&ds, &spec).unwrap();
        let (tr2, te2) = split(&ds, &spec).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(te1, te2);
    }

    #[test]
    fn degenerate_split_rejected() {
        let ds = toy_dataset(3);
        assert!(split(&ds, &SplitSpec { train_fraction: 0.01, seed: 0 }).is_err());
        assert!(split(&ds, &SplitSpec { train_fraction: 0.999, seed: 0 }).is_err());
        assert!(split(&ds, &SplitSpec { train_fraction: 1.2, seed: 0 }).is_err());
    }

    #[test]
    fn standardizer_hand_oracle() {
        // column [1,2,3]: mean 2, population std sqrt(2/3)
        let ds = Dataset::new(
            Matrix::from_rows(vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]]).unwrap(),
            vec![0, 0, 0],
            vec!["only".into()],
        )
        .unwrap();
        let params = fit_standardizer(&ds).unwrap();
        assert_relative_eq!(params.means[0], 2.0);
        assert_relative_eq!(params.stds[0], (2.0f64 / 3.0).sqrt(), max_relative = 1e-12);
        // constant column falls back to std 1.0
        assert_relative_eq!(params.means[1], 5.0);
        assert_relative_eq!(params.stds[1], 1.0);
        let standardized = apply_standardizer(&params, ds.features()).unwrap();
        assert_relative_eq!(standardized.get(0, 1), 0.0);
    }

    #[test]
    fn apply_standardizer_pointwise() {
        let params = StandardizationParams {
            means: vec![5.0],
            stds: vec![2.0],
        };
        let m = Matrix::from_rows(vec![vec![7.0], vec![5.0]]).unwrap();
        let out = apply_standardizer(&params, &m).unwrap();
        assert_eq!(out.get(0, 0), 1.0);
        assert_eq!(out.get(1, 0), 0.0);
        let bad = Matrix::zeros(1, 3);
        assert!(apply_standardizer(&params, &bad).is_err());
    }

    #[test]
    fn standardize_then_invert_round_trips() {
        let ds = toy_dataset(20);
        let params = fit_standardizer(&ds).unwrap();
        let std = apply_standardizer(&params, ds.features()).unwrap();
        for i in 0..ds.n_samples() {
            for j in 0..ds.n_sensors() {
                let restored = std.get(i, j) * params.stds[j] + params.means[j];
                assert_relative_eq!(restored, ds.features().get(i, j), epsilon = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn prop_split_partitions_deterministically(
            n in 4usize..200,
            fraction in 0.2f64..0.8,
            seed in 0u64..1000,
        ) {
            let ds = toy_dataset(n);
            let spec = SplitSpec { train_fraction: fraction, seed };
            let (tr1, te1) = split(&ds, &spec).unwrap();
            let (tr2, te2) = split(&ds, &spec).unwrap();
            prop_assert_eq!(&tr1, &tr2);
            prop_assert_eq!(&te1, &te2);
            prop_assert_eq!(tr1.n_samples() + te1.n_samples(), n);
            prop_assert_eq!(tr1.n_samples(), (fraction * n as f64).round() as usize);
        }

        #[test]
        fn prop_standardized_columns_are_centered(rows in proptest::collection::vec(
            proptest::collection::vec(-1000.0f64..1000.0, 3), 2..60)
        ) {
            let n = rows.len();
            let ds = Dataset::new(
                Matrix::from_rows(rows).unwrap(),
                vec![0; n],
                vec!["c".into()],
            ).unwrap();
            let params = fit_standardizer(&ds).unwrap();
            let std = apply_standardizer(&params, ds.features()).unwrap();
            for j in 0..3 {
                let col = std.column(j);
                let mean = col.iter().sum::<f64>() / n as f64;
                prop_assert!(mean.abs() < 1e-9);
                let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                let original = ds.features().column(j);
                let degenerate = original.iter().all(|v| (v - original[0]).abs() < 1e-30);
                if !degenerate {
                    prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
