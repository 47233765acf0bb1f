//! CSV ingestion, label mapping, seeded splitting and standardization.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("row {row}: {message}")]
    MalformedRow { row: u64, message: String },
    #[error("row {row}: unknown label token {token:?}")]
    UnknownLabel { row: u64, token: String },
    #[error("schema: {0}")]
    Schema(String),
    #[error("dataset has {0} instances; at least {MIN_INSTANCES} are needed to split")]
    TooFewInstances(usize),
    #[error("dataset is empty")]
    Empty,
}

pub const MIN_INSTANCES: usize = 10;

/// A column chosen by zero-based index, by header name, or `"last"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ColumnRef {
    Index(usize),
    Name(String),
}

impl ColumnRef {
    pub fn last() -> Self {
        ColumnRef::Name("last".into())
    }

    fn resolve(&self, header: Option<&[String]>, width: usize) -> Result<usize, DataError> {
        match self {
            ColumnRef::Index(i) if *i < width => Ok(*i),
            ColumnRef::Index(i) => Err(DataError::Schema(format!(
                "column index {i} out of range for {width} columns"
            ))),
            ColumnRef::Name(n) if n == "last" => width
                .checked_sub(1)
                .ok_or_else(|| DataError::Schema("no columns".into())),
            ColumnRef::Name(n) => header
                .ok_or_else(|| {
                    DataError::Schema(format!("column {n:?} named but the file has no header"))
                })?
                .iter()
                .position(|h| h == n)
                .ok_or_else(|| DataError::Schema(format!("no column named {n:?}"))),
        }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSchema {
    pub name: String,
    pub label_column: ColumnRef,
    pub positive_label: String,
    pub negative_label: String,
    #[serde(default)]
    pub drop_columns: Vec<ColumnRef>,
    #[serde(default = "default_true")]
    pub has_header: bool,
}

fn default_true() -> bool {
    true
}

impl DatasetSchema {
    pub fn validate(&self) -> Result<(), DataError> {
        if self.positive_label.trim() == self.negative_label.trim() {
            return Err(DataError::Schema(
                "positive and negative label tokens must differ".into(),
            ));
        }
        Ok(())
    }

    fn label_of(&self, token: &str) -> Option<u8> {
        let token = token.trim();
        if token == self.positive_label {
            return Some(1);
        }
        if token == self.negative_label {
            return Some(0);
        }
        let value: f64 = token.parse().ok()?;
        let matches = |t: &str| t.parse::<f64>().is_ok_and(|v| v == value);
        if matches(&self.positive_label) {
            Some(1)
        } else if matches(&self.negative_label) {
            Some(0)
        } else {
            None
        }
    }
}

/// The four bundled binary-classification datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinDataset {
    Heart,
    Pima,
    Sonar,
    Wbcd,
}

impl BuiltinDataset {
    pub const ALL: [BuiltinDataset; 4] = [
        BuiltinDataset::Heart,
        BuiltinDataset::Pima,
        BuiltinDataset::Sonar,
        BuiltinDataset::Wbcd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinDataset::Heart => "heart",
            BuiltinDataset::Pima => "pima",
            BuiltinDataset::Sonar => "sonar",
            BuiltinDataset::Wbcd => "wbcd",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            BuiltinDataset::Heart => "heart.csv",
            BuiltinDataset::Pima => "pima.csv",
            BuiltinDataset::Sonar => "sonar.csv",
            BuiltinDataset::Wbcd => "wdbc.csv",
        }
    }

    pub fn schema(self) -> DatasetSchema {
        let s =
            |label: ColumnRef, pos: &str, neg: &str, drop: Vec<ColumnRef>, header| DatasetSchema {
                name: self.name().into(),
                label_column: label,
                positive_label: pos.into(),
                negative_label: neg.into(),
                drop_columns: drop,
                has_header: header,
            };
        match self {
            BuiltinDataset::Heart => s(ColumnRef::Name("target".into()), "1", "0", vec![], true),
            BuiltinDataset::Pima => s(ColumnRef::Name("outcome".into()), "1", "0", vec![], true),
            BuiltinDataset::Sonar => s(ColumnRef::last(), "M", "R", vec![], false),
            BuiltinDataset::Wbcd => s(
                ColumnRef::Name("diagnosis".into()),
                "M",
                "B",
                vec![ColumnRef::Name("id".into())],
                true,
            ),
        }
    }

    /// Numeric feature count after the label and identifier columns are removed.
    pub fn n_features(self) -> usize {
        match self {
            BuiltinDataset::Heart => 13,
            BuiltinDataset::Pima => 8,
            BuiltinDataset::Sonar => 60,
            BuiltinDataset::Wbcd => 30,
        }
    }

    pub fn n_instances(self) -> usize {
        match self {
            BuiltinDataset::Heart => 303,
            BuiltinDataset::Pima => 768,
            BuiltinDataset::Sonar => 208,
            BuiltinDataset::Wbcd => 569,
        }
    }

    /// Hidden-layer count used for this dataset's network.
    pub fn hidden_layers(self) -> usize {
        match self {
            BuiltinDataset::Heart | BuiltinDataset::Wbcd => 1,
            BuiltinDataset::Pima | BuiltinDataset::Sonar => 3,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == name)
    }

    /// Loads `file_name()` from `dir`.
    pub fn load(self, dir: impl AsRef<Path>) -> Result<Dataset, DataError> {
        load_csv(dir.as_ref().join(self.file_name()), &self.schema())
    }

    /// Loads the copy shipped in the repository's `data/` directory.
    pub fn load_bundled(self) -> Result<Dataset, DataError> {
        self.load(bundled_data_dir())
    }
}

/// The repository's `data/` directory, resolved at compile time.
pub fn bundled_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: Matrix,
    pub labels: Vec<u8>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text, schema)
}

/// Same as [`load_csv`] for in-memory text.
pub fn parse_csv(text: &str, schema: &DatasetSchema) -> Result<Dataset, DataError> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(schema.has_header)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header: Option<Vec<String>> = if schema.has_header {
        let h = reader.headers().map_err(|e| DataError::MalformedRow {
            row: 1,
            message: e.to_string(),
        })?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut keep: Option<Vec<usize>> = None;
    let mut label_idx = 0;

    for record in reader.records() {
        let record = record.map_err(|e| DataError::MalformedRow {
            row: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if keep.is_none() {
            let width = record.len();
            label_idx = schema.label_column.resolve(header.as_deref(), width)?;
            let mut dropped = vec![label_idx];
            for c in &schema.drop_columns {
                dropped.push(c.resolve(header.as_deref(), width)?);
            }
            keep = Some((0..width).filter(|i| !dropped.contains(i)).collect());
        }
        let columns = keep.as_ref().expect("set above");
        let token = &record[label_idx];
        let label = schema
            .label_of(token)
            .ok_or_else(|| DataError::UnknownLabel {
                row: line,
                token: token.to_string(),
            })?;
        let mut row = Vec::with_capacity(columns.len());
        for &c in columns {
            let field = &record[c];
            let value: f64 = field.parse().map_err(|_| DataError::MalformedRow {
                row: line,
                message: format!("column {c}: {field:?} is not a number"),
            })?;
            if !value.is_finite() {
                return Err(DataError::MalformedRow {
                    row: line,
                    message: format!("column {c}: non-finite value"),
                });
            }
            row.push(value);
        }
        rows.push(row);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(Dataset {
        name: schema.name.clone(),
        features: Matrix::from_rows(&rows),
        labels,
    })
}

/// One part of a split. `indices` are row numbers in the source dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub features: Matrix,
    pub labels: Vec<u8>,
    pub indices: Vec<usize>,
}

impl Part {
    fn take(ds: &Dataset, indices: &[usize]) -> Part {
        Part {
            features: ds.features.select_rows(indices),
            labels: indices.iter().map(|&i| ds.labels[i]).collect(),
            indices: indices.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Part,
    pub validation: Part,
    pub test: Part,
    pub seed: u64,
}

/// Seeded permutation; the last `floor(n * test_fraction)` rows become the
/// test part and the last `floor(rest * val_fraction_of_train)` of the
/// remainder the validation part.
pub fn shuffle_split(
    ds: &Dataset,
    test_fraction: f64,
    val_fraction_of_train: f64,
    seed: u64,
) -> Result<Split, DataError> {
    let n = ds.len();
    if n < MIN_INSTANCES {
        return Err(DataError::TooFewInstances(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let n_test = (n as f64 * test_fraction).floor() as usize;
    let rest = n - n_test;
    let n_val = (rest as f64 * val_fraction_of_train).floor() as usize;
    let n_train = rest - n_val;

    Ok(Split {
        train: Part::take(ds, &order[..n_train]),
        validation: Part::take(ds, &order[n_train..rest]),
        test: Part::take(ds, &order[rest..]),
        seed,
    })
}

/// Per-feature affine transform fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// 1.0 for features whose spread is below `1e-12` (centered only).
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(features: &Matrix) -> Self {
        let n = features.rows() as f64;
        let cols = features.cols();
        let mut mean = vec![0.0; cols];
        for i in 0..features.rows() {
            for (m, v) in mean.iter_mut().zip(features.row(i)) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; cols];
        for i in 0..features.rows() {
            for ((s, v), m) in var.iter_mut().zip(features.row(i)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd < 1e-12 {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, features: &Matrix) -> Matrix {
        let mut out = features.clone();
        for i in 0..out.rows() {
            for ((v, m), s) in out.row_mut(i).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = (*v - m) / s;
            }
        }
        out
    }
}

/// Z-scores every part with statistics from the training part only.
pub fn standardize(split: &Split) -> Split {
    let st = Standardizer::fit(&split.train.features);
    let part = |p: &Part| Part {
        features: st.apply(&p.features),
        labels: p.labels.clone(),
        indices: p.indices.clone(),
    };
    Split {
        train: part(&split.train),
        validation: part(&split.validation),
        test: part(&split.test),
        seed: split.seed,
    }
}

/// How a dataset is turned into a [`Split`] for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataPrep {
    pub test_fraction: f64,
    pub validation_fraction: f64,
    pub standardize: bool,
    /// Fixed split seed shared by every run; `None` reuses the run seed.
    pub split_seed: Option<u64>,
}

impl Default for DataPrep {
    fn default() -> Self {
        DataPrep {
            test_fraction: 0.25,
            validation_fraction: 0.2,
            standardize: true,
            split_seed: None,
        }
    }
}

impl DataPrep {
    pub fn validate(&self) -> Result<(), DataError> {
        let open = |f: f64| f > 0.0 && f < 1.0;
        if !open(self.test_fraction) || !open(self.validation_fraction) {
            return Err(DataError::Schema(
                "test_fraction and validation_fraction must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }

    pub fn prepare(&self, ds: &Dataset, run_seed: u64) -> Result<Split, DataError> {
        self.validate()?;
        let seed = self.split_seed.unwrap_or(run_seed);
        let split = shuffle_split(ds, self.test_fraction, self.validation_fraction, seed)?;
        if split.train.is_empty() || split.validation.is_empty() || split.test.is_empty() {
            return Err(DataError::TooFewInstances(ds.len()));
        }
        Ok(if self.standardize {
            standardize(&split)
        } else {
            split
        })
    }
}
