//! JSON run configuration shared by the command-line tools.
//!
//! Relative paths are resolved against the directory holding the config file.
//! Every key except `dataset` is optional; defaults are the published
//! experiment settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{BuiltinDataset, DataError, DataPrep, Dataset, DatasetSchema};
use crate::evolution::{EvolutionConfig, RunSettings};
use crate::grammar::{default_grammar, load_grammar, Grammar, GrammarError, MappingLimits};
use crate::metrics::FitnessMode;
use crate::nn::{NetworkConfig, OutputActivation};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("config: {0}")]
    Invalid(String),
    #[error("grammar {path}: {source}")]
    Grammar { path: PathBuf, source: GrammarError },
    #[error("dataset: {0}")]
    Data(#[from] DataError),
}

/// A builtin schema name (`heart`, `pima`, `sonar`, `wbcd`) or a full schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemaRef {
    Builtin(String),
    Custom(DatasetSchema),
}

impl SchemaRef {
    pub fn builtin(&self) -> Result<Option<BuiltinDataset>, ConfigError> {
        match self {
            SchemaRef::Custom(_) => Ok(None),
            SchemaRef::Builtin(name) => {
                BuiltinDataset::from_name(name).map(Some).ok_or_else(|| {
                    ConfigError::Invalid(format!(
                    "unknown builtin schema {name:?}; expected one of heart, pima, sonar, wbcd \
                     or an object with label_column, positive_label and negative_label"
                ))
                })
            }
        }
    }

    pub fn schema(&self) -> Result<DatasetSchema, ConfigError> {
        match self {
            SchemaRef::Custom(s) => Ok(s.clone()),
            SchemaRef::Builtin(_) => Ok(self.builtin()?.expect("builtin").schema()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSource {
    pub path: PathBuf,
    pub schema: SchemaRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub elitism_size: usize,
    pub crossover_events_per_generation: usize,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        let d = EvolutionConfig::default();
        EvolutionParams {
            population_size: d.population_size,
            generations: d.generations,
            crossover_rate: d.crossover_rate,
            mutation_rate: d.mutation_rate,
            tournament_size: d.tournament_size,
            elitism_size: d.elitism_size,
            crossover_events_per_generation: d.crossover_events_per_generation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingParams {
    pub nodes_per_hidden: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub early_stop_patience: usize,
    pub early_stop_min_delta: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainingParams {
    fn default() -> Self {
        let d = NetworkConfig::default();
        TrainingParams {
            nodes_per_hidden: d.nodes_per_hidden,
            max_epochs: d.max_epochs,
            batch_size: d.batch_size,
            early_stop_patience: d.early_stop_patience,
            early_stop_min_delta: d.early_stop_min_delta,
            learning_rate: d.learning_rate,
            beta1: d.beta1,
            beta2: d.beta2,
            epsilon: d.epsilon,
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_baseline_runs() -> usize {
    10
}

fn default_test_fraction() -> f64 {
    DataPrep::default().test_fraction
}

fn default_validation_fraction() -> f64 {
    DataPrep::default().validation_fraction
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetSource,
    /// Required for custom schemas; builtin schemas supply their own.
    #[serde(default)]
    pub hidden_layers: Option<usize>,
    #[serde(default)]
    pub evolution: EvolutionParams,
    #[serde(default)]
    pub network: TrainingParams,
    #[serde(default)]
    pub limits: MappingLimits,
    #[serde(default)]
    pub fitness_mode: FitnessMode,
    #[serde(default)]
    pub output_activation: OutputActivation,
    #[serde(default = "default_true")]
    pub standardize: bool,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_validation_fraction")]
    pub validation_fraction: f64,
    /// Freezes the data split across runs; otherwise `seed` is used.
    #[serde(default)]
    pub split_seed: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_baseline_runs")]
    pub baseline_runs: usize,
    /// BNF grammar file; the builtin grammar when absent.
    #[serde(default)]
    pub grammar: Option<PathBuf>,
    /// Left out of the echoed config so artifacts do not depend on where they
    /// were written.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

/// A config with its data and grammar loaded and every setting checked.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub config: RunConfig,
    pub dataset: Dataset,
    pub grammar: Grammar,
    pub settings: RunSettings,
    /// `None` when neither the config nor the caller named one.
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Json {
            path: origin.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn hidden_layers(&self) -> Result<usize, ConfigError> {
        match (self.hidden_layers, self.dataset.schema.builtin()?) {
            (Some(h), _) => Ok(h),
            (None, Some(b)) => Ok(b.hidden_layers()),
            (None, None) => Err(ConfigError::Invalid(
                "hidden_layers is required with a custom dataset schema".into(),
            )),
        }
    }

    pub fn data_prep(&self) -> DataPrep {
        DataPrep {
            test_fraction: self.test_fraction,
            validation_fraction: self.validation_fraction,
            standardize: self.standardize,
            split_seed: self.split_seed,
        }
    }

    pub fn evolution_config(&self) -> EvolutionConfig {
        let e = &self.evolution;
        EvolutionConfig {
            population_size: e.population_size,
            generations: e.generations,
            crossover_rate: e.crossover_rate,
            mutation_rate: e.mutation_rate,
            tournament_size: e.tournament_size,
            elitism_size: e.elitism_size,
            crossover_events_per_generation: e.crossover_events_per_generation,
            fitness_mode: self.fitness_mode,
            seed: self.seed,
        }
    }

    pub fn network_config(&self, n_features: usize) -> Result<NetworkConfig, ConfigError> {
        let t = &self.network;
        Ok(NetworkConfig {
            n_features,
            hidden_layers: self.hidden_layers()?,
            nodes_per_hidden: t.nodes_per_hidden,
            max_epochs: t.max_epochs,
            batch_size: t.batch_size,
            early_stop_patience: t.early_stop_patience,
            early_stop_min_delta: t.early_stop_min_delta,
            learning_rate: t.learning_rate,
            beta1: t.beta1,
            beta2: t.beta2,
            epsilon: t.epsilon,
            output_activation: self.output_activation,
        })
    }

    /// Loads the dataset and grammar (paths relative to `base_dir`) and
    /// validates every setting. Nothing is written.
    pub fn resolve(&self, base_dir: &Path) -> Result<ResolvedConfig, ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        let schema = self.dataset.schema.schema()?;
        schema.validate()?;
        let prep = self.data_prep();
        prep.validate()?;
        self.limits.validate().map_err(ConfigError::Invalid)?;
        let evolution = self.evolution_config();
        evolution.validate().map_err(|e| invalid(&e))?;
        if self.baseline_runs == 0 {
            return Err(ConfigError::Invalid(
                "baseline_runs must be at least 1".into(),
            ));
        }
        // checks everything except the feature count before touching the data
        self.network_config(1)?
            .validate()
            .map_err(|e| invalid(&e))?;

        let grammar = match &self.grammar {
            None => default_grammar(),
            Some(p) => {
                let path = base_dir.join(p);
                let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
                    path: path.clone(),
                    source,
                })?;
                load_grammar(&text).map_err(|source| ConfigError::Grammar { path, source })?
            }
        };
        let dataset = crate::data::load_csv(base_dir.join(&self.dataset.path), &schema)?;
        let network = self.network_config(dataset.n_features())?;
        let split_size = {
            let n = dataset.len();
            let rest = n - (n as f64 * prep.test_fraction).floor() as usize;
            rest - (rest as f64 * prep.validation_fraction).floor() as usize
        };
        if network.batch_size > split_size {
            return Err(ConfigError::Invalid(format!(
                "batch_size {} exceeds the {split_size}-row training part",
                network.batch_size
            )));
        }

        Ok(ResolvedConfig {
            output_dir: self.output_dir.as_ref().map(|p| base_dir.join(p)),
            config: self.clone(),
            dataset,
            grammar,
            settings: RunSettings {
                evolution,
                network,
                limits: self.limits,
                data: prep,
            },
        })
    }
}

/// Reads and resolves a config file.
pub fn load_run_config(path: impl AsRef<Path>) -> Result<ResolvedConfig, ConfigError> {
    let path = path.as_ref();
    let config = RunConfig::load(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    config.resolve(base)
}
