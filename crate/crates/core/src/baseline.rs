//! Reference network with fixed rectifier activations `max(x, 0)` on the
//! input and hidden layers and a logistic output, trained over several seeds.

use serde::{Deserialize, Serialize};

use crate::data::{DataError, DataPrep, Dataset, Split};
use crate::evolution::SplitSizes;
use crate::expr::ActivationExpr;
use crate::metrics::{compute_metrics, MetricsError, MetricsReport};
use crate::nn::{init_network, NetError, NetworkConfig, OutputActivation, TrainReport};
use crate::seed;

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error("baseline needs at least one run")]
    NoRuns,
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Network(#[from] NetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRun {
    pub seed: u64,
    pub train: TrainReport,
    /// Accuracy on the training part after training.
    pub train_accuracy: f64,
    pub metrics: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub dataset: String,
    pub split: SplitSizes,
    pub split_seed: u64,
    pub runs: Vec<BaselineRun>,
    /// Index into `runs` of the run with the highest test F1 (first on ties).
    pub best_run: usize,
    pub best: MetricsReport,
}

/// The baseline architecture: `network` with its output forced to the
/// logistic function.
pub fn baseline_config(network: &NetworkConfig) -> NetworkConfig {
    NetworkConfig {
        output_activation: OutputActivation::FixedSigmoid,
        ..network.clone()
    }
}

/// Trains one rectifier network on `split` with the given seed.
pub fn train_baseline(
    split: &Split,
    network: &NetworkConfig,
    seed: u64,
) -> Result<BaselineRun, BaselineError> {
    let cfg = baseline_config(network);
    let acts = vec![ActivationExpr::relu(); cfg.n_activations()];
    let mut net = init_network(&cfg, acts, seed)?;
    let train = net.train(&split.train, &split.validation, seed::mix(seed, 1))?;
    let fitted = net.predict_labels(&split.train.features)?;
    let train_accuracy = compute_metrics(&split.train.labels, &fitted)?.accuracy;
    let predicted = net.predict_labels(&split.test.features)?;
    let metrics = compute_metrics(&split.test.labels, &predicted)?;
    Ok(BaselineRun {
        seed,
        train,
        train_accuracy,
        metrics,
    })
}

/// `runs` trainings on one split. The split uses `prep.split_seed`, falling
/// back to `seed`; run `i` trains with `mix(seed, i)`.
pub fn run_baseline(
    dataset: &Dataset,
    network: &NetworkConfig,
    prep: &DataPrep,
    runs: usize,
    seed: u64,
) -> Result<BaselineReport, BaselineError> {
    if runs == 0 {
        return Err(BaselineError::NoRuns);
    }
    let split = prep.prepare(dataset, seed)?;
    let runs = (0..runs as u64)
        .map(|i| train_baseline(&split, network, seed::mix(seed, i)))
        .collect::<Result<Vec<_>, _>>()?;
    let best_run = runs.iter().enumerate().fold(0, |best, (i, r)| {
        if r.metrics.f1 > runs[best].metrics.f1 {
            i
        } else {
            best
        }
    });
    Ok(BaselineReport {
        dataset: dataset.name.clone(),
        split: SplitSizes::from(&split),
        split_seed: split.seed,
        best: runs[best_run].metrics,
        best_run,
        runs,
    })
}
