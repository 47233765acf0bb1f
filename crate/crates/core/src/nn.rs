//! Dense feed-forward binary classifier whose layer activations are
//! [`ActivationExpr`]s.
//!
//! Layout: an input layer `n_features → nodes`, `hidden_layers` layers
//! `nodes → nodes`, and an output layer `nodes → 1`. Each of those
//! `hidden_layers + 2` dense layers has its own activation; in
//! [`OutputActivation::FixedSigmoid`] mode the output layer uses the logistic
//! function instead and only `hidden_layers + 1` expressions are needed.

use std::fmt::Write as _;

use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Part;
use crate::expr::{derivative, evaluate, ActivationExpr, EvalStatus};
use crate::matrix::Matrix;

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` inside the loss.
pub const PROB_EPS: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error("expected {expected} activation functions, got {got}")]
    ActivationCount { expected: usize, got: usize },
    #[error("input has {got} features, network expects {expected}")]
    FeatureMismatch { expected: usize, got: usize },
    #[error("invalid network config: {0}")]
    Config(String),
    #[error("training and validation sets must be non-empty")]
    EmptyData,
    #[error("batch size {batch} exceeds training-set size {n}")]
    BatchTooLarge { batch: usize, n: usize },
    #[error("parameter vector has length {got}, expected {expected}")]
    ParameterCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    #[default]
    Evolved,
    FixedSigmoid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkConfig {
    pub n_features: usize,
    pub hidden_layers: usize,
    pub nodes_per_hidden: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub early_stop_patience: usize,
    pub early_stop_min_delta: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub output_activation: OutputActivation,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            n_features: 1,
            hidden_layers: 1,
            nodes_per_hidden: 8,
            max_epochs: 50,
            batch_size: 4,
            early_stop_patience: 5,
            early_stop_min_delta: 1e-4,
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
            output_activation: OutputActivation::Evolved,
        }
    }
}

impl NetworkConfig {
    pub fn new(n_features: usize, hidden_layers: usize) -> Self {
        NetworkConfig {
            n_features,
            hidden_layers,
            ..Default::default()
        }
    }

    /// Number of evolved expressions this architecture consumes.
    pub fn n_activations(&self) -> usize {
        match self.output_activation {
            OutputActivation::Evolved => self.hidden_layers + 2,
            OutputActivation::FixedSigmoid => self.hidden_layers + 1,
        }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        let bad = |m: &str| Err(NetError::Config(m.to_string()));
        if !(1..=3).contains(&self.hidden_layers) {
            return bad("hidden_layers must be between 1 and 3");
        }
        if self.n_features == 0
            || self.nodes_per_hidden == 0
            || self.max_epochs == 0
            || self.batch_size == 0
            || self.early_stop_patience == 0
        {
            return bad("counts must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("moment decays must lie in [0, 1)");
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 || self.early_stop_min_delta < 0.0 {
            return bad("epsilon must be positive and min_delta non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerActivation {
    Expr(ActivationExpr),
    Logistic,
}

impl LayerActivation {
    pub fn text(&self) -> String {
        match self {
            LayerActivation::Expr(e) => e.to_text(),
            LayerActivation::Logistic => "sigmoid".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `outputs × inputs`
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: LayerActivation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    config: NetworkConfig,
    layers: Vec<Dense>,
}

pub fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Mean binary cross-entropy with clamped probabilities.
pub fn bce_loss(probabilities: &[f64], labels: &[u8]) -> f64 {
    let n = probabilities.len() as f64;
    probabilities
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / n
}

/// Glorot-uniform weights in `[-L, L]`, `L = sqrt(6 / (fan_in + fan_out))`;
/// biases start at zero.
pub fn init_network(
    config: &NetworkConfig,
    activations: Vec<ActivationExpr>,
    seed: u64,
) -> Result<Network, NetError> {
    config.validate()?;
    if activations.len() != config.n_activations() {
        return Err(NetError::ActivationCount {
            expected: config.n_activations(),
            got: activations.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = config.nodes_per_hidden;
    let mut shapes = vec![(config.n_features, nodes)];
    shapes.extend(std::iter::repeat_n((nodes, nodes), config.hidden_layers));
    shapes.push((nodes, 1));

    let mut acts = activations.into_iter().map(LayerActivation::Expr);
    let layers = shapes
        .into_iter()
        .map(|(fan_in, fan_out)| {
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let dist = Uniform::new_inclusive(-limit, limit);
            let data = (0..fan_in * fan_out)
                .map(|_| dist.sample(&mut rng))
                .collect();
            Dense {
                weights: Matrix::from_vec(fan_out, fan_in, data),
                bias: vec![0.0; fan_out],
                activation: acts.next().unwrap_or(LayerActivation::Logistic),
            }
        })
        .collect();
    Ok(Network {
        config: config.clone(),
        layers,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput {
    /// Raw output-layer values; thresholded at 0.5 for labels.
    pub probabilities: Vec<f64>,
    /// Some layer's activation hit a guard (its output was zeroed).
    pub guard_tripped: bool,
    /// Some guard was a NaN/infinity rather than a zero division.
    pub non_finite: bool,
}

struct Trace {
    /// `inputs[l]` is the input matrix of layer `l`; the last entry is the output.
    inputs: Vec<Matrix>,
    pre_activations: Vec<Matrix>,
    guard_tripped: bool,
    non_finite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    #[default]
    None,
    NanLoss,
    NonFiniteWeights,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub final_loss: f64,
    pub loss_history: Vec<f64>,
    pub validation_accuracy: f64,
    pub failed: bool,
    pub failure_kind: FailureKind,
    /// Batches in which a zero-division guard zeroed some layer.
    pub guarded_batches: usize,
    pub total_batches: usize,
}

impl TrainReport {
    pub fn guarded_every_batch(&self) -> bool {
        self.total_batches > 0 && self.guarded_batches == self.total_batches
    }
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Network {
    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn n_parameters(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.as_slice().len() + l.bias.len())
            .sum()
    }

    /// All weights and biases, layer by layer (weights row-major, then bias).
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_parameters());
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<(), NetError> {
        if params.len() != self.n_parameters() {
            return Err(NetError::ParameterCount {
                expected: self.n_parameters(),
                got: params.len(),
            });
        }
        let mut rest = params;
        for l in &mut self.layers {
            let (w, tail) = rest.split_at(l.weights.as_slice().len());
            l.weights.as_mut_slice().copy_from_slice(w);
            let (b, tail) = tail.split_at(l.bias.len());
            l.bias.copy_from_slice(b);
            rest = tail;
        }
        Ok(())
    }

    fn parameters_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.all_finite() && l.bias.iter().all(|b| b.is_finite()))
    }

    fn check_features(&self, batch: &Matrix) -> Result<(), NetError> {
        if batch.cols() != self.config.n_features {
            return Err(NetError::FeatureMismatch {
                expected: self.config.n_features,
                got: batch.cols(),
            });
        }
        Ok(())
    }

    fn run(&self, batch: &Matrix) -> Trace {
        let mut inputs = vec![batch.clone()];
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        let mut guard_tripped = false;
        let mut non_finite = false;
        for layer in &self.layers {
            let a = inputs.last().expect("non-empty");
            let mut z = Matrix::zeros(a.rows(), layer.bias.len());
            for i in 0..a.rows() {
                let row = a.row(i);
                for (j, out) in z.row_mut(i).iter_mut().enumerate() {
                    let w = layer.weights.row(j);
                    *out = layer.bias[j] + row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>();
                }
            }
            let next = match &layer.activation {
                LayerActivation::Logistic => {
                    let mut s = z.clone();
                    s.map_inplace(logistic);
                    s
                }
                LayerActivation::Expr(expr) => {
                    let outcome = evaluate(expr, z.as_slice());
                    match outcome.status {
                        EvalStatus::Ok => {}
                        EvalStatus::ZeroDivision => guard_tripped = true,
                        EvalStatus::NonFinite => {
                            guard_tripped = true;
                            non_finite = true;
                        }
                    }
                    Matrix::from_vec(z.rows(), z.cols(), outcome.values)
                }
            };
            pre_activations.push(z);
            inputs.push(next);
        }
        Trace {
            inputs,
            pre_activations,
            guard_tripped,
            non_finite,
        }
    }

    pub fn forward(&self, batch: &Matrix) -> Result<ForwardOutput, NetError> {
        self.check_features(batch)?;
        let trace = self.run(batch);
        Ok(ForwardOutput {
            probabilities: trace.inputs.last().expect("non-empty").as_slice().to_vec(),
            guard_tripped: trace.guard_tripped,
            non_finite: trace.non_finite,
        })
    }

    /// Loss and its gradient with respect to [`Network::parameters`].
    pub fn loss_and_gradient(
        &self,
        batch: &Matrix,
        labels: &[u8],
    ) -> Result<(f64, Vec<f64>, ForwardOutput), NetError> {
        self.check_features(batch)?;
        let trace = self.run(batch);
        let grad = self.backward(&trace, labels);
        let probabilities = trace.inputs.last().expect("non-empty").as_slice().to_vec();
        let loss = bce_loss(&probabilities, labels);
        Ok((
            loss,
            grad,
            ForwardOutput {
                probabilities,
                guard_tripped: trace.guard_tripped,
                non_finite: trace.non_finite,
            },
        ))
    }

    fn backward(&self, trace: &Trace, labels: &[u8]) -> Vec<f64> {
        let n = labels.len() as f64;
        let output = trace.inputs.last().expect("non-empty");
        // dL/d(output); zero where the clamp is active
        let mut delta = Matrix::from_vec(
            output.rows(),
            1,
            output
                .as_slice()
                .iter()
                .zip(labels)
                .map(|(&p, &y)| {
                    if !(PROB_EPS..=1.0 - PROB_EPS).contains(&p) {
                        0.0
                    } else if y == 1 {
                        -1.0 / (p * n)
                    } else {
                        1.0 / ((1.0 - p) * n)
                    }
                })
                .collect(),
        );

        let mut grads: Vec<Vec<f64>> = vec![Vec::new(); self.layers.len()];
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let z = &trace.pre_activations[l];
            let slope: Vec<f64> = match &layer.activation {
                LayerActivation::Logistic => z
                    .as_slice()
                    .iter()
                    .map(|&v| {
                        let s = logistic(v);
                        s * (1.0 - s)
                    })
                    .collect(),
                // a guarded derivative is all zeros, which stops the gradient here
                LayerActivation::Expr(expr) => derivative(expr, z.as_slice()).values,
            };
            for (d, s) in delta.as_mut_slice().iter_mut().zip(&slope) {
                *d *= s;
            }

            let a = &trace.inputs[l];
            let (outs, ins) = (layer.weights.rows(), layer.weights.cols());
            let mut gw = vec![0.0; outs * ins];
            let mut gb = vec![0.0; outs];
            for i in 0..a.rows() {
                let d_row = delta.row(i);
                let a_row = a.row(i);
                for j in 0..outs {
                    let dj = d_row[j];
                    gb[j] += dj;
                    for (g, x) in gw[j * ins..(j + 1) * ins].iter_mut().zip(a_row) {
                        *g += dj * x;
                    }
                }
            }
            if l > 0 {
                let mut prev = Matrix::zeros(a.rows(), ins);
                for i in 0..a.rows() {
                    let d_row = delta.row(i).to_vec();
                    let p_row = prev.row_mut(i);
                    for (j, dj) in d_row.iter().enumerate() {
                        for (p, w) in p_row.iter_mut().zip(layer.weights.row(j)) {
                            *p += dj * w;
                        }
                    }
                }
                delta = prev;
            }
            gw.extend(gb);
            grads[l] = gw;
        }
        grads.concat()
    }

    fn adam_step(&mut self, state: &mut Adam, grad: &[f64]) {
        let cfg = &self.config;
        state.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(state.t);
        let c2 = 1.0 - cfg.beta2.powi(state.t);
        let mut params = self.parameters();
        for (i, p) in params.iter_mut().enumerate() {
            let g = grad[i];
            state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
            state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
            let m_hat = state.m[i] / c1;
            let v_hat = state.v[i] / c2;
            *p -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
        self.set_parameters(&params).expect("same length");
    }

    /// Labels `1` where the output is at least 0.5.
    pub fn predict_labels(&self, features: &Matrix) -> Result<Vec<u8>, NetError> {
        Ok(self
            .forward(features)?
            .probabilities
            .iter()
            .map(|&p| threshold(p))
            .collect())
    }

    /// Mini-batch training on binary cross-entropy with Adam.
    ///
    /// Samples are reshuffled every epoch from `seed`. Training stops after
    /// `max_epochs`, or once the epoch loss has failed to improve on its best
    /// value by `early_stop_min_delta` for `early_stop_patience` epochs in a
    /// row. A NaN/infinite activation, loss or parameter aborts training and
    /// marks the report as failed.
    pub fn train(&mut self, train: &Part, val: &Part, seed: u64) -> Result<TrainReport, NetError> {
        if train.is_empty() || val.is_empty() {
            return Err(NetError::EmptyData);
        }
        self.check_features(&train.features)?;
        self.check_features(&val.features)?;
        let batch_size = self.config.batch_size;
        if batch_size > train.len() {
            return Err(NetError::BatchTooLarge {
                batch: batch_size,
                n: train.len(),
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_params = self.n_parameters();
        let mut adam = Adam {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            t: 0,
        };
        let mut report = TrainReport::default();
        let mut order: Vec<usize> = (0..train.len()).collect();
        let mut best = f64::INFINITY;
        let mut wait = 0;

        let fail = |mut report: TrainReport, kind| {
            report.failed = true;
            report.failure_kind = kind;
            report
        };

        for _ in 0..self.config.max_epochs {
            order.shuffle(&mut rng);
            let mut loss_sum = 0.0;
            for chunk in order.chunks(batch_size) {
                let x = train.features.select_rows(chunk);
                let y: Vec<u8> = chunk.iter().map(|&i| train.labels[i]).collect();
                let (loss, grad, fwd) = self.loss_and_gradient(&x, &y)?;
                report.total_batches += 1;
                if fwd.non_finite || !loss.is_finite() {
                    report.epochs_run += 1;
                    return Ok(fail(report, FailureKind::NanLoss));
                }
                if fwd.guard_tripped {
                    report.guarded_batches += 1;
                }
                self.adam_step(&mut adam, &grad);
                if !self.parameters_finite() {
                    report.epochs_run += 1;
                    return Ok(fail(report, FailureKind::NonFiniteWeights));
                }
                loss_sum += loss * chunk.len() as f64;
            }
            let epoch_loss = loss_sum / train.len() as f64;
            report.epochs_run += 1;
            report.loss_history.push(epoch_loss);
            report.final_loss = epoch_loss;
            if epoch_loss < best - self.config.early_stop_min_delta {
                best = epoch_loss;
                wait = 0;
            } else {
                wait += 1;
                if wait >= self.config.early_stop_patience {
                    break;
                }
            }
        }

        let predicted = self.predict_labels(&val.features)?;
        let correct = predicted
            .iter()
            .zip(&val.labels)
            .filter(|(p, y)| p == y)
            .count();
        report.validation_accuracy = correct as f64 / val.len() as f64;
        Ok(report)
    }

    /// Plain-text record of the configuration, activations and parameters.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let cfg = serde_json::to_string(&self.config).expect("config serializes");
        let _ = writeln!(out, "config {cfg}");
        for (i, layer) in self.layers.iter().enumerate() {
            let _ = writeln!(
                out,
                "layer {i} {}x{} activation {}",
                layer.weights.rows(),
                layer.weights.cols(),
                layer.activation.text()
            );
            for j in 0..layer.weights.rows() {
                let row: Vec<String> = layer
                    .weights
                    .row(j)
                    .iter()
                    .map(|w| format!("{w:?}"))
                    .collect();
                let _ = writeln!(out, "  w {}", row.join(" "));
            }
            let bias: Vec<String> = layer.bias.iter().map(|b| format!("{b:?}")).collect();
            let _ = writeln!(out, "  b {}", bias.join(" "));
        }
        out
    }
}

pub fn threshold(p: f64) -> u8 {
    u8::from(p >= 0.5)
}
