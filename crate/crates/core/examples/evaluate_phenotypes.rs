//! Trains a network once with hand-picked activation functions on a bundled
//! dataset and compares it with the rectifier reference.
//!
//!     cargo run --release --example evaluate_phenotypes -- heart

use actevo::baseline::train_baseline;
use actevo::data::{BuiltinDataset, DataPrep};
use actevo::expr::parse_text;
use actevo::metrics::compute_metrics;
use actevo::nn::{init_network, NetworkConfig, OutputActivation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "heart".into());
    let which = BuiltinDataset::from_name(&name).ok_or(format!("unknown dataset {name:?}"))?;
    let split = DataPrep::default().prepare(&which.load_bundled()?, 1)?;
    let base = NetworkConfig::new(which.n_features(), which.hidden_layers());

    let hidden = vec!["tanh(x)"; which.hidden_layers()];
    let evolved_output = [vec!["max(x,0.1)"], hidden.clone(), vec!["min(x,1.0)"]].concat();
    let sigmoid_output = [vec!["max(x,0.1)"], hidden].concat();
    for (label, texts, output) in [
        ("evolved output", evolved_output, OutputActivation::Evolved),
        (
            "sigmoid output",
            sigmoid_output,
            OutputActivation::FixedSigmoid,
        ),
    ] {
        let cfg = NetworkConfig {
            output_activation: output,
            ..base.clone()
        };
        let acts = texts
            .iter()
            .map(|t| parse_text(t))
            .collect::<Result<_, _>>()?;
        let mut net = init_network(&cfg, acts, 1)?;
        let report = net.train(&split.train, &split.validation, 2)?;
        let m = compute_metrics(
            &split.test.labels,
            &net.predict_labels(&split.test.features)?,
        )?;
        println!(
            "{label:15} epochs {:2}  val_acc {:.3}  test f1 {:.3}",
            report.epochs_run, report.validation_accuracy, m.f1
        );
    }
    let reference = train_baseline(&split, &base, 1)?;
    println!(
        "{:15} epochs {:2}  val_acc {:.3}  test f1 {:.3}",
        "rectifier",
        reference.train.epochs_run,
        reference.train.validation_accuracy,
        reference.metrics.f1
    );
    Ok(())
}
