//! Trains the rectifier reference network on a bundled dataset over several
//! seeds and prints per-run test metrics.
//!
//!     cargo run --release --example train_baseline -- wbcd 10

use actevo::baseline::run_baseline;
use actevo::data::{BuiltinDataset, DataPrep};
use actevo::nn::NetworkConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "wbcd".into());
    let runs: usize = args.next().map_or(Ok(10), |r| r.parse())?;
    let which = BuiltinDataset::from_name(&name).ok_or(format!("unknown dataset {name:?}"))?;

    let ds = which.load_bundled()?;
    let net = NetworkConfig::new(which.n_features(), which.hidden_layers());
    let start = std::time::Instant::now();
    let report = run_baseline(&ds, &net, &DataPrep::default(), runs, 0)?;

    println!("{}: split {:?}", report.dataset, report.split);
    for (i, r) in report.runs.iter().enumerate() {
        println!(
            "run {i:2}  epochs {:2}  val_acc {:.3}  test acc {:.3} f1 {:.3} mae {:.3} rmse {:.3}",
            r.train.epochs_run,
            r.train.validation_accuracy,
            r.metrics.accuracy,
            r.metrics.f1,
            r.metrics.mae,
            r.metrics.rmse
        );
    }
    println!(
        "best run {} f1 {:.3} ({:.1?})",
        report.best_run,
        report.best.f1,
        start.elapsed()
    );
    Ok(())
}
