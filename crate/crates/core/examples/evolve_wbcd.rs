//! Desk-scale evolution on the breast-cancer data, printing one line per
//! generation and the elite's activation functions at the end.
//!
//!     cargo run --release --example evolve_wbcd -- [seed] [population] [generations]

use actevo::data::BuiltinDataset;
use actevo::evolution::{run_with, EvolutionConfig, RunSettings};
use actevo::grammar::default_grammar;
use actevo::nn::NetworkConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<Result<_, _>>()?;
    let arg = |i: usize, default: u64| args.get(i).copied().unwrap_or(default);

    let which = BuiltinDataset::Wbcd;
    let ds = which.load_bundled()?;
    let settings = RunSettings {
        evolution: EvolutionConfig {
            seed: arg(0, 1),
            population_size: arg(1, 20) as usize,
            generations: arg(2, 20) as usize,
            ..Default::default()
        },
        network: NetworkConfig::new(which.n_features(), which.hidden_layers()),
        ..Default::default()
    };

    let start = std::time::Instant::now();
    let report = run_with(&ds, &default_grammar(), &settings, |rec| {
        println!(
            "gen {:3}  best {:.4}  mean {:.4}  elite {:.4}  failures {}",
            rec.generation, rec.best_fitness, rec.mean_fitness, rec.elite_fitness, rec.failures
        );
    })?;

    let elite = &report.elite;
    println!("\nelite genotype {}", elite.genotype);
    for (i, text) in elite.phenotypes.iter().enumerate() {
        println!("  AF{}: {text}", i + 1);
    }
    println!(
        "fitness {:.4}  val_acc {:.3}  test f1 {:.3}  ({} trainings, {:.1?})",
        elite.fitness,
        elite.validation_accuracy,
        elite.metrics.f1,
        report.evaluations,
        start.elapsed()
    );
    Ok(())
}
