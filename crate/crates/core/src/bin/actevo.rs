use std::path::PathBuf;
use std::process::ExitCode;

use actevo::cli::{self, CliError, CURVE_HI, CURVE_LO, CURVE_POINTS};
use actevo::grammar::MappingLimits;
use clap::{Parser, Subcommand};

/// Evolve, evaluate and inspect grammar-derived activation functions.
#[derive(Parser)]
#[command(name = "actevo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an evolution from a JSON config and write its artifacts.
    Evolve {
        config: PathBuf,
        /// Output directory (overrides the config's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the rectifier reference network over several seeds.
    Baseline {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of seeded runs (defaults to the config's baseline_runs).
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Map a comma-separated 30-codon genotype to expressions.
    Map {
        genotype: String,
        /// Number of activation functions to derive.
        #[arg(short, long, default_value_t = 1)]
        n: usize,
        /// BNF grammar file (the builtin grammar by default).
        #[arg(long)]
        grammar: Option<PathBuf>,
        #[arg(long, default_value_t = MappingLimits::default().max_wraps)]
        max_wraps: usize,
        #[arg(long, default_value_t = MappingLimits::default().max_depth)]
        max_depth: usize,
    },
    /// Sample an expression over an interval into an x,y CSV file.
    Curves {
        expr: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = CURVE_LO, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, default_value_t = CURVE_HI, allow_negative_numbers = true)]
        hi: f64,
        #[arg(short, long, default_value_t = CURVE_POINTS)]
        n: usize,
    },
    /// Train once with a file of expressions (one per line) and print test metrics.
    Eval {
        expressions: PathBuf,
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Evolve { config, out } => {
            let a = cli::cmd_evolve(&config, out.as_deref())?;
            let elite = &a.report.elite;
            for (k, text) in elite.phenotypes.iter().enumerate() {
                println!("AF{}: {text}", k + 1);
            }
            println!(
                "fitness {} validation accuracy {} test f1 {}",
                elite.fitness, elite.validation_accuracy, elite.metrics.f1
            );
            println!("wrote {}", a.report_path.display());
        }
        Command::Baseline { config, out, runs } => {
            let a = cli::cmd_baseline(&config, out.as_deref(), runs)?;
            let best = &a.report.best;
            println!(
                "best of {} runs: f1 {} mae {} rmse {} accuracy {}",
                a.report.runs.len(),
                best.f1,
                best.mae,
                best.rmse,
                best.accuracy
            );
            println!("wrote {}", a.report_path.display());
        }
        Command::Map {
            genotype,
            n,
            grammar,
            max_wraps,
            max_depth,
        } => {
            let limits = MappingLimits {
                max_wraps,
                max_depth,
            };
            print!(
                "{}",
                cli::cmd_map(&genotype, n, grammar.as_deref(), limits)?
            );
        }
        Command::Curves {
            expr,
            out,
            lo,
            hi,
            n,
        } => {
            let rows = cli::cmd_curves(&expr, lo, hi, n, &out)?;
            println!("wrote {rows} rows to {}", out.display());
        }
        Command::Eval {
            expressions,
            config,
            seed,
        } => {
            let report = cli::cmd_eval(&expressions, &config, seed)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{json}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
