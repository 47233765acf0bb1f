//! The command implementations behind the `actevo` binary.
//!
//! Each command validates its inputs and loads its data before creating any
//! output, and every file is written atomically (temp file + rename).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::baseline::{run_baseline, BaselineError, BaselineReport};
use crate::config::{load_run_config, ConfigError, RunConfig};
use crate::evolution::{run, EvolutionError, GenerationRecord, RunReport};
use crate::expr::{parse_text, sample_curve, ActivationExpr, ParseError};
use crate::grammar::{
    default_grammar, load_grammar, map_genotype, Genotype, GenotypeError, GrammarError,
    MappingError, MappingLimits,
};
use crate::metrics::{compute_metrics, MetricsError, MetricsReport};
use crate::nn::{init_network, NetError, TrainReport};
use crate::seed;

pub const CURVE_LO: f64 = -10.0;
pub const CURVE_HI: f64 = 10.0;
pub const CURVE_POINTS: usize = 1000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid genotype: {0}")]
    Genotype(#[from] GenotypeError),
    #[error("grammar: {0}")]
    Grammar(#[from] GrammarError),
    #[error("mapping failed: {0}")]
    Mapping(#[from] MappingError),
    #[error("cannot parse expression {text:?}: {source}")]
    Parse { text: String, source: ParseError },
    #[error(
        "expected {expected} activation functions ({hidden_layers} hidden layers), found {got}"
    )]
    CountMismatch {
        expected: usize,
        got: usize,
        hidden_layers: usize,
    },
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Network(#[from] NetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl CliError {
    /// 2 for malformed command-line input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Genotype(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes through a temporary sibling file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(path)(e)
    })
}

/// A result document together with the config that produced it.
#[derive(Debug, Serialize)]
pub struct Artifact<'a, T> {
    pub config: &'a RunConfig,
    pub report: &'a T,
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("artifacts serialize");
    s.push('\n');
    s.into_bytes()
}

pub fn generations_csv(records: &[GenerationRecord]) -> String {
    let mut out = String::from("generation,best_fitness,mean_fitness,failures\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.generation, r.best_fitness, r.mean_fitness, r.failures
        );
    }
    out
}

/// `x,y` rows from [`sample_curve`].
pub fn curve_csv(expr: &ActivationExpr, lo: f64, hi: f64, n: usize) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in sample_curve(expr, lo, hi, n) {
        let _ = writeln!(out, "{x},{y}");
    }
    out
}

fn output_dir(config: Option<PathBuf>, out: Option<&Path>) -> Result<PathBuf, CliError> {
    out.map(Path::to_path_buf).or(config).ok_or_else(|| {
        CliError::Usage("no output directory: set output_dir in the config or pass --out".into())
    })
}

#[derive(Debug, Clone)]
pub struct EvolveArtifacts {
    pub report_path: PathBuf,
    pub generations_path: PathBuf,
    pub curve_paths: Vec<PathBuf>,
    pub report: RunReport,
}

/// Runs an evolution and writes `report.json`, `generations.csv` and
/// `curves/af<k>.csv` (one per elite activation function) to the output
/// directory.
pub fn cmd_evolve(config_path: &Path, out: Option<&Path>) -> Result<EvolveArtifacts, CliError> {
    let resolved = load_run_config(config_path)?;
    let dir = output_dir(resolved.output_dir.clone(), out)?;
    let report = run(&resolved.dataset, &resolved.grammar, &resolved.settings)?;

    let generations_path = dir.join("generations.csv");
    write_atomic(
        &generations_path,
        generations_csv(&report.generations).as_bytes(),
    )?;
    let mut curve_paths = Vec::new();
    for (k, text) in report.elite.phenotypes.iter().enumerate() {
        let expr = parse_text(text).map_err(|source| CliError::Parse {
            text: text.clone(),
            source,
        })?;
        let path = dir.join("curves").join(format!("af{}.csv", k + 1));
        write_atomic(
            &path,
            curve_csv(&expr, CURVE_LO, CURVE_HI, CURVE_POINTS).as_bytes(),
        )?;
        curve_paths.push(path);
    }
    let report_path = dir.join("report.json");
    let doc = Artifact {
        config: &resolved.config,
        report: &report,
    };
    write_atomic(&report_path, &to_json(&doc))?;
    Ok(EvolveArtifacts {
        report_path,
        generations_path,
        curve_paths,
        report,
    })
}

#[derive(Debug, Clone)]
pub struct BaselineArtifacts {
    pub report_path: PathBuf,
    pub metrics_path: PathBuf,
    pub report: BaselineReport,
}

/// Trains the rectifier reference network `runs` times (the config's
/// `baseline_runs` by default) and writes `baseline.json` plus a one-row
/// `baseline_metrics.csv` for the run with the best test F1.
pub fn cmd_baseline(
    config_path: &Path,
    out: Option<&Path>,
    runs: Option<usize>,
) -> Result<BaselineArtifacts, CliError> {
    let resolved = load_run_config(config_path)?;
    let dir = output_dir(resolved.output_dir.clone(), out)?;
    let runs = runs.unwrap_or(resolved.config.baseline_runs);
    let report = run_baseline(
        &resolved.dataset,
        &resolved.settings.network,
        &resolved.settings.data,
        runs,
        resolved.config.seed,
    )?;

    let best = &report.runs[report.best_run];
    let metrics_path = dir.join("baseline_metrics.csv");
    let csv = format!(
        "dataset,training_accuracy,mae,rmse,f1\n{},{},{},{},{}\n",
        report.dataset, best.train_accuracy, best.metrics.mae, best.metrics.rmse, best.metrics.f1
    );
    write_atomic(&metrics_path, csv.as_bytes())?;
    let report_path = dir.join("baseline.json");
    let doc = Artifact {
        config: &resolved.config,
        report: &report,
    };
    write_atomic(&report_path, &to_json(&doc))?;
    Ok(BaselineArtifacts {
        report_path,
        metrics_path,
        report,
    })
}

/// Maps a `c0,c1,...` genotype to `n_functions` expressions. The output has
/// one expression per line followed by `consumed <k>` and `wraps <w>`.
pub fn cmd_map(
    genotype: &str,
    n_functions: usize,
    grammar_path: Option<&Path>,
    limits: MappingLimits,
) -> Result<String, CliError> {
    let genotype: Genotype = genotype.parse()?;
    if n_functions == 0 {
        return Err(CliError::Usage(
            "the function count must be at least 1".into(),
        ));
    }
    let grammar = match grammar_path {
        None => default_grammar(),
        Some(p) => load_grammar(&fs::read_to_string(p).map_err(|source| ConfigError::Io {
            path: p.to_path_buf(),
            source,
        })?)?,
    };
    let (exprs, trace) = map_genotype(&genotype, &grammar, n_functions, limits)?;
    let mut out = String::new();
    for e in &exprs {
        let _ = writeln!(out, "{e}");
    }
    let _ = writeln!(out, "consumed {}", trace.codons_consumed);
    let _ = writeln!(out, "wraps {}", trace.wraps_used);
    Ok(out)
}

/// Samples `expr_text` at `n` points over `[lo, hi]` into a CSV file and
/// returns the number of data rows.
pub fn cmd_curves(
    expr_text: &str,
    lo: f64,
    hi: f64,
    n: usize,
    out: &Path,
) -> Result<usize, CliError> {
    let expr = parse_text(expr_text).map_err(|source| CliError::Parse {
        text: expr_text.to_string(),
        source,
    })?;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(CliError::Usage(format!(
            "need finite lo < hi, got {lo} and {hi}"
        )));
    }
    if n < 2 {
        return Err(CliError::Usage("need at least 2 points".into()));
    }
    write_atomic(out, curve_csv(&expr, lo, hi, n).as_bytes())?;
    Ok(n)
}

/// One expression per non-empty line; `#` starts a comment.
pub fn parse_expression_list(text: &str) -> Result<Vec<ActivationExpr>, CliError> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            parse_text(l).map_err(|source| CliError::Parse {
                text: l.to_string(),
                source,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub phenotypes: Vec<String>,
    pub seed: u64,
    pub train: TrainReport,
    pub metrics: MetricsReport,
}

/// Trains once with the listed activation functions on the config's dataset
/// and reports test metrics. `seed` overrides the config seed.
pub fn cmd_eval(
    expr_file: &Path,
    config_path: &Path,
    seed: Option<u64>,
) -> Result<EvalReport, CliError> {
    let text = fs::read_to_string(expr_file).map_err(|source| ConfigError::Io {
        path: expr_file.to_path_buf(),
        source,
    })?;
    let exprs = parse_expression_list(&text)?;
    let resolved = load_run_config(config_path)?;
    let network = &resolved.settings.network;
    if exprs.len() != network.n_activations() {
        return Err(CliError::CountMismatch {
            expected: network.n_activations(),
            got: exprs.len(),
            hidden_layers: network.hidden_layers,
        });
    }
    let seed = seed.unwrap_or(resolved.config.seed);
    let split = resolved
        .settings
        .data
        .prepare(&resolved.dataset, seed)
        .map_err(ConfigError::from)?;
    let phenotypes = exprs.iter().map(ActivationExpr::to_text).collect();
    let mut net = init_network(network, exprs, seed)?;
    let train = net.train(&split.train, &split.validation, seed::mix(seed, 1))?;
    let metrics = if train.failed {
        MetricsReport::default()
    } else {
        compute_metrics(
            &split.test.labels,
            &net.predict_labels(&split.test.features)?,
        )?
    };
    Ok(EvalReport {
        dataset: resolved.dataset.name,
        phenotypes,
        seed,
        train,
        metrics,
    })
}
