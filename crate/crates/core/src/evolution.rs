//! Grammatical-evolution loop over activation-function genotypes.
//!
//! Each generation: refresh the elite, optionally run tournament selection and
//! single-point crossover (a failed child is dropped and its parent kept),
//! mutate non-elite individuals, re-evaluate whatever changed, and log a
//! [`GenerationRecord`].

use std::collections::HashMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, DataPrep, Dataset, Split};
use crate::expr::ActivationExpr;
use crate::grammar::{map_genotype, Genotype, Grammar, MappingLimits, CODON_MAX, GENOME_LEN};
use crate::metrics::{compute_metrics, FitnessMode, MetricsReport};
use crate::nn::{init_network, FailureKind, NetError, NetworkConfig};
use crate::seed;

pub const TOURNAMENT_SIZE: usize = 4;

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("invalid evolution config: {0}")]
    Config(String),
    #[error("tournament needs at least {need} individuals, population has {have}")]
    InsufficientPopulation { need: usize, have: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Network(#[from] NetError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub generations: usize,
    /// Probability that a crossover event takes place.
    pub crossover_rate: f64,
    /// Per-individual mutation probability.
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub elitism_size: usize,
    pub crossover_events_per_generation: usize,
    pub fitness_mode: FitnessMode,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 100,
            generations: 500,
            crossover_rate: 0.9,
            mutation_rate: 0.2,
            tournament_size: TOURNAMENT_SIZE,
            elitism_size: 1,
            crossover_events_per_generation: 1,
            fitness_mode: FitnessMode::Product,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        let bad = |m: String| Err(EvolutionError::Config(m));
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("{name} must lie in [0, 1], got {rate}"));
            }
        }
        if self.tournament_size != TOURNAMENT_SIZE {
            return bad(format!(
                "tournament_size must be {TOURNAMENT_SIZE} (two pairs), got {}",
                self.tournament_size
            ));
        }
        if self.elitism_size != 1 {
            return bad(format!("elitism_size must be 1, got {}", self.elitism_size));
        }
        if self.population_size == 0 {
            return bad("population_size must be at least 1".into());
        }
        let crosses = self.crossover_rate > 0.0 && self.crossover_events_per_generation > 0;
        if crosses && self.generations > 0 && self.population_size < TOURNAMENT_SIZE {
            return bad(format!(
                "population_size must be at least {TOURNAMENT_SIZE} when crossover is enabled"
            ));
        }
        Ok(())
    }
}

/// Why an individual scored zero without a real evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    Mapping {
        message: String,
    },
    Training {
        failure_kind: FailureKind,
    },
    /// A zero-division guard tripped in every training batch.
    AlwaysGuarded,
    Setup {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    /// `None` until evaluated, and for genotypes that fail to map.
    pub phenotypes: Option<Vec<ActivationExpr>>,
    pub metrics: MetricsReport,
    pub validation_accuracy: f64,
    pub fitness: f64,
    pub evaluated: bool,
    pub failure: Option<Failure>,
}

impl Individual {
    pub fn new(genotype: Genotype) -> Self {
        Individual {
            genotype,
            phenotypes: None,
            metrics: MetricsReport::default(),
            validation_accuracy: 0.0,
            fitness: 0.0,
            evaluated: false,
            failure: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn phenotype_texts(&self) -> Vec<String> {
        self.phenotypes
            .iter()
            .flatten()
            .map(ActivationExpr::to_text)
            .collect()
    }

    fn invalidate(&mut self) {
        *self = Individual::new(self.genotype.clone());
    }
}

/// Everything needed to score a genotype.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    pub split: &'a Split,
    pub network: &'a NetworkConfig,
    pub grammar: &'a Grammar,
    pub limits: MappingLimits,
    pub fitness_mode: FitnessMode,
    pub seed: u64,
}

impl Evaluator<'_> {
    /// Training seed; depends only on the run seed and the genotype, so the
    /// result does not depend on evaluation order.
    pub fn individual_seed(&self, genotype: &Genotype) -> u64 {
        seed::mix(self.seed, seed::fnv1a(genotype.codons()))
    }

    /// Maps, trains and scores `ind`. Already evaluated individuals are left
    /// untouched.
    pub fn evaluate(&self, ind: &mut Individual) {
        if ind.evaluated {
            return;
        }
        ind.invalidate();
        ind.evaluated = true;
        if let Err(failure) = self.score(ind) {
            ind.failure = Some(failure);
            ind.metrics = MetricsReport::default();
            ind.validation_accuracy = 0.0;
            ind.fitness = 0.0;
        }
    }

    fn score(&self, ind: &mut Individual) -> Result<(), Failure> {
        let setup = |e: &dyn std::fmt::Display| Failure::Setup {
            message: e.to_string(),
        };
        let (exprs, _) = map_genotype(
            &ind.genotype,
            self.grammar,
            self.network.n_activations(),
            self.limits,
        )
        .map_err(|e| Failure::Mapping {
            message: e.to_string(),
        })?;
        ind.phenotypes = Some(exprs.clone());

        let s = self.individual_seed(&ind.genotype);
        let mut net = init_network(self.network, exprs, s).map_err(|e| setup(&e))?;
        let report = net
            .train(&self.split.train, &self.split.validation, seed::mix(s, 1))
            .map_err(|e| setup(&e))?;
        if report.failed {
            return Err(Failure::Training {
                failure_kind: report.failure_kind,
            });
        }
        if report.guarded_every_batch() {
            return Err(Failure::AlwaysGuarded);
        }
        let predicted = net
            .predict_labels(&self.split.test.features)
            .map_err(|e| setup(&e))?;
        let metrics =
            compute_metrics(&self.split.test.labels, &predicted).map_err(|e| setup(&e))?;
        ind.fitness = self
            .fitness_mode
            .score(report.validation_accuracy, metrics.f1)
            .map_err(|e| setup(&e))?;
        ind.metrics = metrics;
        ind.validation_accuracy = report.validation_accuracy;
        Ok(())
    }
}

/// Stand-alone form of [`Evaluator::evaluate`].
pub fn evaluate_individual(mut ind: Individual, evaluator: &Evaluator<'_>) -> Individual {
    evaluator.evaluate(&mut ind);
    ind
}

pub fn random_genotype<R: Rng + ?Sized>(rng: &mut R) -> Genotype {
    let codons = (0..GENOME_LEN)
        .map(|_| rng.gen_range(0..=CODON_MAX))
        .collect();
    Genotype::new(codons).expect("codons drawn in range")
}

pub fn init_population<R: Rng + ?Sized>(config: &EvolutionConfig, rng: &mut R) -> Vec<Individual> {
    (0..config.population_size)
        .map(|_| Individual::new(random_genotype(rng)))
        .collect()
}

fn beats(pop: &[Individual], a: usize, b: usize) -> bool {
    let (x, y) = (&pop[a], &pop[b]);
    match x.metrics.f1.total_cmp(&y.metrics.f1) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => match x.fitness.total_cmp(&y.fitness) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => a < b,
        },
    }
}

/// Winner of one pair: higher test F1, then higher fitness, then lower index.
pub fn pair_winner(pop: &[Individual], a: usize, b: usize) -> usize {
    if beats(pop, a, b) {
        a
    } else {
        b
    }
}

/// Draws four distinct entrants, pairs them in draw order and returns the
/// indices of the two pair winners.
pub fn tournament_select<R: Rng + ?Sized>(
    pop: &[Individual],
    rng: &mut R,
) -> Result<(usize, usize), EvolutionError> {
    if pop.len() < TOURNAMENT_SIZE {
        return Err(EvolutionError::InsufficientPopulation {
            need: TOURNAMENT_SIZE,
            have: pop.len(),
        });
    }
    let e = index::sample(rng, pop.len(), TOURNAMENT_SIZE).into_vec();
    Ok((pair_winner(pop, e[0], e[1]), pair_winner(pop, e[2], e[3])))
}

/// Splices at `point`: `a[..point] + b[point..]` and `b[..point] + a[point..]`.
pub fn crossover_at(a: &Genotype, b: &Genotype, point: usize) -> (Genotype, Genotype) {
    let (a, b) = (a.codons(), b.codons());
    let c1 = [&a[..point], &b[point..]].concat();
    let c2 = [&b[..point], &a[point..]].concat();
    (
        Genotype::new(c1).expect("splice keeps length"),
        Genotype::new(c2).expect("splice keeps length"),
    )
}

/// Single-point crossover with the point uniform in `1..GENOME_LEN`.
pub fn crossover<R: Rng + ?Sized>(
    a: &Individual,
    b: &Individual,
    rng: &mut R,
) -> (Individual, Individual) {
    let point = rng.gen_range(1..GENOME_LEN);
    let (c1, c2) = crossover_at(&a.genotype, &b.genotype, point);
    (Individual::new(c1), Individual::new(c2))
}

/// Replaces one uniformly chosen codon (used or not) with a uniform value in
/// `0..=100` and marks the individual for re-evaluation.
pub fn mutate<R: Rng + ?Sized>(ind: &mut Individual, rng: &mut R) {
    let index = rng.gen_range(0..GENOME_LEN);
    let value = rng.gen_range(0..=CODON_MAX);
    ind.genotype.set(index, value);
    ind.invalidate();
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub elite_fitness: f64,
    pub elite_phenotypes: Vec<String>,
    /// Evaluations in this generation that ended in a failure.
    pub failures: usize,
}

/// Population plus elite bookkeeping and the run's random stream.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub population: Vec<Individual>,
    pub elite: Individual,
    pub generation: usize,
    pub evaluations: usize,
    initial_failures: usize,
    rng: ChaCha8Rng,
    cache: HashMap<Genotype, Individual>,
}

fn best_index(pop: &[Individual]) -> usize {
    // max fitness, lowest index on ties
    pop.iter().enumerate().fold(0, |best, (i, ind)| {
        if ind.fitness > pop[best].fitness {
            i
        } else {
            best
        }
    })
}

fn worst_index(pop: &[Individual]) -> usize {
    pop.iter().enumerate().fold(0, |worst, (i, ind)| {
        if ind.fitness < pop[worst].fitness {
            i
        } else {
            worst
        }
    })
}

impl EvolutionState {
    /// Draws and evaluates the initial population.
    pub fn new(
        config: &EvolutionConfig,
        evaluator: &Evaluator<'_>,
    ) -> Result<Self, EvolutionError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let population = init_population(config, &mut rng);
        Ok(Self::from_population(population, rng, evaluator))
    }

    /// Starts from a given population; unevaluated members are evaluated.
    pub fn from_population(
        population: Vec<Individual>,
        rng: ChaCha8Rng,
        evaluator: &Evaluator<'_>,
    ) -> Self {
        assert!(!population.is_empty(), "population must not be empty");
        let mut state = EvolutionState {
            elite: population[0].clone(),
            population,
            generation: 0,
            evaluations: 0,
            initial_failures: 0,
            rng,
            cache: HashMap::new(),
        };
        state.initial_failures = state.evaluate_pending(evaluator);
        state.elite = state.population[best_index(&state.population)].clone();
        state
    }

    /// Evaluates every unevaluated member (in parallel); returns how many of
    /// those evaluations failed.
    fn evaluate_pending(&mut self, evaluator: &Evaluator<'_>) -> usize {
        let pending: Vec<usize> = (0..self.population.len())
            .filter(|&i| !self.population[i].evaluated)
            .collect();
        let mut fresh = Vec::new();
        for &i in &pending {
            match self.cache.get(&self.population[i].genotype) {
                Some(hit) => self.population[i] = hit.clone(),
                None => fresh.push(i),
            }
        }
        let results: Vec<Individual> = fresh
            .par_iter()
            .map(|&i| evaluate_individual(self.population[i].clone(), evaluator))
            .collect();
        self.evaluations += results.len();
        for (i, ind) in fresh.into_iter().zip(results) {
            self.cache.insert(ind.genotype.clone(), ind.clone());
            self.population[i] = ind;
        }
        pending
            .into_iter()
            .filter(|&i| self.population[i].failed())
            .count()
    }

    /// Evaluates two crossover children; each successful child replaces the
    /// parent in its slot, a failed one is dropped and the parent kept.
    /// Returns whether each child was accepted.
    pub fn offer_offspring(
        &mut self,
        slots: (usize, usize),
        children: (Individual, Individual),
        evaluator: &Evaluator<'_>,
    ) -> [bool; 2] {
        let (a, b) = children;
        self.evaluations += [&a, &b]
            .iter()
            .filter(|c| !c.evaluated && !self.cache.contains_key(&c.genotype))
            .count();
        let (a, b) = rayon::join(
            || self.cached_or(a, evaluator),
            || self.cached_or(b, evaluator),
        );
        let mut accepted = [false; 2];
        for (k, (slot, child)) in [(slots.0, a), (slots.1, b)].into_iter().enumerate() {
            self.cache
                .entry(child.genotype.clone())
                .or_insert_with(|| child.clone());
            if !child.failed() {
                self.population[slot] = child;
                accepted[k] = true;
            }
        }
        accepted
    }

    fn cached_or(&self, ind: Individual, evaluator: &Evaluator<'_>) -> Individual {
        if ind.evaluated {
            return ind;
        }
        match self.cache.get(&ind.genotype) {
            Some(hit) => hit.clone(),
            None => evaluate_individual(ind, evaluator),
        }
    }

    fn refresh_elite(&mut self) {
        let best = &self.population[best_index(&self.population)];
        if best.fitness > self.elite.fitness {
            self.elite = best.clone();
        }
    }

    pub fn elite_slot(&self) -> Option<usize> {
        self.population
            .iter()
            .position(|ind| ind.genotype == self.elite.genotype)
    }
}

/// Runs one generation and returns its record.
pub fn step_generation(
    state: &mut EvolutionState,
    config: &EvolutionConfig,
    evaluator: &Evaluator<'_>,
) -> Result<GenerationRecord, EvolutionError> {
    let mut failures = 0;
    state.refresh_elite();

    for _ in 0..config.crossover_events_per_generation {
        if !state.rng.gen_bool(config.crossover_rate) {
            continue;
        }
        let (i, j) = tournament_select(&state.population, &mut state.rng)?;
        let children = crossover(&state.population[i], &state.population[j], &mut state.rng);
        let accepted = state.offer_offspring((i, j), children, evaluator);
        failures += accepted.iter().filter(|ok| !**ok).count();
    }

    // the elite is exempt from mutation; put it back if crossover displaced it
    let elite_slot = match state.elite_slot() {
        Some(k) => k,
        None => {
            let k = worst_index(&state.population);
            state.population[k] = state.elite.clone();
            k
        }
    };
    let mut mutated = false;
    for k in 0..state.population.len() {
        if k == elite_slot {
            continue;
        }
        if state.rng.gen_bool(config.mutation_rate) {
            mutate(&mut state.population[k], &mut state.rng);
            mutated = true;
        }
    }
    if mutated {
        failures += state.evaluate_pending(evaluator);
    }

    state.refresh_elite();
    state.generation += 1;
    Ok(record(state, failures))
}

fn record(state: &EvolutionState, failures: usize) -> GenerationRecord {
    let pop = &state.population;
    let best = pop[best_index(pop)].fitness;
    let mean = pop.iter().map(|i| i.fitness).sum::<f64>() / pop.len() as f64;
    assert!(best >= mean - 1e-12, "best fitness below mean");
    GenerationRecord {
        generation: state.generation,
        best_fitness: best,
        mean_fitness: mean,
        elite_fitness: state.elite.fitness,
        elite_phenotypes: state.elite.phenotype_texts(),
        failures,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliteSummary {
    pub genotype: Genotype,
    pub phenotypes: Vec<String>,
    pub metrics: MetricsReport,
    pub validation_accuracy: f64,
    pub fitness: f64,
    pub failure: Option<Failure>,
}

impl From<&Individual> for EliteSummary {
    fn from(ind: &Individual) -> Self {
        EliteSummary {
            genotype: ind.genotype.clone(),
            phenotypes: ind.phenotype_texts(),
            metrics: ind.metrics,
            validation_accuracy: ind.validation_accuracy,
            fitness: ind.fitness,
            failure: ind.failure.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

impl From<&Split> for SplitSizes {
    fn from(s: &Split) -> Self {
        SplitSizes {
            train: s.train.len(),
            validation: s.validation.len(),
            test: s.test.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub dataset: String,
    pub split: SplitSizes,
    pub split_seed: u64,
    /// Distinct genotypes trained during the run.
    pub evaluations: usize,
    /// Record 0 describes the initial population.
    pub generations: Vec<GenerationRecord>,
    pub elite: EliteSummary,
}

/// Settings for [`run`] besides the dataset and grammar.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSettings {
    pub evolution: EvolutionConfig,
    pub network: NetworkConfig,
    pub limits: MappingLimits,
    pub data: DataPrep,
}

/// Splits the data, evolves for `generations` steps and reports the elite.
pub fn run(
    dataset: &Dataset,
    grammar: &Grammar,
    settings: &RunSettings,
) -> Result<RunReport, EvolutionError> {
    run_with(dataset, grammar, settings, |_| {})
}

/// [`run`] with a callback after every generation (including generation 0).
pub fn run_with(
    dataset: &Dataset,
    grammar: &Grammar,
    settings: &RunSettings,
    mut on_generation: impl FnMut(&GenerationRecord),
) -> Result<RunReport, EvolutionError> {
    let evo = &settings.evolution;
    evo.validate()?;
    settings.network.validate()?;
    settings.limits.validate().map_err(EvolutionError::Config)?;
    if dataset.n_features() != settings.network.n_features {
        return Err(NetError::FeatureMismatch {
            expected: settings.network.n_features,
            got: dataset.n_features(),
        }
        .into());
    }
    let split = settings.data.prepare(dataset, evo.seed)?;
    if settings.network.batch_size > split.train.len() {
        return Err(NetError::BatchTooLarge {
            batch: settings.network.batch_size,
            n: split.train.len(),
        }
        .into());
    }
    let evaluator = Evaluator {
        split: &split,
        network: &settings.network,
        grammar,
        limits: settings.limits,
        fitness_mode: evo.fitness_mode,
        seed: evo.seed,
    };

    let mut state = EvolutionState::new(evo, &evaluator)?;
    let first = record(&state, state.initial_failures);
    on_generation(&first);
    let mut records = vec![first];
    for _ in 0..evo.generations {
        let rec = step_generation(&mut state, evo, &evaluator)?;
        on_generation(&rec);
        records.push(rec);
    }
    Ok(RunReport {
        dataset: dataset.name.clone(),
        split: SplitSizes::from(&split),
        split_seed: split.seed,
        evaluations: state.evaluations,
        generations: records,
        elite: EliteSummary::from(&state.elite),
    })
}
