use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Grammar, Symbol};
use crate::expr::{parse_text, ActivationExpr, ParseError};

/// Number of codons in every genotype.
pub const GENOME_LEN: usize = 30;
/// Largest codon value (inclusive).
pub const CODON_MAX: u8 = 100;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenotypeError {
    #[error("genotype must have exactly {GENOME_LEN} codons, got {0}")]
    Length(usize),
    #[error("codon {value} at index {index} is outside 0..={CODON_MAX}")]
    Range { index: usize, value: u64 },
    #[error("cannot parse codon {0:?}")]
    Parse(String),
}

/// Fixed-length codon list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u8>")]
pub struct Genotype(Vec<u8>);

impl Genotype {
    pub fn new(codons: Vec<u8>) -> Result<Self, GenotypeError> {
        if codons.len() != GENOME_LEN {
            return Err(GenotypeError::Length(codons.len()));
        }
        if let Some((index, &v)) = codons.iter().enumerate().find(|(_, &c)| c > CODON_MAX) {
            return Err(GenotypeError::Range {
                index,
                value: v as u64,
            });
        }
        Ok(Genotype(codons))
    }

    pub fn zeros() -> Self {
        Genotype(vec![0; GENOME_LEN])
    }

    pub fn codons(&self) -> &[u8] {
        &self.0
    }

    /// Replaces one codon. Panics if `index` or `value` is out of range.
    pub fn set(&mut self, index: usize, value: u8) {
        assert!(value <= CODON_MAX, "codon {value} out of range");
        self.0[index] = value;
    }
}

impl TryFrom<Vec<u64>> for Genotype {
    type Error = GenotypeError;

    fn try_from(values: Vec<u64>) -> Result<Self, Self::Error> {
        if values.len() != GENOME_LEN {
            return Err(GenotypeError::Length(values.len()));
        }
        let mut codons = Vec::with_capacity(values.len());
        for (index, &value) in values.iter().enumerate() {
            if value > CODON_MAX as u64 {
                return Err(GenotypeError::Range { index, value });
            }
            codons.push(value as u8);
        }
        Ok(Genotype(codons))
    }
}

impl From<Genotype> for Vec<u8> {
    fn from(g: Genotype) -> Self {
        g.0
    }
}

/// Parses `"c0,c1,...,c29"`.
impl FromStr for Genotype {
    type Err = GenotypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<u64>()
                    .map_err(|_| GenotypeError::Parse(part.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Genotype::try_from(values)
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Bounds on wrapping and recursion during mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct MappingLimits {
    pub max_wraps: usize,
    /// Maximum number of times any one nonterminal may be nested inside
    /// itself along a single derivation path.
    pub max_depth: usize,
}

impl Default for MappingLimits {
    fn default() -> Self {
        MappingLimits {
            max_wraps: 10,
            max_depth: 50,
        }
    }
}

impl MappingLimits {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_wraps == 0 || self.max_depth == 0 {
            return Err("mapping limits must both be at least 1".into());
        }
        Ok(())
    }
}

/// One codon read at a choice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Choice {
    pub codon_index: usize,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MappingTrace {
    /// Total codons read, counting re-reads after wrapping.
    pub codons_consumed: usize,
    pub wraps_used: usize,
    /// Value of `codons_consumed` when each expression started.
    pub expression_offsets: Vec<usize>,
    pub choices: Vec<Choice>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MappingError {
    #[error("codons exhausted after {0} wraps")]
    WrapLimit(usize),
    #[error("nonterminal <{rule}> nested deeper than {limit}")]
    DepthLimit { rule: String, limit: usize },
    #[error("derived text {text:?} is not a valid expression: {source}")]
    Phenotype { text: String, source: ParseError },
    #[error("at least one expression must be mapped")]
    NoFunctions,
}

struct Mapper<'a> {
    grammar: &'a Grammar,
    codons: &'a [u8],
    limits: MappingLimits,
    position: usize,
    trace: MappingTrace,
    nesting: Vec<usize>,
}

impl Mapper<'_> {
    fn next_codon(&mut self, arity: usize) -> Result<usize, MappingError> {
        if self.position == self.codons.len() {
            if self.trace.wraps_used == self.limits.max_wraps {
                return Err(MappingError::WrapLimit(self.limits.max_wraps));
            }
            self.trace.wraps_used += 1;
            self.position = 0;
        }
        let index = self.position;
        self.position += 1;
        self.trace.codons_consumed += 1;
        self.trace.choices.push(Choice {
            codon_index: index,
            arity,
        });
        Ok(self.codons[index] as usize)
    }

    fn expand(&mut self, rule_idx: usize, out: &mut String) -> Result<(), MappingError> {
        let grammar = self.grammar;
        let rule = &grammar.rules()[rule_idx];
        self.nesting[rule_idx] += 1;
        if self.nesting[rule_idx] > self.limits.max_depth {
            return Err(MappingError::DepthLimit {
                rule: rule.name.clone(),
                limit: self.limits.max_depth,
            });
        }
        let arity = rule.arity();
        let chosen = if arity == 1 {
            0
        } else {
            self.next_codon(arity)? % arity
        };
        for symbol in &rule.productions[chosen].symbols {
            match symbol {
                Symbol::Terminal(t) => out.push_str(t),
                Symbol::NonTerminal(n) => {
                    let idx = grammar
                        .rule_index(n)
                        .expect("grammar validated at construction");
                    self.expand(idx, out)?;
                }
            }
        }
        self.nesting[rule_idx] -= 1;
        Ok(())
    }
}

/// Maps a genotype to `n_functions` expressions by expanding the start rule
/// once per expression, with the codon cursor carried across expressions.
pub fn map_genotype(
    genotype: &Genotype,
    grammar: &Grammar,
    n_functions: usize,
    limits: MappingLimits,
) -> Result<(Vec<ActivationExpr>, MappingTrace), MappingError> {
    if n_functions == 0 {
        return Err(MappingError::NoFunctions);
    }
    let start = grammar
        .rule_index(grammar.start())
        .expect("grammar validated at construction");
    let mut mapper = Mapper {
        grammar,
        codons: genotype.codons(),
        limits,
        position: 0,
        trace: MappingTrace::default(),
        nesting: vec![0; grammar.rules().len()],
    };
    let mut exprs = Vec::with_capacity(n_functions);
    for _ in 0..n_functions {
        mapper
            .trace
            .expression_offsets
            .push(mapper.trace.codons_consumed);
        let mut text = String::new();
        mapper.expand(start, &mut text)?;
        let expr = parse_text(&text).map_err(|source| MappingError::Phenotype { text, source })?;
        exprs.push(expr);
    }
    Ok((exprs, mapper.trace))
}

pub fn used_codon_count(
    genotype: &Genotype,
    grammar: &Grammar,
    n_functions: usize,
    limits: MappingLimits,
) -> Result<usize, MappingError> {
    map_genotype(genotype, grammar, n_functions, limits).map(|(_, trace)| trace.codons_consumed)
}
