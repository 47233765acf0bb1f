//! BNF production system and the codon-driven genotype→phenotype mapper.
//!
//! A [`Grammar`] is an ordered list of [`Rule`]s. Production order matters:
//! a codon `c` at a rule with `k` alternatives selects production `c % k`,
//! so permuting alternatives changes what a fixed genotype maps to.

mod bnf;
mod mapper;

pub use bnf::{load_grammar, to_bnf};
pub use mapper::{
    map_genotype, used_codon_count, Choice, Genotype, GenotypeError, MappingError, MappingLimits,
    MappingTrace, CODON_MAX, GENOME_LEN,
};

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Name of the start rule of the default grammar.
pub const START_RULE: &str = "activation_function";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("nonterminal <{name}> is referenced but never defined")]
    UndefinedNonTerminal { name: String },
    #[error("rule <{name}> is defined more than once")]
    DuplicateRule { name: String },
    #[error("rule <{name}> has no productions")]
    EmptyRule { name: String },
    #[error("rule <{name}> has an empty production")]
    EmptyProduction { name: String },
    #[error("grammar has no rules")]
    NoRules,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Symbol {
    /// Literal text emitted into the phenotype.
    Terminal(String),
    /// Reference to another rule, by name (without angle brackets).
    NonTerminal(String),
}

impl Symbol {
    pub fn terminal(text: impl Into<String>) -> Self {
        Symbol::Terminal(text.into())
    }

    pub fn nonterminal(name: impl Into<String>) -> Self {
        Symbol::NonTerminal(name.into())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(t) => write!(f, "\"{t}\""),
            Symbol::NonTerminal(n) => write!(f, "<{n}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub symbols: Vec<Symbol>,
}

impl Production {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Production { symbols }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub productions: Vec<Production>,
}

impl Rule {
    pub fn new(name: impl Into<String>, productions: Vec<Production>) -> Self {
        Rule {
            name: name.into(),
            productions,
        }
    }

    /// Number of alternatives; rules with arity 1 consume no codon.
    pub fn arity(&self) -> usize {
        self.productions.len()
    }
}

/// A validated grammar. Construction checks that every referenced
/// nonterminal is defined and no rule or production is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<Rule>,
    start: String,
}

impl Grammar {
    /// Builds a grammar whose start rule is the first rule given.
    pub fn new(rules: Vec<Rule>) -> Result<Self, GrammarError> {
        let start = rules.first().ok_or(GrammarError::NoRules)?.name.clone();
        Self::with_start(rules, start)
    }

    pub fn with_start(rules: Vec<Rule>, start: impl Into<String>) -> Result<Self, GrammarError> {
        let start = start.into();
        let mut names = HashSet::new();
        for rule in &rules {
            if !names.insert(rule.name.as_str()) {
                return Err(GrammarError::DuplicateRule {
                    name: rule.name.clone(),
                });
            }
            if rule.productions.is_empty() {
                return Err(GrammarError::EmptyRule {
                    name: rule.name.clone(),
                });
            }
            if rule.productions.iter().any(|p| p.symbols.is_empty()) {
                return Err(GrammarError::EmptyProduction {
                    name: rule.name.clone(),
                });
            }
        }
        if !names.contains(start.as_str()) {
            return Err(GrammarError::UndefinedNonTerminal { name: start });
        }
        for rule in &rules {
            for symbol in rule.productions.iter().flat_map(|p| &p.symbols) {
                if let Symbol::NonTerminal(n) = symbol {
                    if !names.contains(n.as_str()) {
                        return Err(GrammarError::UndefinedNonTerminal { name: n.clone() });
                    }
                }
            }
        }
        Ok(Grammar { rules, start })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub(crate) fn rule_index(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }
}

/// The activation-function grammar.
///
/// ```text
/// <activation_function> ::== <acti_expr>
/// <acti_expr>   ::== <acti_pre_op> | <acti_pre_op> <op> <acti_expr> | "(" <acti_pre_op> <op> <acti_expr> ")"
/// <acti_pre_op> ::== sin | cos | tan | min | max | exp | tanh | pow
/// <acti_input>  ::== x
/// <op>          ::== + | / | * | -
/// <acti_var>    ::== 0.1 | 1.0 | 2.0 | 3.0
/// ```
pub fn default_grammar() -> Grammar {
    let t = |s: &str| Symbol::Terminal(s.to_string());
    let nt = |s: &str| Symbol::NonTerminal(s.to_string());
    let p = Production::new;

    let unary = |name: &str| p(vec![t(&format!("{name}(")), nt("acti_input"), t(")")]);
    let bounded = |name: &str| {
        p(vec![
            t(&format!("{name}(")),
            nt("acti_input"),
            t(","),
            nt("acti_var"),
            t(")"),
        ])
    };

    let rules = vec![
        Rule::new(START_RULE, vec![p(vec![nt("acti_expr")])]),
        Rule::new(
            "acti_expr",
            vec![
                p(vec![nt("acti_pre_op")]),
                p(vec![nt("acti_pre_op"), nt("op"), nt("acti_expr")]),
                p(vec![
                    t("("),
                    nt("acti_pre_op"),
                    nt("op"),
                    nt("acti_expr"),
                    t(")"),
                ]),
            ],
        ),
        Rule::new(
            "acti_pre_op",
            vec![
                unary("sin"),
                unary("cos"),
                unary("tan"),
                bounded("min"),
                bounded("max"),
                unary("exp"),
                unary("tanh"),
                p(vec![
                    t("pow("),
                    nt("acti_pre_op"),
                    t(","),
                    nt("acti_var"),
                    t(")"),
                ]),
            ],
        ),
        Rule::new("acti_input", vec![p(vec![t("x")])]),
        Rule::new(
            "op",
            ["+", "/", "*", "-"].iter().map(|o| p(vec![t(o)])).collect(),
        ),
        Rule::new(
            "acti_var",
            ["0.1", "1.0", "2.0", "3.0"]
                .iter()
                .map(|c| p(vec![t(c)]))
                .collect(),
        ),
    ];
    Grammar::new(rules).expect("default grammar is well-formed")
}
