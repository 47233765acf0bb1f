//! Grammatical evolution of neural-network activation functions.
//!
//! A 30-codon genotype is mapped through a BNF grammar ([`grammar`]) to one
//! activation expression per layer ([`expr`]); a small dense network
//! ([`nn`]) is trained with those activations and scored on held-out data
//! ([`metrics`]); and a genetic algorithm ([`evolution`]) searches
//! the genotype space. [`cli`] holds the command implementations used by the
//! `actevo` binary.

pub mod baseline;
pub mod cli;
pub mod config;
pub mod data;
pub mod evolution;
pub mod expr;
pub mod grammar;
pub mod matrix;
pub mod metrics;
pub mod nn;
pub mod seed;
