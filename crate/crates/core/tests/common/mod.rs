//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

pub mod oracle;

use actevo::grammar::{Genotype, GENOME_LEN};
use rand::Rng;

pub fn genotype_from_prefix(prefix: &[u8]) -> Genotype {
    let mut codons = prefix.to_vec();
    codons.resize(GENOME_LEN, 0);
    Genotype::new(codons).expect("prefix codons in range")
}

pub fn random_codons<R: Rng>(rng: &mut R) -> Vec<u8> {
    (0..GENOME_LEN).map(|_| rng.gen_range(0..=100)).collect()
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
