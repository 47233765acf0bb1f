//! Maps a genotype through the builtin grammar and shows which codons were
//! consumed by each expression.
//!
//!     cargo run --example map_genotype -- 1,6,1,0,7,6,3,0,... [n_functions]

use actevo::grammar::{default_grammar, map_genotype, Genotype, MappingLimits, GENOME_LEN};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let genotype: Genotype = match args.next() {
        Some(text) => text.parse()?,
        None => {
            let mut codons = vec![1, 6, 1, 0, 7, 6, 3];
            codons.resize(GENOME_LEN, 0);
            Genotype::new(codons)?
        }
    };
    let n: usize = args.next().map_or(Ok(3), |s| s.parse())?;

    let grammar = default_grammar();
    let (exprs, trace) = map_genotype(&genotype, &grammar, n, MappingLimits::default())?;
    println!("genotype {genotype}");
    let ends = trace
        .expression_offsets
        .iter()
        .skip(1)
        .chain([&trace.codons_consumed]);
    for ((expr, start), end) in exprs.iter().zip(&trace.expression_offsets).zip(ends) {
        println!("  codons {start:2}..{end:2}  {expr}");
    }
    println!(
        "consumed {} codons, wrapped {} times, {} choices",
        trace.codons_consumed,
        trace.wraps_used,
        trace.choices.len()
    );
    Ok(())
}
