//! Loads a small BNF grammar from text, maps a few random genotypes with it,
//! and prints the grammar back in canonical form.

use actevo::evolution::random_genotype;
use actevo::grammar::{load_grammar, map_genotype, to_bnf, MappingLimits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GRAMMAR: &str = r#"
# rectifier-flavoured search space
<activation_function> ::= <expr>
<expr> ::= <expr> <op> <expr> | <fn> | "x"
<op>   ::= "+" | "*"
<fn>   ::= "max(" <expr> "," <const> ")" | "tanh(" <expr> ")"
<const> ::= "0.1" | "1.0"
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grammar = load_grammar(GRAMMAR)?;
    print!("{}", to_bnf(&grammar));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let g = random_genotype(&mut rng);
        match map_genotype(&g, &grammar, 2, MappingLimits::default()) {
            Ok((exprs, trace)) => {
                let texts: Vec<String> = exprs.iter().map(|e| e.to_text()).collect();
                println!("{}  (wraps {})", texts.join("  |  "), trace.wraps_used);
            }
            Err(e) => println!("unmappable: {e}"),
        }
    }
    Ok(())
}
