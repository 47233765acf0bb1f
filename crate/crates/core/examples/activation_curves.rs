//! Samples a few activation expressions over [-10, 10] and prints a coarse
//! table; use the `curves` subcommand of the binary for full CSV output.

use actevo::expr::{derivative, parse_text, sample_curve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let texts = [
        "tan(x)+cos(x)-tanh(x)-cos(x)",
        "max(x,2.0)",
        "min(x,0.1)*max(x,0.1)-tanh(x)",
        "tanh(x)/pow(tanh(x),3.0)",
    ];
    for text in texts {
        let expr = parse_text(text)?;
        println!("{expr}");
        for (x, y) in sample_curve(&expr, -10.0, 10.0, 9) {
            let slope = derivative(&expr, &[x]).values[0];
            println!("  x {x:6.2}  y {y:10.4}  dy/dx {slope:10.4}");
        }
    }
    Ok(())
}
