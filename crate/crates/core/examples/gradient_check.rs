//! Compares backpropagated gradients with central finite differences for a
//! small network using evolved activations.

use actevo::expr::parse_text;
use actevo::matrix::Matrix;
use actevo::nn::{bce_loss, init_network, NetworkConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let acts = [
        "tanh(x)+sin(x)",
        "cos(x)*tanh(x)",
        "exp(tanh(x))/(2.0+sin(x))",
    ]
    .iter()
    .map(|t| parse_text(t))
    .collect::<Result<Vec<_>, _>>()?;
    let cfg = NetworkConfig {
        nodes_per_hidden: 4,
        ..NetworkConfig::new(3, 1)
    };
    let mut net = init_network(&cfg, acts, 5)?;
    let rows: Vec<Vec<f64>> = (0..10)
        .map(|i| {
            let t = i as f64;
            vec![(t * 0.3).sin(), (t * 0.7).cos(), t / 10.0 - 0.5]
        })
        .collect();
    let x = Matrix::from_rows(&rows);
    let y: Vec<u8> = (0..10).map(|i| (i % 2) as u8).collect();

    let (loss, grad, _) = net.loss_and_gradient(&x, &y)?;
    println!("loss {loss:.6}, {} parameters", grad.len());
    let base = net.parameters();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] += h;
        net.set_parameters(&p)?;
        let up = bce_loss(&net.forward(&x)?.probabilities, &y);
        p[i] -= 2.0 * h;
        net.set_parameters(&p)?;
        let down = bce_loss(&net.forward(&x)?.probabilities, &y);
        let fd = (up - down) / (2.0 * h);
        let rel = (grad[i] - fd).abs() / grad[i].abs().max(fd.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    net.set_parameters(&base)?;
    println!("largest relative difference {worst:.2e}");
    Ok(())
}
